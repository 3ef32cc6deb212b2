#pragma once

// Truncated Hamiltonians and Heisenberg evolution: dense eigendecomposition
// for small representations, Lanczos state propagation for large ones.

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "lrcone/fock.hpp"
#include "lrcone/krylov.hpp"
#include "lrcone/model.hpp"

namespace lrcone {

/// coeff * Q_l Q_m.
struct BondTerm {
  int l = 0, m = 0;
  double coeff = 0.0;
};

/// H = sum_l (P_l^2/2 + a Q_l^2/2) + bonds + potentials on a set of sites.
struct HamiltonianTerms {
  std::vector<int> sites;
  double a = 0.0;
  std::vector<BondTerm> bonds;
  std::vector<PotentialTerm> potentials;
};

/// Terms of H restricted to `sites` (labels of the model). The cyclic corner
/// bond is included only when both chain ends are present.
HamiltonianTerms hamiltonian_terms(const ModelSpec& spec, const std::vector<int>& sites);

/// Dense operator of the terms on rep (rep must contain every site).
Eigen::MatrixXd dense_hamiltonian(const HamiltonianTerms& terms, const TruncatedRep& rep);

struct HamiltonianBundle {
  TruncatedRep rep;
  ModelSpec model;
  Eigen::MatrixXd H;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// H of the model on the sites of rep, eigendecomposed once.
HamiltonianBundle assemble_hamiltonian(const ModelSpec& model, const TruncatedRep& rep);
HamiltonianBundle bundle_from_terms(const ModelSpec& model, const HamiltonianTerms& terms,
                                    const TruncatedRep& rep);

/// e^{itH} A e^{-itH}.
ObservableOp heisenberg_evolve(const HamiltonianBundle& bundle, const ObservableOp& a, double t);

/// ||XY - YX||, optionally with inputs restricted to the block.
double commutator_norm(const ObservableOp& x, const ObservableOp& y, const BulkBlock* block = nullptr);

struct GrowthPoint {
  double t = 0.0;
  NormBundle norms;
  std::vector<double> site_profile;  // ||[alpha^t(A), Q_l]|| + ||[alpha^t(A), P_l]|| per rep site
};

std::vector<GrowthPoint> wk_growth_curve(const HamiltonianBundle& bundle, const ObservableOp& a,
                                         const std::vector<double>& t_grid, int k = 2,
                                         const BulkBlock* block = nullptr);

/// tau_h(A): the support relabelled by +h.
ObservableOp shift_observable(const ObservableOp& a, int h);

struct InteractionSplit {
  int m = 0, n = 0;
  ObservableOp H_full;
  ObservableOp V_inter;

  /// H_full - (1 - theta) V_inter.
  ObservableOp h_theta(double theta) const;
};

InteractionSplit interaction_split(const ModelSpec& model, int m, int n, const TruncatedRep& rep);

/// Operator on a few sites: `local` acts on `sites` (ascending labels).
struct LocalObservable {
  std::vector<int> sites;
  Eigen::MatrixXcd local;
};

LocalObservable weyl_local_observable(int d, const std::vector<SitePhase>& phase, double omega = 1.0);

/// Propagates states of one representation (dense or matrix-free).
class Propagator {
 public:
  virtual ~Propagator() = default;
  virtual const TruncatedRep& rep() const = 0;
  /// e^{-iHt} v.
  virtual Eigen::VectorXcd evolve(const Eigen::VectorXcd& v, double t) const = 0;
  /// Fock-basis operator rewritten in the propagator's working basis.
  virtual LocalObservable prepare(const LocalObservable& op) const = 0;
  /// Fock basis state with the given index, in the working basis.
  virtual Eigen::VectorXcd basis_state(long index) const = 0;
  virtual long matvecs() const { return 0; }

  /// Applies an operator returned by prepare().
  Eigen::VectorXcd apply_prepared(const LocalObservable& op, const Eigen::VectorXcd& v) const;
};

class DensePropagator : public Propagator {
 public:
  explicit DensePropagator(HamiltonianBundle bundle);
  const TruncatedRep& rep() const override { return bundle_.rep; }
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& v, double t) const override;
  LocalObservable prepare(const LocalObservable& op) const override { return op; }
  Eigen::VectorXcd basis_state(long index) const override;
  const HamiltonianBundle& bundle() const { return bundle_; }

 private:
  HamiltonianBundle bundle_;
};

/// Works in the product eigenbasis of the truncated positions, where every
/// potential is diagonal and each kinetic term acts on one site.
class KrylovPropagator : public Propagator {
 public:
  KrylovPropagator(const HamiltonianTerms& terms, int d, KrylovOptions opt = {}, long budget = kStateBudget,
                   double omega = 1.0);
  const TruncatedRep& rep() const override { return rep_; }
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& v, double t) const override;
  LocalObservable prepare(const LocalObservable& op) const override;
  Eigen::VectorXcd basis_state(long index) const override;
  long matvecs() const override { return stats_.matvecs; }
  const ProductHamiltonian& hamiltonian() const { return *h_; }

 private:
  TruncatedRep rep_;
  PositionBasis basis_;
  std::unique_ptr<ProductHamiltonian> h_;
  KrylovOptions opt_;
  mutable KrylovStats stats_;
  mutable KrylovWorkspace work_;
};

/// Dense when d^|sites| <= dense_limit, Krylov otherwise.
std::unique_ptr<Propagator> make_propagator(const ModelSpec& model, const std::vector<int>& sites, int d,
                                            long dense_limit = 1024, KrylovOptions opt = {}, double omega = 1.0);

struct GapResult {
  int m = 0, n = 0;
  double t = 0.0;
  int distance = 0;  // d(sigma(A), complement of Lambda_m)
  double gap = 0.0;
};

/// ||(alpha_m^t(A) (x) I - alpha_n^t(A)) P_b|| on the Lambda_n representation
/// with the block of total occupation <= block_quanta. alpha_m is computed
/// densely on Lambda_m; m == n gives 0.
GapResult convergence_gap(const ModelSpec& model, const LocalObservable& a, int m, int n, double t, int d,
                          int block_quanta = 1, KrylovOptions opt = {}, double omega = 1.0);

}  // namespace lrcone
