#pragma once

// Truncated Fock representation: the lowest d levels of an oscillator of
// frequency omega per site, tensor products in ascending site order (first
// site most significant).

#include <vector>

#include <Eigen/Dense>

#include "lrcone/model.hpp"
#include "lrcone/numerics.hpp"

namespace lrcone {

/// Largest total dimension for dense operator matrices.
inline constexpr long kDenseBudget = 4096;
/// Largest total dimension for state-vector (matrix-free) work.
inline constexpr long kStateBudget = 1L << 21;

struct TruncatedRep {
  std::vector<int> sites;  // ascending labels
  int d = 2;
  double omega = 1.0;  // frequency of the reference oscillator

  TruncatedRep() = default;
  /// Sorts the labels; throws InvalidArgument on duplicates or d < 2 and
  /// BudgetExceeded when d^|sites| > budget.
  TruncatedRep(std::vector<int> site_labels, int levels, long budget = kDenseBudget, double omega = 1.0);

  int size() const { return static_cast<int>(sites.size()); }
  long total_dim() const;
  bool contains(int label) const;
  /// Position of a label in `sites`; throws if absent.
  int position(int label) const;
  /// Index stride of the site at `pos`.
  long stride(int pos) const;
  /// Level of the site at `pos` in basis state `index`.
  int digit(long index, int pos) const;

  bool operator==(const TruncatedRep& o) const { return sites == o.sites && d == o.d && omega == o.omega; }
};

struct SiteOps {
  Eigen::MatrixXcd lower, raise, Q, P;
};

/// lower[j-1][j] = sqrt(j), raise = lower^T, Q = (l + r)/sqrt(2 omega),
/// P = sqrt(omega) (l - r)/(i sqrt2).
SiteOps build_site_ops(int d, double omega = 1.0);

/// Real d x d matrix of the truncated Q.
Eigen::MatrixXd position_matrix(int d, double omega = 1.0);

/// Eigenbasis of the truncated Q: Q = U diag(x) U^T, x the Gauss-Hermite
/// nodes divided by sqrt(omega).
struct PositionBasis {
  Eigen::VectorXd x;
  Eigen::MatrixXd U;
};
PositionBasis position_basis(int d, double omega = 1.0);

/// P^2/2 + a Q^2/2 built with d + 1 levels and truncated to d (Galerkin
/// truncation of the one-site oscillator).
Eigen::MatrixXd site_hamiltonian(int d, double a, double omega = 1.0);

struct ObservableOp {
  TruncatedRep rep;
  Eigen::MatrixXcd matrix;
  std::vector<int> support;  // ascending labels

  ObservableOp() = default;
  ObservableOp(TruncatedRep r, Eigen::MatrixXcd m, std::vector<int> s);
};

ObservableOp identity_op(const TruncatedRep& rep);

/// Operator given on the listed sites (ascending, d^k square) embedded into rep.
ObservableOp local_operator(const TruncatedRep& rep, const std::vector<int>& sites,
                            const Eigen::MatrixXcd& local);

/// Kronecker embedding T (x) I_{F \ E}.
ObservableOp embed_operator(const ObservableOp& t, const TruncatedRep& target);

/// Vacuum matrix element over the dropped sites F \ E.
ObservableOp compress_operator(const ObservableOp& t, const std::vector<int>& keep);

/// Gaussian potential terms in position functional calculus.
struct PotentialTerm {
  enum class Kind { SelfBump, PairBump };
  Kind kind = Kind::SelfBump;
  std::vector<int> sites;  // one label, or two ascending labels
  double amplitude = 0.0;  // pair amplitude already includes e^{-gamma0 |l-m|}
  double width = 1.0;
};

/// Every perturbation term of the model restricted to the given site labels
/// (pairs counted once).
std::vector<PotentialTerm> perturbation_terms(const ModelSpec& spec, const std::vector<int>& sites);

/// Values of the term on the product of position eigenvalues (d or d^2 entries).
Eigen::VectorXd potential_diagonal(const PotentialTerm& term, const PositionBasis& basis);

ObservableOp potential_operator(const TruncatedRep& rep, const PotentialTerm& term);

struct SitePhase {
  int site = 0;
  double u = 0.0;  // coefficient of Q
  double v = 0.0;  // coefficient of P
};

/// exp(i(uQ + vP)) on one site.
Eigen::MatrixXcd weyl_local(int d, double u, double v, double omega = 1.0);

/// Product of one-site Weyl factors; the identity for an empty list.
ObservableOp weyl_operator(const TruncatedRep& rep, const std::vector<SitePhase>& phase);

/// Basis states on which truncation artifacts are negligible.
struct BulkBlock {
  std::vector<long> indices;

  /// Every site below `levels`.
  static BulkBlock per_site(const TruncatedRep& rep, int levels);
  /// Total occupation <= max_quanta.
  static BulkBlock total_quanta(const TruncatedRep& rep, int max_quanta);
};

/// ||C|| or, with a block, ||C P_b|| (inputs restricted to the block).
double restricted_norm(const Eigen::MatrixXcd& c, const BulkBlock* block = nullptr);

/// W_k data of A; commutators with Q and P over support and one-site halo.
NormBundle wk_norm(const ObservableOp& a, int k, const BulkBlock* block = nullptr);

/// ||f|| + sup ||X f|| (k >= 1) + sup ||X Y f|| (k = 2) over site Q and P.
double hk_seminorm(const Eigen::VectorXcd& f, int k, const TruncatedRep& rep);

/// Q or P (j = 0, 1) of the given site as an operator on rep.
ObservableOp site_field(const TruncatedRep& rep, int label, int j);

/// Vacuum state of rep.
Eigen::VectorXcd vacuum_state(const TruncatedRep& rep);

/// Applies a one-site matrix to the site at `pos` of a state on rep.
Eigen::VectorXcd apply_site(const Eigen::MatrixXcd& local, int pos, const TruncatedRep& rep,
                            const Eigen::VectorXcd& f);

}  // namespace lrcone
