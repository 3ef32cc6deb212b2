#pragma once

// Exact Heisenberg evolution of the quadratic chain: the matrices A, B and
// their time derivatives, phase-space propagation and Weyl commutators.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrcone/dispersion.hpp"
#include "lrcone/model.hpp"
#include "lrcone/numerics.hpp"

namespace lrcone {

enum class EvolutionSource { Spectral, Circulant, OdeAppB };

std::string to_string(EvolutionSource s);

/// alpha^t(Q_l) = sum_m A_lm Q_m + B_lm P_m, alpha^t(P_l) = sum_m Adot_lm Q_m + Bdot_lm P_m.
struct EvolutionMatrices {
  double t = 0.0;
  Eigen::MatrixXd A, B, Adot, Bdot;
  EvolutionSource source = EvolutionSource::Spectral;

  Eigen::Index dim() const { return A.rows(); }
};

/// Phase-space data (u, v) of Pi(u, v) = sum_l u_l Q_l + v_l P_l.
struct PhasePoint {
  Eigen::VectorXd u, v;

  PhasePoint() = default;
  PhasePoint(Eigen::VectorXd u_, Eigen::VectorXd v_);

  static PhasePoint zero(Eigen::Index dim);
  /// amp * Q at array index `site`.
  static PhasePoint q_type(Eigen::Index dim, Eigen::Index site, double amp = 1.0);
  /// amp * P at array index `site`.
  static PhasePoint p_type(Eigen::Index dim, Eigen::Index site, double amp = 1.0);

  Eigen::Index dim() const { return u.size(); }
  /// Indices where u or v is nonzero.
  std::vector<Eigen::Index> support() const;
};

/// Caches the eigendecomposition of W so that many times can be evaluated.
class HarmonicPropagator {
 public:
  explicit HarmonicPropagator(const CouplingMatrix& w);

  EvolutionMatrices at(double t) const;
  /// symplectic_propagate(at(t), p) without forming the matrices.
  PhasePoint propagate(double t, const PhasePoint& p) const;
  const Eigen::VectorXd& frequencies() const { return freq_; }
  const Eigen::MatrixXd& modes() const { return modes_; }
  Eigen::Index dim() const { return freq_.size(); }

 private:
  Eigen::MatrixXd modes_;
  Eigen::VectorXd freq_;  // sqrt of the eigenvalues of W
};

/// A = cos(t sqrt W), B = sin(t sqrt W)/sqrt W, Adot = -sqrt W sin(t sqrt W), Bdot = A.
EvolutionMatrices evolve_matrices_spectral(const CouplingMatrix& w, double t);

/// Same matrices for the cyclic chain through the DFT of the circulant symbol.
EvolutionMatrices evolve_matrices_circulant(const ModelSpec& spec, double t);

/// Coefficients of alpha^t(Pi(p)): (A^T u + Adot^T v, B^T u + Bdot^T v).
PhasePoint symplectic_propagate(const EvolutionMatrices& e, const PhasePoint& p);

/// sigma(p1, p2) = u1.v2 - v1.u2, so that [Pi(p1), Pi(p2)] = i sigma.
double symplectic_form(const PhasePoint& p1, const PhasePoint& p2);

/// c with [alpha^t(X_l), Y_m] = c I, X = Q (j = 0) or P (j = 1), same for Y and k.
cplx pair_commutator_scalar(const EvolutionMatrices& e, Eigen::Index lambda, Eigen::Index mu, int j,
                            int k);

/// ||[alpha^t(W(p1)), W(p2)]|| = 2|sin(sigma(S(t) p1, p2) / 2)|.
double weyl_commutator_norm_exact(const EvolutionMatrices& e, const PhasePoint& p1,
                                  const PhasePoint& p2);

/// W_k norm data of the Weyl operator W(q): [W, Q_l] = v_l W, [W, P_l] = -u_l W.
NormBundle weyl_norms_exact(const PhasePoint& q);

/// |A| + |B| + |Adot| + |Bdot| against C(gamma) e^{|t| M(gamma)} e^{-gamma d_n}.
struct CyclicDecayCheck {
  double gamma = 0.0;
  double C = 0.0;
  double M = 0.0;
  long checked = 0;
  long violations = 0;
  double max_ratio = 0.0;  // max of lhs / rhs
};

/// Cyclic distance between array indices on a ring of `size` sites.
int cyclic_distance(int i, int j, int size);

CyclicDecayCheck check_cyclic_decay(const ModelSpec& spec, double gamma,
                                    const std::vector<double>& t_grid);

/// max |e1 - e2| over the four matrices.
double max_entry_difference(const EvolutionMatrices& e1, const EvolutionMatrices& e2);

}  // namespace lrcone
