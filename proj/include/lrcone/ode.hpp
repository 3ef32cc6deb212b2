#pragma once

// Second-order matrix systems X0' = X1, X1' = Omega(t) X0 + F(t) integrated
// by fixed-step classical RK4 with a step-halving check.

#include <functional>

#include <Eigen/Dense>

#include "lrcone/harmonic.hpp"
#include "lrcone/model.hpp"

namespace lrcone {

using MatrixFn = std::function<Eigen::MatrixXd(double)>;

enum class OdeKind { AType, BType };

struct OdeOptions {
  double step = 1e-3;
  double halving_tol = 1e-8;  // max entry disagreement between step and step/2
  double gamma = 0.5;         // weight of the decay certificate
};

/// sup_{l,m} e^{gamma|l-m|} |X_lm| against C e^{M|t-s|}, M = sqrt(S).
struct DecayCertificate {
  double gamma = 0.0;
  double S = 0.0;  // max_{l,nu} sum_m |Omega_lm| e^{-gamma|m-nu|} e^{gamma|l-nu|}
  double M = 0.0;
  double lhs0 = 0.0, rhs0 = 0.0;
  double lhs1 = 0.0, rhs1 = 0.0;

  bool ok() const { return lhs0 <= rhs0 && lhs1 <= rhs1; }
};

struct OdeResult {
  double s = 0.0, t = 0.0;
  Eigen::MatrixXd X0, X1;
  int steps = 0;
  double halving_error = 0.0;
  DecayCertificate certificate;
};

/// Weighted row-sum constant S of Omega at one time.
double weighted_row_constant(const Eigen::MatrixXd& omega, double gamma);

/// General solve from arbitrary initial data (any column count). Throws
/// CertificationFailure when the halved-step run disagrees by more than the
/// tolerance. The certificate is left empty.
OdeResult integrate_second_order(const MatrixFn& omega, const MatrixFn& forcing,
                                 const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x1, double s,
                                 double t, const OdeOptions& opt = {});

/// A-type (X0 = I, X1 = 0) or B-type (X0 = 0, X1 = I) family with the decay
/// certificate evaluated at the end point. S is sampled at every step node.
OdeResult ode_propagate_appB(const MatrixFn& omega, Eigen::Index dim, double s, double t, OdeKind kind,
                             const OdeOptions& opt = {});

/// Evolution matrices of the static quadratic model through the ODE path
/// (Omega = -W): A, Adot from the A-type run and B, Bdot from the B-type run.
EvolutionMatrices evolve_matrices_ode(const CouplingMatrix& w, double t, const OdeOptions& opt = {});

}  // namespace lrcone
