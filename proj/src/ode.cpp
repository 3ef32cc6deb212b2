#include "lrcone/ode.hpp"

#include <cmath>

#include "lrcone/errors.hpp"

namespace lrcone {

double weighted_row_constant(const Eigen::MatrixXd& omega, double gamma) {
  const Eigen::Index n = omega.rows();
  double best = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index nu = 0; nu < n; ++nu) {
      double s = 0.0;
      for (Eigen::Index m = 0; m < n; ++m) {
        if (omega(l, m) == 0.0) continue;
        s += std::abs(omega(l, m)) * std::exp(-gamma * std::abs(m - nu) + gamma * std::abs(l - nu));
      }
      best = std::max(best, s);
    }
  }
  return best;
}

namespace {

struct Pair {
  Eigen::MatrixXd x0, x1;
};

Pair rk4(const MatrixFn& omega, const MatrixFn& forcing, const Eigen::MatrixXd& x0,
         const Eigen::MatrixXd& x1, double s, double t, int steps) {
  const double h = (t - s) / steps;
  Pair y{x0, x1};
  auto rhs = [&](double tau, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd d1 = omega(tau) * a;
    if (forcing) d1 += forcing(tau);
    return Pair{b, std::move(d1)};
  };
  for (int i = 0; i < steps; ++i) {
    const double tau = s + i * h;
    const Pair k1 = rhs(tau, y.x0, y.x1);
    const Pair k2 = rhs(tau + 0.5 * h, y.x0 + 0.5 * h * k1.x0, y.x1 + 0.5 * h * k1.x1);
    const Pair k3 = rhs(tau + 0.5 * h, y.x0 + 0.5 * h * k2.x0, y.x1 + 0.5 * h * k2.x1);
    const Pair k4 = rhs(tau + h, y.x0 + h * k3.x0, y.x1 + h * k3.x1);
    y.x0 += (h / 6.0) * (k1.x0 + 2.0 * k2.x0 + 2.0 * k3.x0 + k4.x0);
    y.x1 += (h / 6.0) * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1);
  }
  return y;
}

double weighted_sup(const Eigen::MatrixXd& x, double gamma) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      m = std::max(m, std::exp(gamma * std::abs(i - j)) * std::abs(x(i, j)));
  return m;
}

}  // namespace

OdeResult integrate_second_order(const MatrixFn& omega, const MatrixFn& forcing,
                                 const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x1, double s,
                                 double t, const OdeOptions& opt) {
  if (!omega) throw InvalidArgument("integrate_second_order: Omega callback missing");
  if (!(opt.step > 0.0)) throw InvalidArgument("integrate_second_order: step must be > 0");
  if (x0.rows() != x1.rows() || x0.cols() != x1.cols())
    throw InvalidArgument("integrate_second_order: initial data shapes differ");
  OdeResult r;
  r.s = s;
  r.t = t;
  if (t == s) {
    r.X0 = x0;
    r.X1 = x1;
    return r;
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t - s) / opt.step - 1e-9)));
  const Pair coarse = rk4(omega, forcing, x0, x1, s, t, steps);
  const Pair fine = rk4(omega, forcing, x0, x1, s, t, 2 * steps);
  r.halving_error = std::max((coarse.x0 - fine.x0).cwiseAbs().maxCoeff(),
                             (coarse.x1 - fine.x1).cwiseAbs().maxCoeff());
  if (!(r.halving_error <= opt.halving_tol))
    throw CertificationFailure("ODE step-halving disagreement " + std::to_string(r.halving_error) +
                               " exceeds tolerance");
  r.X0 = fine.x0;
  r.X1 = fine.x1;
  r.steps = 2 * steps;
  return r;
}

OdeResult ode_propagate_appB(const MatrixFn& omega, Eigen::Index dim, double s, double t, OdeKind kind,
                             const OdeOptions& opt) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(dim, dim);
  OdeResult r = kind == OdeKind::AType ? integrate_second_order(omega, nullptr, id, zero, s, t, opt)
                                       : integrate_second_order(omega, nullptr, zero, id, s, t, opt);

  DecayCertificate& c = r.certificate;
  c.gamma = opt.gamma;
  const int nodes = std::max(1, r.steps);
  for (int i = 0; i <= nodes; ++i) {
    const double tau = s + (t - s) * i / nodes;
    c.S = std::max(c.S, weighted_row_constant(omega(tau), opt.gamma));
  }
  c.M = std::sqrt(c.S);
  const double growth = std::exp(c.M * std::abs(t - s));
  // Comparison system N0' <= N1, N1' <= S N0 gives cosh / sinh envelopes.
  const double root = c.M > 0.0 ? c.M : 1.0;
  if (kind == OdeKind::AType) {
    c.rhs0 = growth;
    c.rhs1 = c.M > 0.0 ? root * growth : 0.0;
  } else {
    c.rhs0 = c.M > 0.0 ? growth / root : std::abs(t - s);
    c.rhs1 = growth;
  }
  c.lhs0 = weighted_sup(r.X0, opt.gamma);
  c.lhs1 = weighted_sup(r.X1, opt.gamma);
  return r;
}

EvolutionMatrices evolve_matrices_ode(const CouplingMatrix& w, double t, const OdeOptions& opt) {
  const Eigen::MatrixXd neg = -w.W;
  MatrixFn omega = [&neg](double) { return neg; };
  const auto a = ode_propagate_appB(omega, w.dim(), 0.0, t, OdeKind::AType, opt);
  const auto b = ode_propagate_appB(omega, w.dim(), 0.0, t, OdeKind::BType, opt);
  EvolutionMatrices e;
  e.t = t;
  e.source = EvolutionSource::OdeAppB;
  e.A = a.X0;
  e.Adot = a.X1;
  e.B = b.X0;
  e.Bdot = b.X1;
  return e;
}

}  // namespace lrcone
