#include "lrcone/harmonic.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "lrcone/errors.hpp"

namespace lrcone {

std::string to_string(EvolutionSource s) {
  switch (s) {
    case EvolutionSource::Spectral: return "spectral";
    case EvolutionSource::Circulant: return "circulant";
    case EvolutionSource::OdeAppB: return "ode";
  }
  return "?";
}

HarmonicPropagator::HarmonicPropagator(const CouplingMatrix& w) {
  if (w.W.rows() != w.W.cols()) throw InvalidArgument("HarmonicPropagator: W not square");
  if ((w.W - w.W.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw InvalidArgument("HarmonicPropagator: W not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w.W);
  if (eig.info() != Eigen::Success) throw CertificationFailure("HarmonicPropagator: eigensolve failed");
  if (!(eig.eigenvalues()(0) > 0.0)) throw InvalidArgument("HarmonicPropagator: W not positive definite");
  modes_ = eig.eigenvectors();
  freq_ = eig.eigenvalues().cwiseSqrt();
}

EvolutionMatrices HarmonicPropagator::at(double t) const {
  if (t == 0.0) {
    // Initial conditions exactly, free of eigenvector rounding.
    const Eigen::Index n = freq_.size();
    EvolutionMatrices e;
    e.t = 0.0;
    e.source = EvolutionSource::Spectral;
    e.A = Eigen::MatrixXd::Identity(n, n);
    e.B = Eigen::MatrixXd::Zero(n, n);
    e.Adot = Eigen::MatrixXd::Zero(n, n);
    e.Bdot = e.A;
    return e;
  }
  const Eigen::ArrayXd c = (t * freq_.array()).cos();
  const Eigen::ArrayXd s = (t * freq_.array()).sin();
  EvolutionMatrices e;
  e.t = t;
  e.source = EvolutionSource::Spectral;
  e.A = modes_ * c.matrix().asDiagonal() * modes_.transpose();
  e.B = modes_ * (s / freq_.array()).matrix().asDiagonal() * modes_.transpose();
  e.Adot = modes_ * (-s * freq_.array()).matrix().asDiagonal() * modes_.transpose();
  e.Bdot = e.A;
  return e;
}

PhasePoint HarmonicPropagator::propagate(double t, const PhasePoint& p) const {
  if (p.dim() != dim()) throw InvalidArgument("HarmonicPropagator::propagate: dimension mismatch");
  const Eigen::ArrayXd c = (t * freq_.array()).cos();
  const Eigen::ArrayXd s = (t * freq_.array()).sin();
  const Eigen::ArrayXd mu = modes_.transpose() * p.u;
  const Eigen::ArrayXd mv = modes_.transpose() * p.v;
  Eigen::VectorXd u = modes_ * (c * mu - freq_.array() * s * mv).matrix();
  Eigen::VectorXd v = modes_ * (s / freq_.array() * mu + c * mv).matrix();
  return PhasePoint(std::move(u), std::move(v));
}

EvolutionMatrices evolve_matrices_spectral(const CouplingMatrix& w, double t) {
  return HarmonicPropagator(w).at(t);
}

EvolutionMatrices evolve_matrices_circulant(const ModelSpec& spec, double t) {
  if (spec.boundary != Boundary::Cyclic)
    throw InvalidArgument("evolve_matrices_circulant: cyclic boundary required");
  if (!(spec.a > 2.0 * std::abs(spec.b))) throw InvalidArgument("evolve_matrices_circulant: a > 2|b| required");
  const int n = spec.site_count();
  if (n < 3) throw InvalidArgument("evolve_matrices_circulant: at least 3 sites required");

  std::vector<cplx> fa(n), fb(n), fad(n);
  for (int k = 0; k < n; ++k) {
    const double om = std::sqrt(spec.a - 2.0 * spec.b * std::cos(2.0 * std::numbers::pi * k / n));
    fa[k] = std::cos(t * om);
    fb[k] = std::sin(t * om) / om;
    fad[k] = -om * std::sin(t * om);
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> ra, rb, rad;
  fft.inv(ra, fa);
  fft.inv(rb, fb);
  fft.inv(rad, fad);

  EvolutionMatrices e;
  e.t = t;
  e.source = EvolutionSource::Circulant;
  e.A.resize(n, n);
  e.B.resize(n, n);
  e.Adot.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int off = ((j - i) % n + n) % n;
      e.A(i, j) = ra[off].real();
      e.B(i, j) = rb[off].real();
      e.Adot(i, j) = rad[off].real();
    }
  }
  e.Bdot = e.A;
  return e;
}

PhasePoint::PhasePoint(Eigen::VectorXd u_, Eigen::VectorXd v_) : u(std::move(u_)), v(std::move(v_)) {
  if (u.size() != v.size()) throw InvalidArgument("PhasePoint: u and v differ in length");
}

PhasePoint PhasePoint::zero(Eigen::Index dim) {
  return PhasePoint(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim));
}

PhasePoint PhasePoint::q_type(Eigen::Index dim, Eigen::Index site, double amp) {
  if (site < 0 || site >= dim) throw InvalidArgument("PhasePoint::q_type: site out of range");
  PhasePoint p = zero(dim);
  p.u(site) = amp;
  return p;
}

PhasePoint PhasePoint::p_type(Eigen::Index dim, Eigen::Index site, double amp) {
  if (site < 0 || site >= dim) throw InvalidArgument("PhasePoint::p_type: site out of range");
  PhasePoint p = zero(dim);
  p.v(site) = amp;
  return p;
}

std::vector<Eigen::Index> PhasePoint::support() const {
  std::vector<Eigen::Index> s;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (u(i) != 0.0 || v(i) != 0.0) s.push_back(i);
  return s;
}

PhasePoint symplectic_propagate(const EvolutionMatrices& e, const PhasePoint& p) {
  if (p.dim() != e.dim()) throw InvalidArgument("symplectic_propagate: dimension mismatch");
  return PhasePoint(e.A.transpose() * p.u + e.Adot.transpose() * p.v,
                    e.B.transpose() * p.u + e.Bdot.transpose() * p.v);
}

double symplectic_form(const PhasePoint& p1, const PhasePoint& p2) {
  if (p1.dim() != p2.dim()) throw InvalidArgument("symplectic_form: dimension mismatch");
  return p1.u.dot(p2.v) - p1.v.dot(p2.u);
}

cplx pair_commutator_scalar(const EvolutionMatrices& e, Eigen::Index lambda, Eigen::Index mu, int j,
                            int k) {
  if (lambda < 0 || lambda >= e.dim() || mu < 0 || mu >= e.dim())
    throw InvalidArgument("pair_commutator_scalar: site out of range");
  if ((j != 0 && j != 1) || (k != 0 && k != 1))
    throw InvalidArgument("pair_commutator_scalar: j, k must be 0 or 1");
  const cplx i(0.0, 1.0);
  // [Q, P] = i, so only the conjugate component of alpha^t(X_l) survives.
  if (j == 0) return k == 0 ? -i * e.B(lambda, mu) : i * e.A(lambda, mu);
  return k == 0 ? -i * e.Bdot(lambda, mu) : i * e.Adot(lambda, mu);
}

double weyl_commutator_norm_exact(const EvolutionMatrices& e, const PhasePoint& p1,
                                  const PhasePoint& p2) {
  const PhasePoint q = symplectic_propagate(e, p1);
  return 2.0 * std::abs(std::sin(0.5 * symplectic_form(q, p2)));
}

NormBundle weyl_norms_exact(const PhasePoint& q) {
  const double l1 = q.u.cwiseAbs().sum() + q.v.cwiseAbs().sum();
  NormBundle nb;
  nb.op_norm = 1.0;
  nb.w1_extra = l1;
  nb.w2_extra = 0.5 * l1 * l1;
  return nb;
}

int cyclic_distance(int i, int j, int size) {
  const int d = std::abs(i - j) % size;
  return std::min(d, size - d);
}

CyclicDecayCheck check_cyclic_decay(const ModelSpec& spec, double gamma,
                                    const std::vector<double>& t_grid) {
  if (spec.boundary != Boundary::Cyclic) throw InvalidArgument("check_cyclic_decay: cyclic model required");
  const auto k = cyclic_decay_constant(DispersionParams{spec.a, spec.b}, gamma);
  CyclicDecayCheck out;
  out.gamma = gamma;
  out.C = k.C();
  out.M = k.M;
  const HarmonicPropagator prop(build_coupling(spec));
  const int n = spec.site_count();
  for (double t : t_grid) {
    const auto e = prop.at(t);
    const double growth = out.C * std::exp(std::abs(t) * out.M);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double lhs = std::abs(e.A(i, j)) + std::abs(e.B(i, j)) + std::abs(e.Adot(i, j)) +
                           std::abs(e.Bdot(i, j));
        const double rhs = growth * std::exp(-gamma * cyclic_distance(i, j, n));
        ++out.checked;
        if (lhs > rhs) ++out.violations;
        out.max_ratio = std::max(out.max_ratio, lhs / rhs);
      }
    }
  }
  return out;
}

double max_entry_difference(const EvolutionMatrices& e1, const EvolutionMatrices& e2) {
  if (e1.dim() != e2.dim()) throw InvalidArgument("max_entry_difference: dimension mismatch");
  double m = (e1.A - e2.A).cwiseAbs().maxCoeff();
  m = std::max(m, (e1.B - e2.B).cwiseAbs().maxCoeff());
  m = std::max(m, (e1.Adot - e2.Adot).cwiseAbs().maxCoeff());
  m = std::max(m, (e1.Bdot - e2.Bdot).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace lrcone
