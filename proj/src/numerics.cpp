#include "lrcone/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "lrcone/errors.hpp"

namespace lrcone {

std::vector<double> linear_grid(double lo, double hi, int count) {
  if (count < 1) throw InvalidArgument("linear_grid: count must be >= 1");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
  out.back() = hi;
  return out;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw InvalidArgument("log_grid: bounds must be positive");
  auto g = linear_grid(std::log(lo), std::log(hi), count);
  for (auto& x : g) x = std::exp(x);
  g.front() = lo;
  g.back() = hi;
  return g;
}

namespace {
constexpr double kInvPhi = 0.6180339887498949;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
  return golden_section_max([&](double x) { return -f(x); }, lo, hi, tol);
}

double operator_norm(const Eigen::MatrixXcd& a, Eigen::Index svd_limit) {
  if (a.size() == 0) return 0.0;
  if (a.rows() <= svd_limit && a.cols() <= svd_limit) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
    return svd.singularValues()(0);
  }
  std::mt19937_64 rng(20240611ULL);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd x(a.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = cplx(gauss(rng), gauss(rng));
  x.normalize();
  double prev = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXcd y = a.adjoint() * (a * x);
    const double lambda = y.norm();
    if (lambda == 0.0) return 0.0;
    x = y / lambda;
    if (std::abs(lambda - prev) <= 1e-10 * lambda) return std::sqrt(lambda);
    prev = lambda;
  }
  throw CertificationFailure("operator_norm: power iteration did not converge");
}

Eigen::MatrixXcd expi_hermitian(const Eigen::MatrixXcd& h, double s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  if (eig.info() != Eigen::Success) throw CertificationFailure("expi_hermitian: eigensolver failed");
  Eigen::VectorXcd phase =
      (eig.eigenvalues().array() * s).unaryExpr([](double x) { return std::polar(1.0, x); });
  return eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace lrcone
