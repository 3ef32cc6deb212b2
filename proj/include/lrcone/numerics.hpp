#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lrcone {

using cplx = std::complex<double>;

/// `count` points from lo to hi inclusive, uniformly spaced.
std::vector<double> linear_grid(double lo, double hi, int count);

/// `count` points from lo to hi inclusive, uniformly spaced in log(x).
std::vector<double> log_grid(double lo, double hi, int count);

/// Golden-section search for a maximum of a unimodal function on [lo, hi].
/// Returns the abscissa of the maximum.
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-12);

/// Golden-section search for a minimum on [lo, hi].
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-12);

/// Largest singular value. Dense SVD below `svd_limit` rows, otherwise power
/// iteration on A*A with a fixed seed and 1e-10 relative tolerance.
double operator_norm(const Eigen::MatrixXcd& a, Eigen::Index svd_limit = 2048);

/// exp(i * s * H) for a Hermitian H, through its eigendecomposition.
Eigen::MatrixXcd expi_hermitian(const Eigen::MatrixXcd& h, double s = 1.0);

/// Ordinary least-squares line y = slope * x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Operator norm plus the commutator sums of the W_1 and W_2 norms.
struct NormBundle {
  double op_norm = 0.0;
  double w1_extra = 0.0;  // sum over sites and j of ||[A, Q^(j)]||
  double w2_extra = 0.0;  // half the sum of double-commutator norms

  double w0() const { return op_norm; }
  double w1() const { return op_norm + w1_extra; }
  double w2() const { return op_norm + w1_extra + w2_extra; }
};

/// Format a double with 17 significant digits (round-trip exact).
std::string format_double(double x);

}  // namespace lrcone
