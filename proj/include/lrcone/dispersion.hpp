#pragma once

// Complex dispersion relation of the quadratic chain, the decay functional
// M(gamma) and Laurent expansions of the evolution symbols.

#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "lrcone/numerics.hpp"

namespace lrcone {

struct DispersionParams {
  double a = 5.0;
  double b = 2.0;
};

/// Symbols of the cyclic evolution matrices: f = cos(t Omega),
/// g = sin(t Omega)/Omega, h = -Omega sin(t Omega).
enum class SymbolKind { F, G, H };

std::string to_string(SymbolKind k);
SymbolKind symbol_kind_from_string(const std::string& s);

/// Principal square root of a - b(z + 1/z).
cplx omega_complex(const DispersionParams& p, cplx z);

/// kind(z, t); g is extended by g = t where Omega vanishes.
cplx symbol_value(const DispersionParams& p, SymbolKind kind, cplx z, double t);

/// sup of |Im Omega| on |z| = e^gamma: grid_size-point theta grid, then a
/// golden-section refinement around the grid maximizer.
double m_gamma(const DispersionParams& p, double gamma, int grid_size = 4096);

/// max over theta of d omega / d theta = b sin(theta) / omega(theta).
double max_group_velocity(const DispersionParams& p);

struct QuadraticVelocity {
  double value = 0.0;           // min of M(gamma)/gamma found
  double gamma = 0.0;           // minimizer
  double group_velocity = 0.0;  // gamma -> 0 limit
  bool at_small_end = false;    // minimizer is the first grid point
};

/// Log grid on [1e-3, 5] with 128 points.
std::vector<double> default_gamma_grid();

/// min over the grid of M(gamma)/gamma, refined by golden-section search
/// between the neighbours of the grid minimizer.
QuadraticVelocity velocity_bound_quadratic(const DispersionParams& p,
                                           const std::vector<double>& gamma_grid,
                                           int grid_size = 4096);

struct LaurentTable {
  SymbolKind kind = SymbolKind::F;
  double t = 0.0;
  double gamma = 0.0;
  int K = 0;
  std::vector<cplx> coeffs;     // coeffs[k + K] = c_k
  double radius_integral = 0.0;  // (1/2pi) int |kind(e^gamma e^{i theta}, t)| d theta

  cplx coeff(int k) const { return coeffs.at(static_cast<std::size_t>(k + K)); }
  double bound(int k) const;
};

/// c_k for |k| <= K from a DFT of the symbol on the unit circle; the circle
/// integral on |z| = e^gamma by the trapezoid rule on the same theta grid.
/// fft_size must be a power of two with fft_size >= 4K.
LaurentTable laurent_coefficients(const DispersionParams& p, SymbolKind kind, double t, double gamma,
                                  int K, int fft_size = 4096);

/// Columns k, re, im, bound.
void write_csv(std::ostream& os, const LaurentTable& table);

/// Constant of the cyclic decay estimate for all four evolution matrices:
/// C1 bounds sum_p e^{-gamma|r + p(2n+1)|} / e^{-gamma d_n}, C2 bounds the
/// circle integrals of |f| + |g| + |h| + |f| divided by e^{|t| M}.
struct CyclicDecayConstant {
  double gamma = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double M = 0.0;
  double min_abs_omega = 0.0;
  double max_abs_omega = 0.0;

  double C() const { return C1 * C2; }
};

CyclicDecayConstant cyclic_decay_constant(const DispersionParams& p, double gamma,
                                          int grid_size = 4096);

}  // namespace lrcone
