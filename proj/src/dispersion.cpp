#include "lrcone/dispersion.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "lrcone/errors.hpp"

namespace lrcone {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_params(const DispersionParams& p) {
  if (!(p.a > 2.0 * std::abs(p.b)))
    throw InvalidArgument("dispersion: a > 2|b| required");
}

cplx on_circle(double gamma, double theta) { return std::polar(std::exp(gamma), theta); }

// Grid search over theta in [0, 2pi) followed by a golden-section polish in
// the two cells around the best grid point. sign = +1 maximizes, -1 minimizes.
double circle_extremum(const std::function<double(double)>& f, int grid_size, double sign) {
  const double step = kTwoPi / grid_size;
  int best = 0;
  double best_val = sign * f(0.0);
  for (int j = 1; j < grid_size; ++j) {
    const double v = sign * f(j * step);
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  const double lo = (best - 1) * step, hi = (best + 1) * step;
  const double x = golden_section_max([&](double th) { return sign * f(th); }, lo, hi, 1e-13);
  return sign * std::max(best_val, sign * f(x));
}

}  // namespace

std::string to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::F: return "f";
    case SymbolKind::G: return "g";
    case SymbolKind::H: return "h";
  }
  return "?";
}

SymbolKind symbol_kind_from_string(const std::string& s) {
  if (s == "f") return SymbolKind::F;
  if (s == "g") return SymbolKind::G;
  if (s == "h") return SymbolKind::H;
  throw InvalidArgument("unknown symbol kind '" + s + "'");
}

cplx omega_complex(const DispersionParams& p, cplx z) {
  if (z == cplx(0.0, 0.0)) throw InvalidArgument("omega_complex: z = 0");
  return std::sqrt(p.a - p.b * (z + 1.0 / z));
}

cplx symbol_value(const DispersionParams& p, SymbolKind kind, cplx z, double t) {
  const cplx w = omega_complex(p, z);
  switch (kind) {
    case SymbolKind::F:
      return std::cos(t * w);
    case SymbolKind::G:
      if (std::abs(w) < 1e-300) return cplx(t, 0.0);
      return std::sin(t * w) / w;
    case SymbolKind::H:
      return -w * std::sin(t * w);
  }
  return {};
}

double m_gamma(const DispersionParams& p, double gamma, int grid_size) {
  if (!(gamma > 0.0)) throw InvalidArgument("m_gamma: gamma must be > 0");
  if (grid_size < 64) throw InvalidArgument("m_gamma: grid_size must be >= 64");
  if (p.b == 0.0) return 0.0;
  auto f = [&](double th) { return std::abs(omega_complex(p, on_circle(gamma, th)).imag()); };
  return circle_extremum(f, grid_size, 1.0);
}

double max_group_velocity(const DispersionParams& p) {
  check_params(p);
  if (p.b == 0.0) return 0.0;
  auto vg = [&](double th) { return std::abs(p.b * std::sin(th)) / std::sqrt(p.a - 2.0 * p.b * std::cos(th)); };
  return circle_extremum(vg, 4096, 1.0);
}

std::vector<double> default_gamma_grid() { return log_grid(1e-3, 5.0, 128); }

QuadraticVelocity velocity_bound_quadratic(const DispersionParams& p,
                                           const std::vector<double>& gamma_grid, int grid_size) {
  if (gamma_grid.empty()) throw InvalidArgument("velocity_bound_quadratic: empty gamma grid");
  check_params(p);
  QuadraticVelocity out;
  out.group_velocity = max_group_velocity(p);
  if (p.b == 0.0) {
    out.gamma = gamma_grid.front();
    out.at_small_end = true;
    return out;
  }
  auto ratio = [&](double g) { return m_gamma(p, g, grid_size) / g; };
  std::size_t best = 0;
  double best_val = ratio(gamma_grid[0]);
  for (std::size_t i = 1; i < gamma_grid.size(); ++i) {
    const double v = ratio(gamma_grid[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  out.value = best_val;
  out.gamma = gamma_grid[best];
  if (gamma_grid.size() >= 3) {
    const double lo = gamma_grid[best == 0 ? 0 : best - 1];
    const double hi = gamma_grid[std::min(best + 1, gamma_grid.size() - 1)];
    const double g = golden_section_min(ratio, lo, hi, 1e-10);
    const double v = ratio(g);
    if (v < out.value) {
      out.value = v;
      out.gamma = g;
    }
  }
  out.at_small_end = (out.gamma <= gamma_grid.front() * (1.0 + 1e-9)) || best == 0;
  return out;
}

double LaurentTable::bound(int k) const { return std::exp(-gamma * std::abs(k)) * radius_integral; }

LaurentTable laurent_coefficients(const DispersionParams& p, SymbolKind kind, double t, double gamma,
                                  int K, int fft_size) {
  check_params(p);
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0)
    throw InvalidArgument("laurent_coefficients: fft_size must be a power of two");
  if (K < 0 || 4 * K > fft_size)
    throw InvalidArgument("laurent_coefficients: need 0 <= K <= fft_size/4");
  if (!(gamma > 0.0)) throw InvalidArgument("laurent_coefficients: gamma must be > 0");

  std::vector<cplx> samples(fft_size);
  double circle = 0.0;
  for (int j = 0; j < fft_size; ++j) {
    const double th = kTwoPi * j / fft_size;
    samples[j] = symbol_value(p, kind, std::polar(1.0, th), t);
    circle += std::abs(symbol_value(p, kind, on_circle(gamma, th), t));
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> spec;
  fft.fwd(spec, samples);

  LaurentTable table;
  table.kind = kind;
  table.t = t;
  table.gamma = gamma;
  table.K = K;
  table.radius_integral = circle / fft_size;
  table.coeffs.resize(2 * K + 1);
  for (int k = -K; k <= K; ++k) {
    const int idx = ((k % fft_size) + fft_size) % fft_size;
    table.coeffs[k + K] = spec[idx] / static_cast<double>(fft_size);
  }
  return table;
}

void write_csv(std::ostream& os, const LaurentTable& table) {
  os << "k,re,im,bound\n";
  for (int k = -table.K; k <= table.K; ++k) {
    const cplx c = table.coeff(k);
    os << k << ',' << format_double(c.real()) << ',' << format_double(c.imag()) << ','
       << format_double(table.bound(k)) << '\n';
  }
}

CyclicDecayConstant cyclic_decay_constant(const DispersionParams& p, double gamma, int grid_size) {
  check_params(p);
  if (!(gamma > 0.0)) throw InvalidArgument("cyclic_decay_constant: gamma must be > 0");
  CyclicDecayConstant c;
  c.gamma = gamma;
  c.M = m_gamma(p, gamma, grid_size);
  auto abs_omega = [&](double th) { return std::abs(omega_complex(p, on_circle(gamma, th))); };
  c.min_abs_omega = circle_extremum(abs_omega, grid_size, -1.0);
  c.max_abs_omega = circle_extremum(abs_omega, grid_size, 1.0);
  if (!(c.min_abs_omega > 1e-12))
    throw InvalidArgument("cyclic_decay_constant: Omega vanishes on |z| = e^gamma");
  // |cos w|, |sin w| <= e^{|Im w|}: |f| <= e^{tM}, |g| <= e^{tM}/|Omega|, |h| <= |Omega| e^{tM}.
  c.C1 = 2.0 / (1.0 - std::exp(-gamma));
  c.C2 = 2.0 + 1.0 / c.min_abs_omega + c.max_abs_omega;
  return c;
}

}  // namespace lrcone
