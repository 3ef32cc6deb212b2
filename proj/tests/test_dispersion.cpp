#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "lrcone/dispersion.hpp"
#include "lrcone/errors.hpp"
#include "lrcone/harmonic.hpp"

using namespace lrcone;

TEST_CASE("omega at real points") {
  const DispersionParams p{5.0, 2.0};
  CHECK(std::abs(omega_complex(p, 1.0) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(omega_complex(p, -1.0) - cplx(3.0)) < 1e-15);
  CHECK_THROWS_AS(omega_complex(p, 0.0), InvalidArgument);

  // z + 1/z = 2 cosh(0.5 + i pi/3)
  const cplx w(0.5, std::numbers::pi / 3.0);
  const cplx z = std::exp(w);
  const cplx expected = std::sqrt(cplx(5.0) - 2.0 * 2.0 * std::cosh(w));
  CHECK(std::abs(omega_complex(p, z) - expected) < 1e-13);
}

TEST_CASE("M(gamma) and the group velocity") {
  const DispersionParams p{5.0, 2.0};
  CHECK(max_group_velocity(p) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(m_gamma(p, 1e-3) / 1e-3 == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(m_gamma(DispersionParams{5.0, 0.0}, 0.7) == 0.0);

  // Regression anchor at gamma = 0.5.
  const double m = m_gamma(p, 0.5);
  CHECK(m == doctest::Approx(0.52109530549374736).epsilon(1e-10));
  CHECK(m >= m_gamma(p, 0.5, 256) - 1e-12);
}

TEST_CASE("quadratic velocity bound") {
  const auto v = velocity_bound_quadratic(DispersionParams{5.0, 2.0}, default_gamma_grid());
  CHECK(v.value == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(v.group_velocity == doctest::Approx(1.0).epsilon(1e-10));

  // a=2, b=0.5: max of 0.5 sin(theta) / sqrt(2 - cos(theta)), found by direct scan.
  double best = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double th = std::numbers::pi * i / 200000.0;
    best = std::max(best, 0.5 * std::sin(th) / std::sqrt(2.0 - std::cos(th)));
  }
  const auto w = velocity_bound_quadratic(DispersionParams{2.0, 0.5}, default_gamma_grid());
  CHECK(w.value == doctest::Approx(best).epsilon(1e-3));

  CHECK(velocity_bound_quadratic(DispersionParams{5.0, 0.0}, default_gamma_grid()).value == 0.0);
  CHECK_THROWS_AS(velocity_bound_quadratic(DispersionParams{5.0, 2.0}, {}), InvalidArgument);
}

TEST_CASE("Laurent coefficients at t = 0") {
  const DispersionParams p{5.0, 2.0};
  const auto f = laurent_coefficients(p, SymbolKind::F, 0.0, 0.5, 8);
  CHECK(std::abs(f.coeff(0) - cplx(1.0)) < 1e-14);
  for (int k = 1; k <= 8; ++k) CHECK(std::abs(f.coeff(k)) < 1e-14);
  const auto g = laurent_coefficients(p, SymbolKind::G, 0.0, 0.5, 8);
  for (int k = -8; k <= 8; ++k) CHECK(std::abs(g.coeff(k)) < 1e-14);
}

TEST_CASE("Laurent bound and parity") {
  const DispersionParams p{5.0, 2.0};
  for (SymbolKind kind : {SymbolKind::F, SymbolKind::G, SymbolKind::H}) {
    for (double g : {0.25, 0.5, 1.0}) {
      const auto tab = laurent_coefficients(p, kind, 1.0, g, 20);
      for (int k = -20; k <= 20; ++k) {
        CHECK(std::abs(tab.coeff(k)) <= tab.bound(k) + 1e-8);
        CHECK(std::abs(tab.coeff(k) - tab.coeff(-k)) < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(laurent_coefficients(p, SymbolKind::F, 1.0, 0.5, 20, 1000), InvalidArgument);
  CHECK_THROWS_AS(laurent_coefficients(p, SymbolKind::F, 1.0, 0.5, 20, 64), InvalidArgument);
}

TEST_CASE("Laurent series reproduces the cyclic evolution matrix") {
  ModelSpec s;
  s.n_sites = 8;
  s.boundary = Boundary::Cyclic;
  const int n = s.site_count();
  const auto e = evolve_matrices_spectral(build_coupling(s), 1.0);
  const auto tab = laurent_coefficients(DispersionParams{5.0, 2.0}, SymbolKind::F, 1.0, 0.5, 60);
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cplx sum = 0.0;
      for (int k = -60; k <= 60; ++k)
        if (((i - j - k) % n + n) % n == 0) sum += tab.coeff(k);
      err = std::max(err, std::abs(sum - cplx(e.A(i, j))));
    }
  }
  CHECK(err < 1e-8);
}

TEST_CASE("Laurent table CSV") {
  const auto tab = laurent_coefficients(DispersionParams{5.0, 2.0}, SymbolKind::H, 0.5, 0.25, 3);
  std::ostringstream os;
  write_csv(os, tab);
  const std::string s = os.str();
  CHECK(s.rfind("k,re,im,bound\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 8);
}

TEST_CASE("cyclic decay constant") {
  const auto k = cyclic_decay_constant(DispersionParams{5.0, 2.0}, 0.5);
  CHECK(k.C1 == doctest::Approx(2.0 / (1.0 - std::exp(-0.5))).epsilon(1e-14));
  CHECK(k.M == doctest::Approx(m_gamma(DispersionParams{5.0, 2.0}, 0.5)).epsilon(1e-12));
  CHECK(k.C() > 0.0);
  // Omega vanishes on |z| = 2 for a = 5, b = 2.
  CHECK_THROWS(cyclic_decay_constant(DispersionParams{5.0, 2.0}, std::log(2.0)));
}
