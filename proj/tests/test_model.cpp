#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lrcone/errors.hpp"
#include "lrcone/model.hpp"

using namespace lrcone;

namespace {

ModelSpec chain(int n, Boundary b, double a = 5.0, double c = 2.0) {
  ModelSpec s;
  s.n_sites = n;
  s.boundary = b;
  s.a = a;
  s.b = c;
  return s;
}

bool has_violation(const ValidationReport& r, const std::string& text) {
  for (const auto& v : r.violations)
    if (v == text) return true;
  return false;
}

}  // namespace

TEST_CASE("validate_spec reports the standing assumptions") {
  CHECK(validate_spec(chain(1, Boundary::Open)).ok());
  CHECK(has_violation(validate_spec(chain(1, Boundary::Open, 4.0, 2.0)), "a>2b fails"));
  CHECK(has_violation(validate_spec(chain(1, Boundary::Open, 5.0, -1.0)), "b>0 fails"));
  CHECK(has_violation(validate_spec(chain(0, Boundary::Open)), "n_sites>=1 fails"));
}

TEST_CASE("build_coupling transcribes the quadratic form") {
  const Eigen::Matrix3d open{{5, -2, 0}, {-2, 5, -2}, {0, -2, 5}};
  CHECK(build_coupling(chain(1, Boundary::Open)).W == open);

  Eigen::Matrix3d cyc = open;
  cyc(0, 2) = cyc(2, 0) = -2;
  const auto w = build_coupling(chain(1, Boundary::Cyclic));
  CHECK(w.W == cyc);

  // a - 2b cos(2 pi k / 3) = {1, 7, 7}
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w.W);
  CHECK(eig.eigenvalues()(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.eigenvalues()(1) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(eig.eigenvalues()(2) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("coupling matrices are symmetric with spectrum above a - 2b") {
  for (int n : {1, 4, 16, 32}) {
    for (Boundary b : {Boundary::Open, Boundary::Cyclic}) {
      const auto w = build_coupling(chain(n, b));
      CHECK(w.W == w.W.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w.W);
      CHECK(eig.eigenvalues().minCoeff() >= 1.0 - 1e-10);
    }
  }
  CHECK_THROWS_AS(build_coupling(chain(1, Boundary::Open, 4.0, 2.0)), InvalidArgument);
  CHECK_THROWS_AS(coupling_from_matrix(Eigen::Matrix2d{{1, 2}, {0, 1}}), InvalidArgument);
}

TEST_CASE("Gaussian Fourier moments have closed forms") {
  // v = eps exp(-x^2/2): ||xi^2 v^||_1 = 2 pi eps, ||xi^3 v^||_1 = 4 eps sqrt(2 pi)
  const double eps = 0.3;
  CHECK(gaussian_fourier_moment(eps, 1.0, 2) == doctest::Approx(2.0 * std::numbers::pi * eps).epsilon(1e-13));
  CHECK(gaussian_fourier_moment(eps, 1.0, 3) ==
        doctest::Approx(4.0 * eps * std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("hypothesis constants of the pure quadratic model") {
  const auto c = hypothesis_constants(chain(4, Boundary::Open));
  CHECK(c.k(0) == 5.0);
  CHECK(c.k(1) == 2.0);
  CHECK(c.k(-1) == 2.0);
  CHECK(c.k(2) == 0.0);
  CHECK(c.admits(10.0));
  CHECK(c.C0 == 0.0);
}

TEST_CASE("perturbed profile decays like exp(-gamma0 h)") {
  ModelSpec s = chain(4, Boundary::Open);
  s.perturbation = PerturbationSpec{0.2, 0.3, 1.0, 0.8, std::nullopt};
  const auto c = hypothesis_constants(s);
  CHECK(c.gamma0 == 0.8);
  CHECK_FALSE(c.range.has_value());
  // k(1) also carries the nearest-neighbour coupling.
  for (int h = 3; h < 8; ++h) CHECK(c.k(h) == doctest::Approx(c.k(h - 1) * std::exp(-0.8)).epsilon(1e-12));
  for (int h = 2; h < 8; ++h) CHECK(c.k(h) <= c.k(0) * std::exp(-0.8 * (h - 1)));
  CHECK(c.admits(0.5));
  CHECK_FALSE(c.admits(0.8));
  CHECK_THROWS_AS(s_gamma(c, 0.9), InvalidArgument);

  s.perturbation->range_cut = 2;
  const auto cut = hypothesis_constants(s);
  CHECK(cut.k(3) == 0.0);
  CHECK(cut.k(2) > 0.0);
  CHECK(cut.admits(5.0));

  s.perturbation->width = 0.0;
  CHECK_THROWS_AS(hypothesis_constants(s), InvalidArgument);
}

TEST_CASE("S_gamma of the quadratic chain") {
  const auto c = hypothesis_constants(chain(4, Boundary::Open));
  CHECK(s_gamma(c, 0.5) == doctest::Approx(5.0 + 4.0 * std::cosh(0.5)).epsilon(1e-14));
  CHECK(s_gamma(c, 0.5) == doctest::Approx(9.510).epsilon(1e-4));
  CHECK(s_gamma(c, 1e-12) == doctest::Approx(9.0).epsilon(1e-10));
  CHECK(s_gamma_convolution(c, 0.5) == doctest::Approx(5.0 + 4.0 * std::exp(0.5)).epsilon(1e-14));
  double prev = 0.0;
  for (double g = 0.05; g < 3.0; g += 0.05) {
    CHECK(s_gamma(c, g) >= prev);
    prev = s_gamma(c, g);
  }
}

TEST_CASE("S_gamma satisfies the matrix inequality by brute force") {
  ModelSpec s = chain(4, Boundary::Open);
  s.perturbation = PerturbationSpec{0.2, 0.2, 1.0, 1.0, std::nullopt};
  const auto c = hypothesis_constants(s);
  for (double g : {0.25, 0.5, 0.9}) {
    const double sharp = s_gamma(c, g);
    const double conv = s_gamma_convolution(c, g);
    CHECK(sharp <= conv);
    for (int n : {4, 16, 32}) {
      const int size = 2 * n + 1;
      for (int l = 0; l < size; ++l) {
        for (int nu = 0; nu < size; ++nu) {
          double lhs = 0.0;
          for (int m = 0; m < size; ++m) lhs += c.k(l - m) * std::exp(-g * std::abs(m - nu));
          CHECK(lhs <= sharp * std::exp(-g * std::abs(l - nu)) * (1.0 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("general velocity bound") {
  const auto c = hypothesis_constants(chain(4, Boundary::Open));
  CHECK(velocity_bound_general(c, {1.0}).value == doctest::Approx(2.0 * std::sqrt(s_gamma(c, 1.0))).epsilon(1e-15));
  CHECK_THROWS_AS(velocity_bound_general(c, {}), InvalidArgument);

  std::vector<double> grid;
  for (int i = 0; i < 64; ++i) grid.push_back(0.01 * std::pow(300.0, i / 63.0));
  const auto vb = velocity_bound_general(c, grid);
  CHECK(std::isfinite(vb.value));
  CHECK(vb.value > 0.0);

  // Refinement containing the minimizer does not change the minimum upward.
  std::vector<double> finer = grid;
  for (int i = 0; i + 1 < 64; ++i) finer.push_back(0.5 * (grid[i] + grid[i + 1]));
  CHECK(velocity_bound_general(c, finer).value <= vb.value);

  // a, b and amplitudes scaled by g multiply the bound by sqrt(g).
  ModelSpec s = chain(4, Boundary::Open);
  s.perturbation = PerturbationSpec{0.1, 0.1, 1.0, 1.0, 3};
  const double base = velocity_bound_general(hypothesis_constants(s), grid).value;
  const double big = velocity_bound_general(hypothesis_constants(scaled(s, 4.0)), grid).value;
  CHECK(big / base == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("ModelSpec JSON round trip") {
  ModelSpec s = chain(3, Boundary::Cyclic, 6.0, 1.5);
  s.perturbation = PerturbationSpec{0.1, 0.2, 0.7, 1.3, std::nullopt};
  const nlohmann::json j = s;
  CHECK(j.at("perturbation").at("range_cut") == "inf");
  CHECK(j.get<ModelSpec>() == s);
  s.perturbation->range_cut = 2;
  CHECK(nlohmann::json(s).get<ModelSpec>() == s);
  s.perturbation.reset();
  CHECK(nlohmann::json(s).get<ModelSpec>() == s);
}
