#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lrcone/dynamics.hpp"
#include "lrcone/errors.hpp"
#include "lrcone/harmonic.hpp"
#include "lrcone/lightcone.hpp"

using namespace lrcone;

namespace {

ModelSpec chain(int n, Boundary b) {
  ModelSpec s;
  s.n_sites = n;
  s.boundary = b;
  return s;
}

// norm(h, t) = C exp(M t - gamma |h|) on a grid.
ConeScan synthetic(double c, double m, double gamma) {
  ConeScan s;
  s.model = chain(8, Boundary::Cyclic);
  for (int h = -6; h <= 6; ++h)
    for (int i = 0; i <= 100; ++i) {
      const double t = 0.1 * i;
      s.points.push_back({h, t, std::min(2.0, c * std::exp(m * t - gamma * std::abs(h)))});
    }
  return s;
}

}  // namespace

TEST_CASE("model identifiers") {
  CHECK(model_id(chain(16, Boundary::Cyclic)) == "cyclic-n16-a5-b2");
  ModelSpec s = chain(2, Boundary::Open);
  s.perturbation = PerturbationSpec{0.2, 0.1, 1.0, 1.0, std::nullopt};
  CHECK(model_id(s) == "open-n2-a5-b2-eps0.2,0.1");
}

TEST_CASE("harmonic scan reproduces the symplectic formula") {
  const ModelSpec s = chain(16, Boundary::Cyclic);
  const int n = s.site_count();
  const PhasePoint a = PhasePoint::q_type(n, 16), b = PhasePoint::p_type(n, 16);
  const ConeScan scan = cone_scan_harmonic(s, a, b, {-3, 0, 5, 16}, {0.0, 1.0, 2.5});
  CHECK(scan.points.size() == 12);
  CHECK(scan.source == ScanSource::HarmonicExact);
  CHECK(scan.shifts() == std::vector<int>{-3, 0, 5, 16});
  for (const auto& p : scan.points) {
    const auto e = evolve_matrices_circulant(s, p.t);
    const int j = ((16 + p.h) % n + n) % n;
    const double exact = weyl_commutator_norm_exact(e, a, PhasePoint::p_type(n, j));
    CHECK(p.norm == doctest::Approx(exact).epsilon(1e-10));
  }
  // At t = 0 only the coincident pair fails to commute: [Q, P] = i, so 2|sin(1/2)|.
  for (const auto& p : scan.points)
    if (p.t == 0.0) CHECK(p.norm == doctest::Approx(p.h == 0 ? 2.0 * std::sin(0.5) : 0.0));
  CHECK_THROWS_AS(cone_scan_harmonic(s, a, b, {17}, {1.0}), InvalidArgument);
}

TEST_CASE("open chains reject shifts leaving the lattice and drop the outer quarter") {
  const ModelSpec small = chain(4, Boundary::Open);
  const PhasePoint a = PhasePoint::q_type(9, 4);
  CHECK_THROWS_AS(cone_scan_harmonic(small, a, a, {5}, {1.0}), InvalidArgument);
  CHECK(cone_scan_harmonic(small, a, a, {4}, {1.0}).points.size() == 1);

  const ModelSpec big = chain(16, Boundary::Open);
  const PhasePoint c = PhasePoint::q_type(33, 16);
  // 33 sites: 4 sites at each end are excluded.
  const ConeScan scan = cone_scan_harmonic(big, c, c, {0, 12, 13, -13}, {1.0});
  CHECK(scan.points.size() == 2);
}

TEST_CASE("dense and state Fock scans agree") {
  const ModelSpec s = chain(1, Boundary::Open);
  const int d = 6;
  const TruncatedRep rep({-1, 0, 1}, d);
  const HamiltonianBundle bundle = assemble_hamiltonian(s, rep);
  const LocalObservable la = weyl_local_observable(d, {{-1, 1.0, 0.0}});
  const LocalObservable lb = weyl_local_observable(d, {{-1, 0.0, 1.0}});
  const ObservableOp a = local_operator(rep, la.sites, la.local);
  const ObservableOp b = local_operator(rep, lb.sites, lb.local);
  const std::vector<int> hs{0, 1, 2};
  const std::vector<double> ts{0.0, 0.5, 1.2};
  for (int q : {0, 1}) {
    const BulkBlock block = BulkBlock::total_quanta(rep, q);
    const ConeScan dense = cone_scan_fock(bundle, a, b, hs, ts, &block);
    const DensePropagator dp(bundle);
    const ConeScan via_dense = cone_scan_fock(dp, la, lb, hs, ts, q);
    const auto kp = make_propagator(s, rep.sites, d, 1);
    const ConeScan via_krylov = cone_scan_fock(*kp, la, lb, hs, ts, q);
    REQUIRE(dense.points.size() == 9);
    REQUIRE(via_dense.points.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK(via_dense.points[i].h == dense.points[i].h);
      CHECK(via_dense.points[i].t == dense.points[i].t);
      CHECK(via_dense.points[i].norm == doctest::Approx(dense.points[i].norm).epsilon(1e-9));
      CHECK(via_krylov.points[i].norm == doctest::Approx(dense.points[i].norm).epsilon(1e-7));
    }
  }
  const DensePropagator dp(bundle);
  CHECK_THROWS_AS(cone_scan_fock(dp, la, lb, {3}, ts, 0), InvalidArgument);
  CHECK_THROWS_AS(cone_scan_fock(dp, la, lb, hs, {1.0, 0.5}, 0), InvalidArgument);
}

TEST_CASE("crossing times interpolate linearly") {
  ConeScan s;
  s.points = {{1, 0.0, 0.0}, {1, 1.0, 0.5}, {1, 2.0, 1.0}, {2, 0.0, 0.0}, {2, 1.0, 0.0},
              {0, 0.0, 1.0}, {3, 0.0, 0.0}, {3, 1.0, 0.1}, {3, 2.0, 0.3}};
  const auto c = crossing_times(s, 0.25);
  REQUIRE(c.size() == 2);
  CHECK(c[0].h == 1);
  CHECK(c[0].t == doctest::Approx(0.5));
  CHECK(c[1].h == 3);
  CHECK(c[1].t == doctest::Approx(1.75));
}

TEST_CASE("velocity fit recovers a synthetic cone") {
  const ConeScan s = synthetic(1e-6, 2.0, 1.0);
  const VelocityReport r = fit_velocity(s, 1e-3);
  REQUIRE(r.defined);
  // Crossing at 2t - |h| = log(threshold / C): slope of |h| against t is 2.
  CHECK(r.v_empirical == doctest::Approx(2.0).epsilon(2e-2));
  CHECK(r.gamma_fit == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.M_fit == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r.C_fit == doctest::Approx(1e-6).epsilon(1e-6));
  CHECK(r.outside_points > 3);
  CHECK(r.v_bound_quadratic == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(std::isfinite(r.v_bound_general));

  ConeScan few;
  few.points = {{1, 0.0, 0.0}, {1, 1.0, 1.0}};
  const VelocityReport none = fit_velocity(few, 0.5);
  CHECK_FALSE(none.defined);
  CHECK(std::isnan(none.v_empirical));
}

TEST_CASE("cone bound check") {
  const ConeScan s = synthetic(0.5, 1.0, 0.5);
  const ConeBoundCheck ok = check_cone_bound(s, 0.5, 1.0, 1.0, 0);
  CHECK(ok.checked == static_cast<long>(s.points.size()));
  CHECK(ok.violations == 0);
  CHECK(ok.max_ratio == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(check_cone_bound(s, 0.5, 0.4, 1.0, 0).violations > 0);
  CHECK(check_cone_bound(s, 0.5, 0.25, 1.0, 0, 2.0).violations == 0);

  // Ring distance: h = 8 on 10 sites is 2 steps away.
  ConeScan ring;
  ring.points = {{8, 0.0, 0.9 * std::exp(-2.0)}};
  CHECK(check_cone_bound(ring, 1.0, 1.0, 0.0, 10).violations == 0);
  CHECK(check_cone_bound(ring, 1.0, 1.0, 0.0, 0).violations == 1);
  CHECK(check_cone_bound(ring, 1.0, 1.0, 0.0, 0, 1.0, 0.2).violations == 0);
}

TEST_CASE("ray scans follow ceil(v t)") {
  const ModelSpec s = chain(16, Boundary::Cyclic);
  const int n = s.site_count();
  const PhasePoint a = PhasePoint::q_type(n, 16);
  const auto ray = ray_scan_harmonic(s, a, a, 1.5, 1.0 / 1.5, 8);
  REQUIRE(ray.size() == 9);
  for (std::size_t k = 0; k < ray.size(); ++k) {
    CHECK(ray[k].h == static_cast<int>(k));
    const ConeScan one = cone_scan_harmonic(s, a, a, {ray[k].h}, {ray[k].t});
    CHECK(ray[k].norm == doctest::Approx(one.points[0].norm).epsilon(1e-12));
  }
  CHECK(strictly_decreasing_from({3.0, 1.0, 2.0, 1.0, 0.0}) == 2);
  CHECK(strictly_decreasing_from({1.0, 2.0, 3.0}) == 2);
  CHECK(strictly_decreasing_from({3.0, 2.0, 1.0}) == 0);
  CHECK(strictly_decreasing_from({}) == -1);
}

TEST_CASE("scan serialization") {
  ConeScan s;
  s.model_id = "cyclic-n16-a5-b2";
  s.model = chain(16, Boundary::Cyclic);
  s.a_desc = "Q[0]";
  s.b_desc = "P[0]";
  s.source = ScanSource::FockNumeric;
  s.points = {{1, 0.5, 0.125}, {-2, 1.0, 1.0 / 3.0}};
  const nlohmann::json j = s;
  const ConeScan back = j.get<ConeScan>();
  CHECK(back.model_id == s.model_id);
  CHECK(back.source == ScanSource::FockNumeric);
  CHECK(back.points[1].norm == s.points[1].norm);
  CHECK(back.model == s.model);

  std::ostringstream os;
  write_csv(os, s);
  CHECK(os.str().rfind("h,t,norm\n1,0.5,0.125\n", 0) == 0);

  VelocityReport r;
  r.defined = true;
  r.v_empirical = 1.04;
  r.crossings = {{3, 2.5}};
  const VelocityReport rb = nlohmann::json(r).get<VelocityReport>();
  CHECK(rb.v_empirical == 1.04);
  CHECK(std::isnan(rb.gamma_fit));
  CHECK(rb.crossings.size() == 1);
  CHECK(scan_source_from_string(to_string(ScanSource::HarmonicExact)) == ScanSource::HarmonicExact);
  CHECK_THROWS_AS(scan_source_from_string("bogus"), InvalidArgument);
}

TEST_CASE("five-site Fock commutator follows the harmonic formula") {
  const ModelSpec s = chain(2, Boundary::Open);
  const int d = 10;
  const double omega = std::sqrt(5.0);
  const auto prop = make_propagator(s, {-2, -1, 0, 1, 2}, d, 1, {}, omega);
  const LocalObservable w = weyl_local_observable(d, {{0, 1.0, 0.0}}, omega);
  const std::vector<double> ts{0.0, 0.5, 1.0, 1.5, 2.0};
  const ConeScan fock = cone_scan_fock(*prop, w, w, {2}, ts, 0);
  const PhasePoint q0 = PhasePoint::q_type(5, 2);
  const ConeScan exact = cone_scan_harmonic(s, q0, q0, {2}, ts);
  REQUIRE(fock.points.size() == ts.size());
  REQUIRE(exact.points.size() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double b02 = evolve_matrices_spectral(build_coupling(s), ts[i]).B(2, 4);
    CHECK(exact.points[i].norm == doctest::Approx(2.0 * std::abs(std::sin(b02 / 2.0))).epsilon(1e-12));
    CHECK(std::abs(fock.points[i].norm - exact.points[i].norm) < 2e-3);
  }
  CHECK(exact.points.back().norm > 0.1);
}
