#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lrcone/errors.hpp"
#include "lrcone/fock.hpp"

using namespace lrcone;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

Eigen::MatrixXcd random_matrix(Eigen::Index n, unsigned seed) {
  std::srand(seed);
  return Eigen::MatrixXcd::Random(n, n);
}

}  // namespace

TEST_CASE("truncated representation layout") {
  const TruncatedRep rep({2, -1, 0}, 3);
  CHECK(rep.sites == std::vector<int>{-1, 0, 2});
  CHECK(rep.total_dim() == 27);
  CHECK(rep.stride(0) == 9);
  CHECK(rep.stride(2) == 1);
  CHECK(rep.digit(2 * 9 + 1 * 3 + 0, 0) == 2);
  CHECK(rep.digit(2 * 9 + 1 * 3 + 0, 1) == 1);
  CHECK(rep.position(2) == 2);
  CHECK_THROWS_AS(rep.position(1), InvalidArgument);
  CHECK_THROWS_AS(TruncatedRep({0, 0}, 3), InvalidArgument);
  CHECK_THROWS_AS(TruncatedRep({0}, 1), InvalidArgument);
  CHECK_THROWS_AS(TruncatedRep({0, 1, 2, 3, 4}, 6), BudgetExceeded);
  CHECK_NOTHROW(TruncatedRep({0, 1, 2, 3, 4}, 6, kStateBudget));
}

TEST_CASE("ladder operators and canonical commutator") {
  const int d = 6;
  const SiteOps ops = build_site_ops(d);
  const Eigen::MatrixXcd n = ops.raise * ops.lower;
  for (int j = 0; j < d; ++j) CHECK(n(j, j).real() == doctest::Approx(j).epsilon(1e-14));
  // [Q, P] = i except in the top level.
  const Eigen::MatrixXcd c = ops.Q * ops.P - ops.P * ops.Q;
  CHECK(max_abs(c.topLeftCorner(d - 1, d - 1) - cplx(0.0, 1.0) * Eigen::MatrixXcd::Identity(d - 1, d - 1)) < 1e-14);
  CHECK(c(d - 1, d - 1).imag() == doctest::Approx(1.0 - d).epsilon(1e-14));
  CHECK(max_abs(ops.Q - ops.Q.adjoint()) < 1e-15);
  CHECK(max_abs(ops.P - ops.P.adjoint()) < 1e-15);
}

TEST_CASE("position basis gives Gauss-Hermite nodes") {
  const PositionBasis b2 = position_basis(2);
  CHECK(b2.x(0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(b2.x(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  const PositionBasis b3 = position_basis(3);
  CHECK(std::abs(b3.x(1)) < 1e-14);
  CHECK(b3.x(2) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
  const Eigen::MatrixXd back = b3.U * b3.x.asDiagonal() * b3.U.transpose();
  CHECK((back - position_matrix(3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Galerkin site Hamiltonian of the unit oscillator is exact") {
  const Eigen::MatrixXd h = site_hamiltonian(7, 1.0);
  for (int j = 0; j < 7; ++j) CHECK(h(j, j) == doctest::Approx(j + 0.5).epsilon(1e-14));
  CHECK((h - Eigen::MatrixXd(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);
  // a = 5: diagonal (1 + a)(j + 1/2)/2, off-diagonal (a - 1) sqrt(j(j-1))/4 two levels apart.
  const Eigen::MatrixXd h5 = site_hamiltonian(6, 5.0);
  CHECK(h5(3, 3) == doctest::Approx(3.0 * 3.5).epsilon(1e-14));
  CHECK(h5(1, 3) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-14));
  CHECK(h5(0, 1) == 0.0);
}

TEST_CASE("levels of an oscillator of frequency omega") {
  const double w = std::sqrt(5.0);
  const SiteOps ops = build_site_ops(6, w);
  const Eigen::MatrixXcd c = ops.Q * ops.P - ops.P * ops.Q;
  CHECK(max_abs(c.topLeftCorner(5, 5) - cplx(0.0, 1.0) * Eigen::MatrixXcd::Identity(5, 5)) < 1e-14);
  // Matched frequency: the Galerkin site Hamiltonian is diag(omega (j + 1/2)).
  const Eigen::MatrixXd h = site_hamiltonian(7, 5.0, w);
  for (int j = 0; j < 7; ++j) CHECK(h(j, j) == doctest::Approx(w * (j + 0.5)).epsilon(1e-14));
  CHECK((h - Eigen::MatrixXd(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(position_basis(2, 4.0).x(1) == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-14));
  // <0|exp(i(uQ + vP))|0> = exp(-(u^2/omega + v^2 omega)/4)
  const Eigen::MatrixXcd wl = weyl_local(40, 0.8, -0.3, 2.0);
  CHECK(std::abs(wl(0, 0) - cplx(std::exp(-(0.64 / 2.0 + 0.09 * 2.0) / 4.0))) < 1e-12);

  const TruncatedRep rep({0, 1}, 3, kDenseBudget, 2.0);
  CHECK_FALSE(rep == TruncatedRep({0, 1}, 3));
  CHECK(compress_operator(identity_op(rep), {1}).rep.omega == 2.0);
  CHECK_THROWS_AS(embed_operator(identity_op(TruncatedRep({0}, 3)), rep), InvalidArgument);
  CHECK_THROWS_AS(TruncatedRep({0}, 3, kDenseBudget, 0.0), InvalidArgument);
}

TEST_CASE("local embedding matches the Kronecker product") {
  const TruncatedRep rep({-1, 0, 1}, 3);
  const Eigen::MatrixXcd m = random_matrix(3, 3);
  const ObservableOp op = local_operator(rep, {0}, m);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
  Eigen::MatrixXcd kron(27, 27);
  for (int i = 0; i < 27; ++i)
    for (int j = 0; j < 27; ++j) {
      const int a0 = i / 9, a1 = (i / 3) % 3, a2 = i % 3;
      const int b0 = j / 9, b1 = (j / 3) % 3, b2 = j % 3;
      kron(i, j) = id(a0, b0) * m(a1, b1) * id(a2, b2);
    }
  CHECK(max_abs(op.matrix - kron) < 1e-15);
  CHECK(op.support == std::vector<int>{0});
  CHECK_THROWS_AS(local_operator(rep, {1, 0}, random_matrix(9, 1)), InvalidArgument);
  CHECK_THROWS_AS(local_operator(rep, {5}, m), InvalidArgument);

  const Eigen::VectorXcd f = Eigen::VectorXcd::Random(27);
  CHECK((apply_site(m, rep.position(0), rep, f) - op.matrix * f).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("compression inverts embedding and takes vacuum matrix elements") {
  const TruncatedRep small({0, 1}, 3);
  const TruncatedRep big({-1, 0, 1}, 3);
  const ObservableOp t(small, random_matrix(9, 5), {0, 1});
  const ObservableOp up = embed_operator(t, big);
  const ObservableOp back = compress_operator(up, {0, 1});
  CHECK(back.rep == small);
  CHECK(max_abs(back.matrix - t.matrix) < 1e-15);

  // (X on -1) (Y on 0): compressing away -1 leaves <0|X|0> Y.
  const Eigen::MatrixXcd x = random_matrix(3, 7), y = random_matrix(3, 8);
  const ObservableOp prod(big, local_operator(big, {-1}, x).matrix * local_operator(big, {0}, y).matrix, {-1, 0});
  const ObservableOp c = compress_operator(prod, {0, 1});
  CHECK(max_abs(c.matrix - x(0, 0) * local_operator(small, {0}, y).matrix) < 1e-14);
  CHECK(c.support == std::vector<int>{0});
}

TEST_CASE("perturbation terms count unordered pairs") {
  ModelSpec s;
  s.n_sites = 2;
  s.perturbation = PerturbationSpec{0.2, 0.3, 1.0, 1.0, std::nullopt};
  const auto terms = perturbation_terms(s, {-2, -1, 0, 1, 2});
  CHECK(terms.size() == 15);
  double far = 0.0;
  for (const auto& t : terms)
    if (t.kind == PotentialTerm::Kind::PairBump && t.sites == std::vector<int>{-2, 2}) far = t.amplitude;
  CHECK(far == doctest::Approx(0.3 * std::exp(-4.0)).epsilon(1e-14));
  s.perturbation->range_cut = 1;
  CHECK(perturbation_terms(s, {-2, -1, 0, 1, 2}).size() == 9);
  s.perturbation.reset();
  CHECK(perturbation_terms(s, {0, 1}).empty());
}

TEST_CASE("Gaussian potential in the position functional calculus") {
  const int d = 40;
  const TruncatedRep rep({0}, d);
  const PotentialTerm term{PotentialTerm::Kind::SelfBump, {0}, 0.7, 1.3};
  const ObservableOp v = potential_operator(rep, term);
  const Eigen::MatrixXcd q = build_site_ops(d).Q;
  CHECK(max_abs(v.matrix * q - q * v.matrix) < 1e-12);
  // Vacuum density exp(-x^2)/sqrt(pi): <exp(-x^2/(2w^2))> = 1/sqrt(1 + 1/(2w^2)).
  const double expected = 0.7 / std::sqrt(1.0 + 1.0 / (2.0 * 1.3 * 1.3));
  CHECK(v.matrix(0, 0).real() == doctest::Approx(expected).epsilon(1e-10));

  const TruncatedRep two({0, 1}, 4);
  const PotentialTerm pair{PotentialTerm::Kind::PairBump, {0, 1}, 0.5, 1.0};
  const ObservableOp vp = potential_operator(two, pair);
  CHECK(max_abs(vp.matrix - vp.matrix.adjoint()) < 1e-14);
  CHECK_THROWS_AS(potential_operator(two, PotentialTerm{PotentialTerm::Kind::PairBump, {0, 1}, 0.5, 0.0}),
                  InvalidArgument);
}

TEST_CASE("Weyl operators are unitary with Gaussian vacuum expectation") {
  const int d = 40;
  const Eigen::MatrixXcd w = weyl_local(d, 0.8, -0.3);
  CHECK(max_abs(w * w.adjoint() - Eigen::MatrixXcd::Identity(d, d)) < 1e-12);
  // <0|exp(i(uQ + vP))|0> = exp(-(u^2 + v^2)/4)
  CHECK(std::abs(w(0, 0) - cplx(std::exp(-(0.64 + 0.09) / 4.0))) < 1e-12);

  const TruncatedRep rep({0, 1}, 3);
  const ObservableOp id = weyl_operator(rep, {});
  CHECK(max_abs(id.matrix - Eigen::MatrixXcd::Identity(9, 9)) < 1e-15);
  const ObservableOp two = weyl_operator(rep, {{1, 0.2, 0.0}, {0, 0.1, 0.3}});
  CHECK(two.support == std::vector<int>{0, 1});
  CHECK_THROWS_AS(weyl_operator(rep, {{0, 1.0, 0.0}, {0, 1.0, 0.0}}), InvalidArgument);
  CHECK_THROWS_AS(weyl_operator(rep, {{4, 1.0, 0.0}}), InvalidArgument);
}

TEST_CASE("bulk blocks and restricted norms") {
  const TruncatedRep rep({0, 1, 2}, 4);
  CHECK(BulkBlock::per_site(rep, 2).indices.size() == 8);
  CHECK(BulkBlock::total_quanta(rep, 2).indices.size() == 10);
  CHECK(BulkBlock::total_quanta(rep, 0).indices == std::vector<long>{0});
  CHECK_THROWS_AS(BulkBlock::per_site(rep, 5), InvalidArgument);

  const Eigen::MatrixXcd c = random_matrix(64, 11);
  const BulkBlock b = BulkBlock::total_quanta(rep, 1);
  Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(64, 64);
  for (long i : b.indices) proj(i, i) = 1.0;
  CHECK(restricted_norm(c, &b) == doctest::Approx(operator_norm(c * proj)).epsilon(1e-12));
  CHECK(restricted_norm(c) == doctest::Approx(operator_norm(c)).epsilon(1e-12));
  BulkBlock empty;
  CHECK(restricted_norm(c, &empty) == 0.0);
}

TEST_CASE("W_k norms") {
  const TruncatedRep rep({0, 1}, 4);
  const NormBundle id = wk_norm(identity_op(rep), 2);
  CHECK(id.op_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id.w1_extra < 1e-14);
  CHECK(id.w2_extra < 1e-14);

  // [e^{iuQ}, P] = -u e^{iuQ} on the bulk, so the P commutator contributes |u|.
  const TruncatedRep big({0}, 30);
  const ObservableOp w = weyl_operator(big, {{0, 0.5, 0.0}});
  const BulkBlock low = BulkBlock::per_site(big, 8);
  const NormBundle nb = wk_norm(w, 2, &low);
  CHECK(nb.op_norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(nb.w1_extra == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(nb.w2_extra == doctest::Approx(0.125).epsilon(1e-6));
  CHECK_THROWS_AS(wk_norm(w, 3), InvalidArgument);
}

TEST_CASE("H_k seminorm of the vacuum") {
  const TruncatedRep rep({0, 1, 2}, 4);
  const Eigen::VectorXcd vac = vacuum_state(rep);
  CHECK(hk_seminorm(vac, 1, rep) == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(hk_seminorm(vac, 2, rep) == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0) + std::sqrt(3.0) / 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(hk_seminorm(vac, 3, rep), InvalidArgument);
  CHECK_THROWS_AS(hk_seminorm(Eigen::VectorXcd::Zero(3), 1, rep), InvalidArgument);
}
