#include "lrcone/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

#include "lrcone/errors.hpp"

namespace lrcone {

HamiltonianTerms hamiltonian_terms(const ModelSpec& spec, const std::vector<int>& sites) {
  HamiltonianTerms h;
  h.sites = sites;
  std::sort(h.sites.begin(), h.sites.end());
  for (int s : h.sites)
    if (s < -spec.n_sites || s > spec.n_sites) throw InvalidArgument("hamiltonian_terms: site outside the chain");
  h.a = spec.a;
  auto has = [&](int l) { return std::binary_search(h.sites.begin(), h.sites.end(), l); };
  if (spec.b != 0.0) {
    for (int l : h.sites)
      if (has(l + 1)) h.bonds.push_back({l, l + 1, -spec.b});
    const int n = spec.n_sites;
    if (spec.boundary == Boundary::Cyclic && spec.site_count() >= 3 && has(-n) && has(n))
      h.bonds.push_back({-n, n, -spec.b});
  }
  h.potentials = perturbation_terms(spec, h.sites);
  return h;
}

Eigen::MatrixXd dense_hamiltonian(const HamiltonianTerms& terms, const TruncatedRep& rep) {
  const long dim = rep.total_dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const Eigen::MatrixXcd h1 = site_hamiltonian(rep.d, terms.a, rep.omega).cast<cplx>();
  for (int s : terms.sites) h += local_operator(rep, {s}, h1).matrix;
  const Eigen::MatrixXcd q = build_site_ops(rep.d, rep.omega).Q;
  const Eigen::MatrixXcd qq = Eigen::kroneckerProduct(q, q).eval();
  for (const auto& b : terms.bonds) h += b.coeff * local_operator(rep, {std::min(b.l, b.m), std::max(b.l, b.m)}, qq).matrix;
  for (const auto& p : terms.potentials) h += potential_operator(rep, p).matrix;
  const Eigen::MatrixXd re = h.real();
  return 0.5 * (re + re.transpose());
}

HamiltonianBundle bundle_from_terms(const ModelSpec& model, const HamiltonianTerms& terms,
                                    const TruncatedRep& rep) {
  if (rep.total_dim() > kDenseBudget)
    throw BudgetExceeded("assemble_hamiltonian: dense dimension " + std::to_string(rep.total_dim()) +
                         " exceeds " + std::to_string(kDenseBudget));
  for (int s : terms.sites)
    if (!rep.contains(s)) throw InvalidArgument("assemble_hamiltonian: representation misses a site");
  HamiltonianBundle b;
  b.rep = rep;
  b.model = model;
  b.H = dense_hamiltonian(terms, rep);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b.H);
  if (eig.info() != Eigen::Success) throw CertificationFailure("assemble_hamiltonian: eigensolve failed");
  b.eigenvalues = eig.eigenvalues();
  b.eigenvectors = eig.eigenvectors();
  return b;
}

HamiltonianBundle assemble_hamiltonian(const ModelSpec& model, const TruncatedRep& rep) {
  return bundle_from_terms(model, hamiltonian_terms(model, rep.sites), rep);
}

namespace {

Eigen::MatrixXcd propagator_matrix(const HamiltonianBundle& b, double t) {
  const Eigen::VectorXcd ph = (t * b.eigenvalues.array()).unaryExpr([](double x) { return std::polar(1.0, -x); });
  const Eigen::MatrixXcd u = b.eigenvectors.cast<cplx>();
  return u * ph.asDiagonal() * u.adjoint();
}

void require_same_rep(const ObservableOp& x, const ObservableOp& y, const char* what) {
  if (!(x.rep == y.rep)) throw InvalidArgument(std::string(what) + ": representation mismatch");
}

}  // namespace

ObservableOp heisenberg_evolve(const HamiltonianBundle& bundle, const ObservableOp& a, double t) {
  if (!(a.rep == bundle.rep)) throw InvalidArgument("heisenberg_evolve: representation mismatch");
  if (t == 0.0) return a;
  const Eigen::MatrixXcd u = propagator_matrix(bundle, t);
  Eigen::MatrixXcd m = u.adjoint() * a.matrix * u;
  return ObservableOp(a.rep, std::move(m), a.rep.sites);
}

double commutator_norm(const ObservableOp& x, const ObservableOp& y, const BulkBlock* block) {
  require_same_rep(x, y, "commutator_norm");
  return restricted_norm(x.matrix * y.matrix - y.matrix * x.matrix, block);
}

std::vector<GrowthPoint> wk_growth_curve(const HamiltonianBundle& bundle, const ObservableOp& a,
                                         const std::vector<double>& t_grid, int k, const BulkBlock* block) {
  std::vector<GrowthPoint> out;
  for (double t : t_grid) {
    const ObservableOp at = heisenberg_evolve(bundle, a, t);
    GrowthPoint g;
    g.t = t;
    g.norms = wk_norm(at, k, block);
    for (int s : bundle.rep.sites) {
      double v = 0.0;
      for (int j = 0; j < 2; ++j) v += commutator_norm(at, site_field(bundle.rep, s, j), block);
      g.site_profile.push_back(v);
    }
    out.push_back(std::move(g));
  }
  return out;
}

ObservableOp shift_observable(const ObservableOp& a, int h) {
  if (h == 0 || a.support.empty()) return a;
  std::vector<int> shifted;
  for (int s : a.support) {
    if (!a.rep.contains(s + h)) throw InvalidArgument("shift_observable: shifted support leaves the representation");
    shifted.push_back(s + h);
  }
  const ObservableOp core = compress_operator(a, a.support);
  ObservableOp out = local_operator(a.rep, shifted, core.matrix);
  return out;
}

ObservableOp InteractionSplit::h_theta(double theta) const {
  return ObservableOp(H_full.rep, H_full.matrix - (1.0 - theta) * V_inter.matrix, H_full.support);
}

InteractionSplit interaction_split(const ModelSpec& model, int m, int n, const TruncatedRep& rep) {
  if (m < 0 || m >= n) throw InvalidArgument("interaction_split: need 0 <= m < n");
  if (n > model.n_sites) throw InvalidArgument("interaction_split: n exceeds the chain");
  std::vector<int> sites;
  for (int l = -n; l <= n; ++l) sites.push_back(l);
  if (rep.sites != sites) throw InvalidArgument("interaction_split: representation must be Lambda_n");
  const HamiltonianTerms all = hamiltonian_terms(model, sites);
  auto inner = [m](int l) { return std::abs(l) <= m; };
  HamiltonianTerms cross;
  cross.sites = {};
  cross.a = 0.0;
  for (const auto& b : all.bonds)
    if (inner(b.l) != inner(b.m)) cross.bonds.push_back(b);
  for (const auto& p : all.potentials)
    if (p.sites.size() == 2 && inner(p.sites[0]) != inner(p.sites[1])) cross.potentials.push_back(p);

  InteractionSplit s;
  s.m = m;
  s.n = n;
  s.H_full = ObservableOp(rep, dense_hamiltonian(all, rep).cast<cplx>(), sites);
  s.V_inter = ObservableOp(rep, dense_hamiltonian(cross, rep).cast<cplx>(), sites);
  return s;
}

LocalObservable weyl_local_observable(int d, const std::vector<SitePhase>& phase, double omega) {
  std::vector<SitePhase> ph = phase;
  std::sort(ph.begin(), ph.end(), [](const SitePhase& x, const SitePhase& y) { return x.site < y.site; });
  LocalObservable op;
  op.local = Eigen::MatrixXcd::Identity(1, 1);
  for (const auto& p : ph) {
    if (!op.sites.empty() && op.sites.back() == p.site)
      throw InvalidArgument("weyl_local_observable: repeated site");
    op.sites.push_back(p.site);
    op.local = Eigen::kroneckerProduct(op.local, weyl_local(d, p.u, p.v, omega)).eval();
  }
  return op;
}

Eigen::VectorXcd Propagator::apply_prepared(const LocalObservable& op, const Eigen::VectorXcd& v) const {
  const TruncatedRep& r = rep();
  Eigen::VectorXcd out;
  if (op.sites.empty()) return op.local(0, 0) * v;
  if (op.sites.size() == 1) {
    apply_site_matrix(op.local, r.position(op.sites[0]), r.size(), r.d, v, out);
    return out;
  }
  std::vector<int> ps;
  for (int s : op.sites) ps.push_back(r.position(s));
  apply_local_matrix(op.local, ps, r.size(), r.d, v, out);
  return out;
}

DensePropagator::DensePropagator(HamiltonianBundle bundle) : bundle_(std::move(bundle)) {}

Eigen::VectorXcd DensePropagator::evolve(const Eigen::VectorXcd& v, double t) const {
  const Eigen::VectorXcd ph =
      (t * bundle_.eigenvalues.array()).unaryExpr([](double x) { return std::polar(1.0, -x); });
  const Eigen::MatrixXcd u = bundle_.eigenvectors.cast<cplx>();
  const Eigen::VectorXcd c = u.adjoint() * v;
  return u * (ph.array() * c.array()).matrix();
}

Eigen::VectorXcd DensePropagator::basis_state(long index) const {
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(bundle_.rep.total_dim());
  e(index) = 1.0;
  return e;
}

KrylovPropagator::KrylovPropagator(const HamiltonianTerms& terms, int d, KrylovOptions opt, long budget,
                                   double omega)
    : rep_(terms.sites, d, budget, omega), basis_(position_basis(d, omega)), opt_(opt) {
  h_ = std::make_unique<ProductHamiltonian>(rep_.size(), d);
  const Eigen::MatrixXd& u = basis_.U;
  const Eigen::MatrixXd k = u.transpose() * site_hamiltonian(d, terms.a, omega) * u;
  for (int p = 0; p < rep_.size(); ++p) h_->add_site_term(p, k);
  Eigen::VectorXd xx(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) xx(i * d + j) = basis_.x(i) * basis_.x(j);
  for (const auto& b : terms.bonds) {
    const int p = rep_.position(std::min(b.l, b.m)), q = rep_.position(std::max(b.l, b.m));
    h_->add_local_diagonal({p, q}, xx, b.coeff);
  }
  for (const auto& pot : terms.potentials) {
    std::vector<int> ps;
    for (int s : pot.sites) ps.push_back(rep_.position(s));
    h_->add_local_diagonal(ps, potential_diagonal(pot, basis_));
  }
}

Eigen::VectorXcd KrylovPropagator::evolve(const Eigen::VectorXcd& v, double t) const {
  return expmv_hermitian(h_->as_operator(), v, t, opt_, &stats_, &work_);
}

LocalObservable KrylovPropagator::prepare(const LocalObservable& op) const {
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(1, 1);
  for (std::size_t i = 0; i < op.sites.size(); ++i) u = Eigen::kroneckerProduct(u, basis_.U).eval();
  const Eigen::MatrixXcd uc = u.cast<cplx>();
  return LocalObservable{op.sites, uc.adjoint() * op.local * uc};
}

Eigen::VectorXcd KrylovPropagator::basis_state(long index) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  for (int p = 0; p < rep_.size(); ++p) {
    const Eigen::VectorXcd row = basis_.U.row(rep_.digit(index, p)).transpose().cast<cplx>();
    v = Eigen::kroneckerProduct(v, row).eval();
  }
  return v;
}

std::unique_ptr<Propagator> make_propagator(const ModelSpec& model, const std::vector<int>& sites, int d,
                                            long dense_limit, KrylovOptions opt, double omega) {
  const HamiltonianTerms terms = hamiltonian_terms(model, sites);
  const TruncatedRep probe(terms.sites, d, kStateBudget, omega);
  if (probe.total_dim() <= std::min(dense_limit, kDenseBudget))
    return std::make_unique<DensePropagator>(bundle_from_terms(model, terms, probe));
  return std::make_unique<KrylovPropagator>(terms, d, opt, kStateBudget, omega);
}

GapResult convergence_gap(const ModelSpec& model, const LocalObservable& a, int m, int n, double t, int d,
                          int block_quanta, KrylovOptions opt, double omega) {
  if (m < 0 || m > n) throw InvalidArgument("convergence_gap: need 0 <= m <= n");
  if (n > model.n_sites) throw InvalidArgument("convergence_gap: n exceeds the chain");
  GapResult r;
  r.m = m;
  r.n = n;
  r.t = t;
  r.distance = std::numeric_limits<int>::max();
  for (int s : a.sites) {
    if (std::abs(s) > m) throw InvalidArgument("convergence_gap: support of A outside Lambda_m");
    r.distance = std::min(r.distance, m + 1 - std::abs(s));
  }
  if (a.sites.empty()) r.distance = m + 1;
  if (m == n || t == 0.0) return r;

  std::vector<int> inner, outer;
  for (int l = -m; l <= m; ++l) inner.push_back(l);
  for (int l = -n; l <= n; ++l) outer.push_back(l);

  // alpha_m^t(A) as a dense operator on Lambda_m.
  const TruncatedRep rep_m(inner, d, kDenseBudget, omega);
  const HamiltonianBundle bm = assemble_hamiltonian(model, rep_m);
  const ObservableOp am = heisenberg_evolve(bm, local_operator(rep_m, a.sites, a.local), t);

  const auto prop = make_propagator(model, outer, d, 1024, opt, omega);
  const LocalObservable a_w = prop->prepare(a);
  const LocalObservable am_w = prop->prepare(LocalObservable{inner, am.matrix});
  const BulkBlock block = BulkBlock::total_quanta(TruncatedRep(outer, d, kStateBudget, omega), block_quanta);

  Eigen::MatrixXcd cols(prop->rep().total_dim(), static_cast<Eigen::Index>(block.indices.size()));
  for (std::size_t i = 0; i < block.indices.size(); ++i) {
    const Eigen::VectorXcd v = prop->basis_state(block.indices[i]);
    const Eigen::VectorXcd full = prop->evolve(prop->apply_prepared(a_w, prop->evolve(v, t)), -t);
    cols.col(static_cast<Eigen::Index>(i)) = prop->apply_prepared(am_w, v) - full;
  }
  const Eigen::MatrixXcd gram = cols.adjoint() * cols;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  r.gap = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
  return r;
}

}  // namespace lrcone
