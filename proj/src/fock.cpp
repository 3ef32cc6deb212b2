#include "lrcone/fock.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

#include "lrcone/errors.hpp"

namespace lrcone {

TruncatedRep::TruncatedRep(std::vector<int> site_labels, int levels, long budget, double freq)
    : sites(std::move(site_labels)), d(levels), omega(freq) {
  if (d < 2) throw InvalidArgument("TruncatedRep: d must be >= 2");
  if (!(omega > 0.0)) throw InvalidArgument("TruncatedRep: omega must be > 0");
  std::sort(sites.begin(), sites.end());
  if (std::adjacent_find(sites.begin(), sites.end()) != sites.end())
    throw InvalidArgument("TruncatedRep: duplicate site label");
  double dim = 1.0;
  for (std::size_t i = 0; i < sites.size(); ++i) dim *= d;
  if (dim > static_cast<double>(budget))
    throw BudgetExceeded("TruncatedRep: dimension " + std::to_string(static_cast<long long>(dim)) +
                         " exceeds budget " + std::to_string(budget));
}

long TruncatedRep::total_dim() const {
  long n = 1;
  for (std::size_t i = 0; i < sites.size(); ++i) n *= d;
  return n;
}

bool TruncatedRep::contains(int label) const {
  return std::binary_search(sites.begin(), sites.end(), label);
}

int TruncatedRep::position(int label) const {
  auto it = std::lower_bound(sites.begin(), sites.end(), label);
  if (it == sites.end() || *it != label)
    throw InvalidArgument("site " + std::to_string(label) + " not in representation");
  return static_cast<int>(it - sites.begin());
}

long TruncatedRep::stride(int pos) const {
  long s = 1;
  for (int p = size() - 1; p > pos; --p) s *= d;
  return s;
}

int TruncatedRep::digit(long index, int pos) const { return static_cast<int>((index / stride(pos)) % d); }

SiteOps build_site_ops(int d, double omega) {
  if (d < 2) throw InvalidArgument("build_site_ops: d must be >= 2");
  if (!(omega > 0.0)) throw InvalidArgument("build_site_ops: omega must be > 0");
  SiteOps ops;
  ops.lower = Eigen::MatrixXcd::Zero(d, d);
  for (int j = 1; j < d; ++j) ops.lower(j - 1, j) = std::sqrt(static_cast<double>(j));
  ops.raise = ops.lower.transpose();
  const double r2 = std::sqrt(2.0), rw = std::sqrt(omega);
  ops.Q = (ops.lower + ops.raise) / (r2 * rw);
  ops.P = rw * (ops.lower - ops.raise) / cplx(0.0, r2);
  return ops;
}

Eigen::MatrixXd position_matrix(int d, double omega) { return build_site_ops(d, omega).Q.real(); }

PositionBasis position_basis(int d, double omega) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(position_matrix(d, omega));
  if (eig.info() != Eigen::Success) throw CertificationFailure("position_basis: eigensolve failed");
  return PositionBasis{eig.eigenvalues(), eig.eigenvectors()};
}

Eigen::MatrixXd site_hamiltonian(int d, double a, double omega) {
  const SiteOps big = build_site_ops(d + 1, omega);
  const Eigen::MatrixXd p2 = (big.P * big.P).real();
  const Eigen::MatrixXd q2 = (big.Q * big.Q).real();
  return (0.5 * p2 + 0.5 * a * q2).topLeftCorner(d, d);
}

ObservableOp::ObservableOp(TruncatedRep r, Eigen::MatrixXcd m, std::vector<int> s)
    : rep(std::move(r)), matrix(std::move(m)), support(std::move(s)) {
  if (matrix.rows() != rep.total_dim() || matrix.cols() != rep.total_dim())
    throw InvalidArgument("ObservableOp: matrix size does not match representation");
  std::sort(support.begin(), support.end());
}

ObservableOp identity_op(const TruncatedRep& rep) {
  return ObservableOp(rep, Eigen::MatrixXcd::Identity(rep.total_dim(), rep.total_dim()), {});
}

namespace {

// groups[r][e]: index in `rep` of the state with level pattern e on `keep`
// and pattern r on the remaining sites.
std::vector<std::vector<long>> split_indices(const TruncatedRep& rep, const std::vector<int>& keep) {
  std::vector<int> kpos, rpos;
  for (int p = 0; p < rep.size(); ++p) {
    if (std::binary_search(keep.begin(), keep.end(), rep.sites[p])) {
      kpos.push_back(p);
    } else {
      rpos.push_back(p);
    }
  }
  long ke = 1, re = 1;
  for (std::size_t i = 0; i < kpos.size(); ++i) ke *= rep.d;
  for (std::size_t i = 0; i < rpos.size(); ++i) re *= rep.d;
  std::vector<std::vector<long>> groups(re, std::vector<long>(ke));
  const long dim = rep.total_dim();
  for (long i = 0; i < dim; ++i) {
    long e = 0, r = 0;
    for (int p : kpos) e = e * rep.d + rep.digit(i, p);
    for (int p : rpos) r = r * rep.d + rep.digit(i, p);
    groups[r][e] = i;
  }
  return groups;
}

void require_subset(const std::vector<int>& sub, const TruncatedRep& rep, const char* what) {
  for (int s : sub)
    if (!rep.contains(s)) throw InvalidArgument(std::string(what) + ": site " + std::to_string(s) + " not in representation");
}

}  // namespace

ObservableOp local_operator(const TruncatedRep& rep, const std::vector<int>& sites,
                            const Eigen::MatrixXcd& local) {
  std::vector<int> s = sites;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw InvalidArgument("local_operator: duplicate site");
  if (s != sites) throw InvalidArgument("local_operator: sites must be ascending");
  require_subset(s, rep, "local_operator");
  long ke = 1;
  for (std::size_t i = 0; i < s.size(); ++i) ke *= rep.d;
  if (local.rows() != ke || local.cols() != ke)
    throw InvalidArgument("local_operator: local matrix has wrong size");
  const auto groups = split_indices(rep, s);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rep.total_dim(), rep.total_dim());
  for (const auto& g : groups)
    for (long e2 = 0; e2 < ke; ++e2)
      for (long e1 = 0; e1 < ke; ++e1) m(g[e1], g[e2]) = local(e1, e2);
  return ObservableOp(rep, std::move(m), s);
}

ObservableOp embed_operator(const ObservableOp& t, const TruncatedRep& target) {
  if (t.rep.d != target.d || t.rep.omega != target.omega)
    throw InvalidArgument("embed_operator: representation mismatch");
  require_subset(t.rep.sites, target, "embed_operator");
  ObservableOp out = local_operator(target, t.rep.sites, t.matrix);
  out.support = t.support;
  return out;
}

ObservableOp compress_operator(const ObservableOp& t, const std::vector<int>& keep) {
  std::vector<int> k = keep;
  std::sort(k.begin(), k.end());
  require_subset(k, t.rep, "compress_operator");
  TruncatedRep small(k, t.rep.d, t.rep.total_dim(), t.rep.omega);
  const auto groups = split_indices(t.rep, k);
  const auto& vac = groups[0];
  const long ke = small.total_dim();
  Eigen::MatrixXcd m(ke, ke);
  for (long e2 = 0; e2 < ke; ++e2)
    for (long e1 = 0; e1 < ke; ++e1) m(e1, e2) = t.matrix(vac[e1], vac[e2]);
  std::vector<int> sup;
  for (int s : t.support)
    if (std::binary_search(k.begin(), k.end(), s)) sup.push_back(s);
  return ObservableOp(std::move(small), std::move(m), std::move(sup));
}

std::vector<PotentialTerm> perturbation_terms(const ModelSpec& spec, const std::vector<int>& sites) {
  std::vector<PotentialTerm> terms;
  if (!spec.perturbation) return terms;
  const auto& p = *spec.perturbation;
  std::vector<int> s = sites;
  std::sort(s.begin(), s.end());
  if (p.eps_self != 0.0)
    for (int l : s) terms.push_back({PotentialTerm::Kind::SelfBump, {l}, p.eps_self, p.width});
  if (p.eps_pair != 0.0) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        const int dist = std::abs(s[j] - s[i]);
        if (p.range_cut && dist > *p.range_cut) continue;
        terms.push_back({PotentialTerm::Kind::PairBump, {s[i], s[j]},
                         p.eps_pair * std::exp(-p.gamma0 * dist), p.width});
      }
    }
  }
  return terms;
}

Eigen::VectorXd potential_diagonal(const PotentialTerm& term, const PositionBasis& basis) {
  const Eigen::Index d = basis.x.size();
  const double inv = 1.0 / (2.0 * term.width * term.width);
  if (term.kind == PotentialTerm::Kind::SelfBump) {
    if (term.sites.size() != 1) throw InvalidArgument("potential: one-site bump needs one site");
    return (term.amplitude * (-inv * basis.x.array().square()).exp()).matrix();
  }
  if (term.sites.size() != 2) throw InvalidArgument("potential: pair bump needs two sites");
  Eigen::VectorXd out(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double s = basis.x(i) - basis.x(j);
      out(i * d + j) = term.amplitude * std::exp(-inv * s * s);
    }
  return out;
}

ObservableOp potential_operator(const TruncatedRep& rep, const PotentialTerm& term) {
  if (!(term.width > 0.0)) throw InvalidArgument("potential_operator: width must be > 0");
  const PositionBasis basis = position_basis(rep.d, rep.omega);
  const Eigen::VectorXd diag = potential_diagonal(term, basis);
  Eigen::MatrixXd u = basis.U;
  if (term.kind == PotentialTerm::Kind::PairBump) u = Eigen::kroneckerProduct(basis.U, basis.U).eval();
  const Eigen::MatrixXd local = u * diag.asDiagonal() * u.transpose();
  return local_operator(rep, term.sites, local.cast<cplx>());
}

Eigen::MatrixXcd weyl_local(int d, double u, double v, double omega) {
  const SiteOps ops = build_site_ops(d, omega);
  return expi_hermitian(u * ops.Q + v * ops.P, 1.0);
}

ObservableOp weyl_operator(const TruncatedRep& rep, const std::vector<SitePhase>& phase) {
  std::vector<SitePhase> ph = phase;
  std::sort(ph.begin(), ph.end(), [](const SitePhase& x, const SitePhase& y) { return x.site < y.site; });
  std::vector<int> sites;
  Eigen::MatrixXcd local = Eigen::MatrixXcd::Identity(1, 1);
  for (const auto& p : ph) {
    if (!sites.empty() && sites.back() == p.site) throw InvalidArgument("weyl_operator: repeated site");
    if (!rep.contains(p.site)) throw InvalidArgument("weyl_operator: support outside representation");
    sites.push_back(p.site);
    local = Eigen::kroneckerProduct(local, weyl_local(rep.d, p.u, p.v, rep.omega)).eval();
  }
  if (sites.empty()) return identity_op(rep);
  return local_operator(rep, sites, local);
}

BulkBlock BulkBlock::per_site(const TruncatedRep& rep, int levels) {
  if (levels < 1 || levels > rep.d) throw InvalidArgument("BulkBlock::per_site: levels out of range");
  BulkBlock b;
  const long dim = rep.total_dim();
  for (long i = 0; i < dim; ++i) {
    bool ok = true;
    for (int p = 0; p < rep.size() && ok; ++p) ok = rep.digit(i, p) < levels;
    if (ok) b.indices.push_back(i);
  }
  return b;
}

BulkBlock BulkBlock::total_quanta(const TruncatedRep& rep, int max_quanta) {
  if (max_quanta < 0) throw InvalidArgument("BulkBlock::total_quanta: max_quanta must be >= 0");
  BulkBlock b;
  const long dim = rep.total_dim();
  for (long i = 0; i < dim; ++i) {
    int n = 0;
    for (int p = 0; p < rep.size(); ++p) n += rep.digit(i, p);
    if (n <= max_quanta) b.indices.push_back(i);
  }
  return b;
}

double restricted_norm(const Eigen::MatrixXcd& c, const BulkBlock* block) {
  if (!block) return operator_norm(c);
  if (block->indices.empty()) return 0.0;
  // ||C P_b||^2 is the top eigenvalue of the Gram matrix of the block columns.
  Eigen::MatrixXcd cols(c.rows(), static_cast<Eigen::Index>(block->indices.size()));
  for (std::size_t k = 0; k < block->indices.size(); ++k) cols.col(k) = c.col(block->indices[k]);
  const Eigen::MatrixXcd gram = cols.adjoint() * cols;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

ObservableOp site_field(const TruncatedRep& rep, int label, int j) {
  const SiteOps ops = build_site_ops(rep.d, rep.omega);
  return local_operator(rep, {label}, j == 0 ? ops.Q : ops.P);
}

NormBundle wk_norm(const ObservableOp& a, int k, const BulkBlock* block) {
  if (k < 0 || k > 2) throw InvalidArgument("wk_norm: k must be 0, 1 or 2");
  NormBundle nb;
  nb.op_norm = restricted_norm(a.matrix, block);
  if (k == 0) return nb;
  std::set<int> sites;
  for (int s : a.support)
    for (int h = -1; h <= 1; ++h)
      if (a.rep.contains(s + h)) sites.insert(s + h);
  std::vector<Eigen::MatrixXcd> fields;
  for (int s : sites)
    for (int j = 0; j < 2; ++j) fields.push_back(site_field(a.rep, s, j).matrix);
  std::vector<Eigen::MatrixXcd> first;
  for (const auto& x : fields) {
    first.push_back(a.matrix * x - x * a.matrix);
    nb.w1_extra += restricted_norm(first.back(), block);
  }
  if (k == 2) {
    double s = 0.0;
    for (const auto& c : first)
      for (const auto& y : fields) s += restricted_norm(c * y - y * c, block);
    nb.w2_extra = 0.5 * s;
  }
  return nb;
}

Eigen::VectorXcd vacuum_state(const TruncatedRep& rep) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(rep.total_dim());
  v(0) = 1.0;
  return v;
}

Eigen::VectorXcd apply_site(const Eigen::MatrixXcd& local, int pos, const TruncatedRep& rep,
                            const Eigen::VectorXcd& f) {
  if (f.size() != rep.total_dim()) throw InvalidArgument("apply_site: state dimension mismatch");
  if (pos < 0 || pos >= rep.size()) throw InvalidArgument("apply_site: position out of range");
  const long s = rep.stride(pos);
  const long block = s * rep.d;
  const long outer = rep.total_dim() / block;
  Eigen::VectorXcd out(f.size());
  for (long l = 0; l < outer; ++l) {
    // Column-major s x d view: entry (r, k) is level k of the site.
    Eigen::Map<const Eigen::MatrixXcd> in(f.data() + l * block, s, rep.d);
    Eigen::Map<Eigen::MatrixXcd> res(out.data() + l * block, s, rep.d);
    res.noalias() = in * local.transpose();
  }
  return out;
}

double hk_seminorm(const Eigen::VectorXcd& f, int k, const TruncatedRep& rep) {
  if (k < 1 || k > 2) throw InvalidArgument("hk_seminorm: k must be 1 or 2");
  if (f.size() != rep.total_dim()) throw InvalidArgument("hk_seminorm: state dimension mismatch");
  const SiteOps ops = build_site_ops(rep.d, rep.omega);
  const Eigen::MatrixXcd* field[2] = {&ops.Q, &ops.P};
  double sup1 = 0.0, sup2 = 0.0;
  for (int p = 0; p < rep.size(); ++p) {
    for (int j = 0; j < 2; ++j) {
      const Eigen::VectorXcd g = apply_site(*field[j], p, rep, f);
      sup1 = std::max(sup1, g.norm());
      if (k < 2) continue;
      for (int q = 0; q < rep.size(); ++q)
        for (int i = 0; i < 2; ++i) sup2 = std::max(sup2, apply_site(*field[i], q, rep, g).norm());
    }
  }
  return f.norm() + sup1 + (k == 2 ? sup2 : 0.0);
}

}  // namespace lrcone
