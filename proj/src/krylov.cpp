#include "lrcone/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <unsupported/Eigen/KroneckerProduct>

#include "lrcone/errors.hpp"

namespace lrcone {

namespace {

struct KrylovStep {
  double tau = 0.0;
  double err = 0.0;
  Eigen::VectorXcd y;
};

// Exponential of the k x k tridiagonal Lanczos matrix applied to e1 for the
// largest tau <= tau_max meeting the error target; shrinks only when `shrink`.
KrylovStep krylov_step(const Eigen::VectorXd& alpha, const Eigen::VectorXd& offd, int k, bool breakdown,
                       double beta, double sign, double tau_max, double tol, double norm0, bool shrink) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  const Eigen::VectorXd sub = offd.head(std::max(0, k - 1));
  eig.computeFromTridiagonal(alpha.head(k), sub, Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw CertificationFailure("expmv_hermitian: tridiagonal eigensolve failed");
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const Eigen::MatrixXd& s = eig.eigenvectors();
  // |y_k| cannot resolve below rounding of the eigenvector sums.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * beta * offd(k - 1);
  KrylovStep out;
  out.tau = tau_max;
  for (int attempt = 0;; ++attempt) {
    Eigen::VectorXcd c(k);
    for (int i = 0; i < k; ++i) c(i) = s(0, i) * std::polar(1.0, -sign * out.tau * lam(i));
    out.y = s * c;
    out.err = breakdown ? 0.0 : beta * offd(k - 1) * std::abs(out.y(k - 1));
    const double allowed = std::max(tol * out.tau * norm0, floor);
    if (out.err <= allowed || !shrink) return out;
    const double factor = 0.9 * std::pow(allowed / out.err, 1.0 / k);
    out.tau *= std::clamp(factor, 0.1, 0.7);
    if (attempt > 200) throw CertificationFailure("expmv_hermitian: step size underflow");
  }
}

// x -= a v + b u in one pass; returns ||x||.
double orthogonalize(Eigen::VectorXcd& x, const Eigen::VectorXcd& v, double a, const Eigen::VectorXcd* u,
                     double b) {
  const Eigen::Index n = x.size();
  double* px = reinterpret_cast<double*>(x.data());
  const double* pv = reinterpret_cast<const double*>(v.data());
  const double* pu = u ? reinterpret_cast<const double*>(u->data()) : nullptr;
  double s = 0.0;
  if (pu) {
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
      const double r = px[i] - a * pv[i] - b * pu[i];
      px[i] = r;
      s += r * r;
    }
  } else {
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
      const double r = px[i] - a * pv[i];
      px[i] = r;
      s += r * r;
    }
  }
  return std::sqrt(s);
}

}  // namespace

Eigen::VectorXcd expmv_hermitian(const LinearOp& h, const Eigen::VectorXcd& v, double t,
                                 const KrylovOptions& opt, KrylovStats* stats, KrylovWorkspace* work) {
  if (opt.m < 2) throw InvalidArgument("expmv_hermitian: Krylov dimension must be >= 2");
  Eigen::VectorXcd w = v;
  const double norm0 = v.norm();
  if (t == 0.0 || norm0 == 0.0) return w;
  const double sign = t > 0.0 ? 1.0 : -1.0;
  const double total = std::abs(t);
  const Eigen::Index n = v.size();
  const int m = static_cast<int>(std::min<Eigen::Index>(opt.m, n));
  constexpr int kCheckEvery = 8;

  KrylovWorkspace local;
  std::vector<Eigen::VectorXcd>& basis = (work ? work : &local)->basis;
  for (auto& b : basis)
    if (b.size() != n) b.resize(n);
  basis.reserve(m + 1);
  double done = 0.0;
  int guard = 0;

  while (done < total) {
    if (++guard > 1000000) throw CertificationFailure("expmv_hermitian: no progress");
    const double beta = w.norm();
    if (beta == 0.0) break;
    const double remaining = total - done;
    if (basis.empty()) basis.emplace_back(n);
    basis[0] = w / beta;
    if (basis.size() < 2) basis.emplace_back(n);
    Eigen::VectorXd alpha(m), offd(m);
    int k = 0;
    bool breakdown = false;
    std::optional<KrylovStep> early;
    for (int j = 0; j < m; ++j) {
      // H v_j goes straight into the slot of v_{j+1}.
      if (static_cast<int>(basis.size()) < j + 2) basis.emplace_back(n);
      Eigen::VectorXcd& hv = basis[j + 1];
      h(basis[j], hv);
      if (stats) ++stats->matvecs;
      alpha(j) = basis[j].dot(hv).real();
      offd(j) = orthogonalize(hv, basis[j], alpha(j), j > 0 ? &basis[j - 1] : nullptr, j > 0 ? offd(j - 1) : 0.0);
      k = j + 1;
      if (offd(j) <= 1e-13 * std::max(1.0, std::abs(alpha(j)))) {
        breakdown = true;
        break;
      }
      // Stop building once the space already covers the rest of the interval.
      if (k < m && k % kCheckEvery == 0) {
        KrylovStep st = krylov_step(alpha, offd, k, false, beta, sign, remaining, opt.tol, norm0, false);
        if (st.err <= opt.tol * remaining * norm0) {
          early = std::move(st);
          break;
        }
      }
      hv /= offd(j);
    }

    const KrylovStep st = early ? *early
                                : krylov_step(alpha, offd, k, breakdown, beta, sign, remaining, opt.tol, norm0, true);
    w.setZero();
    for (int i = 0; i < k; ++i) w += (beta * st.y(i)) * basis[i];
    done += st.tau;
    if (stats) ++stats->substeps;
  }
  return w;
}

ProductHamiltonian::ProductHamiltonian(int n_sites, int d)
    : n_(n_sites),
      d_(d),
      dim_(1),
      site_(n_sites, Eigen::MatrixXd::Zero(d, d)),
      site_t_(n_sites, Eigen::MatrixXd::Zero(d, d)),
      site_k2_(n_sites, Eigen::MatrixXd::Zero(2 * d, 2 * d)),
      site_used_(n_sites, false),
      stride_(n_sites, 1) {
  if (n_sites < 1 || d < 2) throw InvalidArgument("ProductHamiltonian: need n >= 1 and d >= 2");
  for (int i = 0; i < n_; ++i) dim_ *= d_;
  for (int p = n_ - 2; p >= 0; --p) stride_[p] = stride_[p + 1] * d_;
  diag_ = Eigen::VectorXd::Zero(dim_);
}

void ProductHamiltonian::add_site_term(int p, const Eigen::MatrixXd& k) {
  if (p < 0 || p >= n_) throw InvalidArgument("add_site_term: position out of range");
  if (k.rows() != d_ || k.cols() != d_) throw InvalidArgument("add_site_term: wrong matrix size");
  site_[p] += k;
  site_t_[p] = site_[p].transpose();
  site_k2_[p] = Eigen::kroneckerProduct(site_[p], Eigen::Matrix2d::Identity()).eval();
  site_used_[p] = true;
}

void ProductHamiltonian::add_diagonal(const Eigen::VectorXd& diag) {
  if (diag.size() != dim_) throw InvalidArgument("add_diagonal: wrong size");
  diag_ += diag;
}

void ProductHamiltonian::add_local_diagonal(const std::vector<int>& ps, const Eigen::VectorXd& values,
                                            double coeff) {
  long ke = 1;
  for (std::size_t i = 0; i < ps.size(); ++i) ke *= d_;
  if (values.size() != ke) throw InvalidArgument("add_local_diagonal: wrong size");
  std::vector<long> strides(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i] < 0 || ps[i] >= n_) throw InvalidArgument("add_local_diagonal: position out of range");
    long s = 1;
    for (int q = n_ - 1; q > ps[i]; --q) s *= d_;
    strides[i] = s;
  }
  for (long idx = 0; idx < dim_; ++idx) {
    long e = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) e = e * d_ + (idx / strides[i]) % d_;
    diag_(idx) += coeff * values(e);
  }
}

namespace {

// Complex entries per segment handled entirely in cache.
constexpr long kCacheSegment = 1L << 15;

}  // namespace

void ProductHamiltonian::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  if (in.size() != dim_) throw InvalidArgument("ProductHamiltonian::apply: wrong vector size");
  out.resize(dim_);
  apply_segment(0, 0, reinterpret_cast<const double*>(in.data()), reinterpret_cast<double*>(out.data()));
}

// Sites p.. act inside segments of length d * stride_[p]. Large segments are
// split into sub-blocks first so that the inner sites run on cached data; site
// p then couples the sub-blocks.
void ProductHamiltonian::apply_segment(int p, long off, const double* src, double* dst) const {
  const long len = stride_[p] * d_;
  if (len <= kCacheSegment || p == n_ - 1) {
    apply_flat(p, off, len, src, dst);
    return;
  }
  for (int i = 0; i < d_; ++i) apply_segment(p + 1, off + i * stride_[p], src, dst);
  if (site_used_[p]) apply_site_block(p, len, src + 2 * off, dst + 2 * off);
}

void ProductHamiltonian::apply_flat(int p, long off, long len, const double* src, double* dst) const {
  for (long i = 0; i < len; ++i) {
    const double g = diag_(off + i);
    dst[2 * (off + i)] = g * src[2 * (off + i)];
    dst[2 * (off + i) + 1] = g * src[2 * (off + i) + 1];
  }
  for (int q = p; q < n_; ++q)
    if (site_used_[q]) apply_site_block(q, len, src + 2 * off, dst + 2 * off);
}

// dst += (I (x) K_q (x) I) src on a segment of `len` complex entries aligned to
// blocks of site q.
void ProductHamiltonian::apply_site_block(int q, long len, const double* src, double* dst) const {
  const long s = stride_[q];
  const long block = s * d_;
  const long outer = len / block;
  if (s == 1) {
    Eigen::Map<const Eigen::MatrixXd> x(src, 2 * d_, outer);
    Eigen::Map<Eigen::MatrixXd> y(dst, 2 * d_, outer);
    y.noalias() += site_k2_[q] * x;
    return;
  }
  for (long l = 0; l < outer; ++l) {
    Eigen::Map<const Eigen::MatrixXd> x(src + 2 * l * block, 2 * s, d_);
    Eigen::Map<Eigen::MatrixXd> y(dst + 2 * l * block, 2 * s, d_);
    y.noalias() += x * site_t_[q];
  }
}

LinearOp ProductHamiltonian::as_operator() const {
  return [this](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { apply(in, out); };
}

namespace {

long stride_of(int p, int n_sites, int d) {
  long s = 1;
  for (int q = n_sites - 1; q > p; --q) s *= d;
  return s;
}

}  // namespace

void apply_site_matrix_real(const Eigen::MatrixXd& m, int p, int n_sites, int d, const Eigen::VectorXcd& in,
                            Eigen::VectorXcd& out, bool accumulate) {
  const long s = stride_of(p, n_sites, d);
  const long block = s * d;
  const long outer = in.size() / block;
  if (!accumulate) out.setZero(in.size());
  const double* src = reinterpret_cast<const double*>(in.data());
  double* dst = reinterpret_cast<double*>(out.data());
  if (s == 1) {
    // Interleaved (re, im) pairs: act with M (x) I_2 on 2d x outer columns.
    const Eigen::MatrixXd k = Eigen::kroneckerProduct(m, Eigen::Matrix2d::Identity()).eval();
    Eigen::Map<const Eigen::MatrixXd> x(src, 2 * d, outer);
    Eigen::Map<Eigen::MatrixXd> y(dst, 2 * d, outer);
    y.noalias() += k * x;
    return;
  }
  const Eigen::MatrixXd mt = m.transpose();
  for (long l = 0; l < outer; ++l) {
    Eigen::Map<const Eigen::MatrixXd> x(src + 2 * l * block, 2 * s, d);
    Eigen::Map<Eigen::MatrixXd> y(dst + 2 * l * block, 2 * s, d);
    y.noalias() += x * mt;
  }
}

void apply_site_matrix(const Eigen::MatrixXcd& m, int p, int n_sites, int d, const Eigen::VectorXcd& in,
                       Eigen::VectorXcd& out) {
  const long s = stride_of(p, n_sites, d);
  const long block = s * d;
  const long outer = in.size() / block;
  out.resize(in.size());
  const Eigen::MatrixXcd mt = m.transpose();
  for (long l = 0; l < outer; ++l) {
    Eigen::Map<const Eigen::MatrixXcd> x(in.data() + l * block, s, d);
    Eigen::Map<Eigen::MatrixXcd> y(out.data() + l * block, s, d);
    y.noalias() = x * mt;
  }
}

void apply_local_matrix(const Eigen::MatrixXcd& m, const std::vector<int>& ps, int n_sites, int d,
                        const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  long ke = 1;
  for (std::size_t i = 0; i < ps.size(); ++i) ke *= d;
  if (m.rows() != ke || m.cols() != ke) throw InvalidArgument("apply_local_matrix: wrong matrix size");
  std::vector<long> offs(ke, 0);
  for (long e = 0; e < ke; ++e) {
    long rem = e;
    for (int i = static_cast<int>(ps.size()) - 1; i >= 0; --i) {
      offs[e] += (rem % d) * stride_of(ps[i], n_sites, d);
      rem /= d;
    }
  }
  const long dim = in.size();
  std::vector<long> bases;
  bases.reserve(dim / ke);
  for (long idx = 0; idx < dim; ++idx) {
    bool zero = true;
    for (int p : ps) zero = zero && ((idx / stride_of(p, n_sites, d)) % d == 0);
    if (zero) bases.push_back(idx);
  }
  Eigen::MatrixXcd g(ke, static_cast<Eigen::Index>(bases.size()));
  for (std::size_t b = 0; b < bases.size(); ++b)
    for (long e = 0; e < ke; ++e) g(e, b) = in(bases[b] + offs[e]);
  const Eigen::MatrixXcd r = m * g;
  out.resize(dim);
  for (std::size_t b = 0; b < bases.size(); ++b)
    for (long e = 0; e < ke; ++e) out(bases[b] + offs[e]) = r(e, b);
}

}  // namespace lrcone
