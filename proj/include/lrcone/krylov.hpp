#pragma once

// Matrix-free Hamiltonians on product spaces and Lanczos time stepping.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "lrcone/numerics.hpp"

namespace lrcone {

/// out = H in for a Hermitian H.
using LinearOp = std::function<void(const Eigen::VectorXcd& in, Eigen::VectorXcd& out)>;

struct KrylovOptions {
  int m = 100;         // largest Krylov dimension per substep
  double tol = 1e-10;  // error per unit time, relative to ||v||
};

struct KrylovStats {
  long matvecs = 0;
  long substeps = 0;
};

/// Lanczos basis storage reused across calls.
struct KrylovWorkspace {
  std::vector<Eigen::VectorXcd> basis;
};

/// e^{-i t H} v by restarted Lanczos. Each substep grows the Krylov space
/// until it covers the remaining time or reaches m, then takes the longest
/// step meeting the error estimate.
Eigen::VectorXcd expmv_hermitian(const LinearOp& h, const Eigen::VectorXcd& v, double t,
                                 const KrylovOptions& opt = {}, KrylovStats* stats = nullptr,
                                 KrylovWorkspace* work = nullptr);

/// H = sum_p K_p (one-site real matrices) + diag(D) on n sites with d levels,
/// first site most significant.
class ProductHamiltonian {
 public:
  ProductHamiltonian(int n_sites, int d);

  int n_sites() const { return n_; }
  int d() const { return d_; }
  long dim() const { return dim_; }

  /// Adds K to the one-site term of site position p.
  void add_site_term(int p, const Eigen::MatrixXd& k);
  /// Adds a full-space diagonal.
  void add_diagonal(const Eigen::VectorXd& diag);
  /// Adds coeff * f(levels of positions ps) to the diagonal, f given on the
  /// product grid of those positions (row-major over ps).
  void add_local_diagonal(const std::vector<int>& ps, const Eigen::VectorXd& values, double coeff = 1.0);

  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  LinearOp as_operator() const;

  const Eigen::VectorXd& diagonal() const { return diag_; }
  const Eigen::MatrixXd& site_term(int p) const { return site_.at(p); }

 private:
  int n_, d_;
  long dim_;
  std::vector<Eigen::MatrixXd> site_;
  std::vector<Eigen::MatrixXd> site_t_;   // transposes
  std::vector<Eigen::MatrixXd> site_k2_;  // K (x) I_2 for interleaved complex data
  std::vector<bool> site_used_;
  std::vector<long> stride_;
  Eigen::VectorXd diag_;

  void apply_segment(int p, long off, const double* src, double* dst) const;
  void apply_flat(int p, long off, long len, const double* src, double* dst) const;
  void apply_site_block(int q, long len, const double* src, double* dst) const;
};

/// out = (I (x) ... (x) M (x) ... (x) I) in with M acting on position p.
void apply_site_matrix(const Eigen::MatrixXcd& m, int p, int n_sites, int d, const Eigen::VectorXcd& in,
                       Eigen::VectorXcd& out);

/// Real-matrix version used by the Hamiltonian (acts on real and imaginary
/// parts at once).
void apply_site_matrix_real(const Eigen::MatrixXd& m, int p, int n_sites, int d, const Eigen::VectorXcd& in,
                            Eigen::VectorXcd& out, bool accumulate);

/// Dense operator on the listed positions (ascending, d^k square) applied to a state.
void apply_local_matrix(const Eigen::MatrixXcd& m, const std::vector<int>& ps, int n_sites, int d,
                        const Eigen::VectorXcd& in, Eigen::VectorXcd& out);

}  // namespace lrcone
