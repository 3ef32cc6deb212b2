#pragma once

// Physical model of an oscillator chain: quadratic coupling plus Gaussian
// perturbation families, and the constants that control commutator decay.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace lrcone {

enum class Boundary { Open, Cyclic };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// Gaussian perturbations: a one-site bump eps_self*exp(-x^2/(2w^2)) on every
/// site and a pair bump eps_pair*exp(-gamma0|l-m|)*exp(-(x_l-x_m)^2/(2w^2)) on
/// every unordered pair with |l-m| <= range_cut (no cut when absent).
struct PerturbationSpec {
  double eps_self = 0.0;
  double eps_pair = 0.0;
  double width = 1.0;
  double gamma0 = 1.0;
  std::optional<int> range_cut;  // nullopt: infinite range

  bool operator==(const PerturbationSpec&) const = default;
};

/// Chain on the sites -n..n (2n+1 sites).
struct ModelSpec {
  int n_sites = 1;
  Boundary boundary = Boundary::Open;
  double a = 5.0;
  double b = 2.0;
  std::optional<PerturbationSpec> perturbation;

  int site_count() const { return 2 * n_sites + 1; }
  /// Array index of the site label (label in [-n, n]).
  int index_of(int label) const { return label + n_sites; }
  int label_of(int index) const { return index - n_sites; }

  bool operator==(const ModelSpec&) const = default;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the standing assumptions a > 2b > 0, n >= 1 and the perturbation
/// parameter ranges. Never throws.
ValidationReport validate_spec(const ModelSpec& spec);

/// Symmetric matrix W with V_quad(x) = x^T W x / 2.
struct CouplingMatrix {
  Eigen::MatrixXd W;
  Boundary boundary = Boundary::Open;

  Eigen::Index dim() const { return W.rows(); }
};

/// Tridiagonal (open) or circulant (cyclic) coupling matrix. Accepts b = 0 and
/// n = 0 (decoupled / single-site models) but requires a > 2|b| so that W is
/// positive definite.
CouplingMatrix build_coupling(const ModelSpec& spec);

/// Wraps an arbitrary matrix after checking symmetry and positive definiteness.
CouplingMatrix coupling_from_matrix(const Eigen::MatrixXd& w, Boundary boundary = Boundary::Open);

/// Norm-bound profile h -> k(h) on the gradient couplings, plus C0 and gamma0.
struct HypothesisConstants {
  double C0 = 0.0;
  double gamma0 = 0.0;       // +inf for nearest-neighbour-only models
  std::optional<int> range;  // largest |h| with k(h) != 0; nullopt = infinite
  double a_part = 0.0;       // quadratic diagonal contribution
  double b_part = 0.0;       // quadratic nearest-neighbour contribution
  double self_bound = 0.0;   // second-derivative bound of the one-site bump
  double pair_bound = 0.0;   // second-derivative bound of the pair bump (before e^{-gamma0|h|})

  /// k(h) for any integer h (symmetric in h).
  double k(int h) const;
  /// True when gamma is admissible for the decay series.
  bool admits(double gamma) const;
};

/// L1 norm of |xi|^j * Fourier transform of eps*exp(-x^2/(2w^2)), in closed form.
double gaussian_fourier_moment(double eps, double width, int j);

HypothesisConstants hypothesis_constants(const ModelSpec& spec);

/// Sharp constant S_gamma = sum_h k(h) cosh(gamma h): the supremum over
/// (lambda, nu) of sum_mu k(|lambda-mu|) e^{-gamma|mu-nu|} / e^{-gamma|lambda-nu|}.
double s_gamma(const HypothesisConstants& consts, double gamma);

/// Convolution constant sum_h k(h) e^{gamma|h|} (always >= s_gamma).
double s_gamma_convolution(const HypothesisConstants& consts, double gamma);

struct VelocityBound {
  double value = 0.0;
  double gamma = 0.0;  // minimizing grid point
};

/// min over the grid of 2 sqrt(S_gamma) / gamma.
VelocityBound velocity_bound_general(const HypothesisConstants& consts,
                                     const std::vector<double>& gamma_grid);

/// Same model with a, b and every perturbation amplitude multiplied by g.
ModelSpec scaled(const ModelSpec& spec, double g);

void to_json(nlohmann::json& j, const PerturbationSpec& p);
void from_json(const nlohmann::json& j, PerturbationSpec& p);
void to_json(nlohmann::json& j, const ModelSpec& m);
void from_json(const nlohmann::json& j, ModelSpec& m);

}  // namespace lrcone
