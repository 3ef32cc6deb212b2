#include "lrcone/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "lrcone/errors.hpp"

namespace lrcone {

std::string to_string(Boundary b) { return b == Boundary::Open ? "open" : "cyclic"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "open" || s == "Open") return Boundary::Open;
  if (s == "cyclic" || s == "Cyclic") return Boundary::Cyclic;
  throw InvalidArgument("unknown boundary '" + s + "'");
}

ValidationReport validate_spec(const ModelSpec& spec) {
  ValidationReport r;
  if (spec.n_sites < 1) r.violations.push_back("n_sites>=1 fails");
  if (!(spec.b > 0.0)) r.violations.push_back("b>0 fails");
  if (!(spec.a > 2.0 * spec.b)) r.violations.push_back("a>2b fails");
  if (spec.perturbation) {
    const auto& p = *spec.perturbation;
    if (!(p.eps_self >= 0.0)) r.violations.push_back("eps_self>=0 fails");
    if (!(p.eps_pair >= 0.0)) r.violations.push_back("eps_pair>=0 fails");
    if (!(p.width > 0.0)) r.violations.push_back("w>0 fails");
    if (!(p.gamma0 > 0.0)) r.violations.push_back("gamma0>0 fails");
    if (p.range_cut && *p.range_cut < 1) r.violations.push_back("range_cut>=1 fails");
  }
  return r;
}

CouplingMatrix build_coupling(const ModelSpec& spec) {
  if (spec.n_sites < 0) throw InvalidArgument("build_coupling: n_sites must be >= 0");
  if (!(spec.a > 2.0 * std::abs(spec.b)))
    throw InvalidArgument("build_coupling: a > 2|b| required for a positive definite coupling");
  const int dim = spec.site_count();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    w(i, i) = spec.a;
    if (i + 1 < dim) {
      w(i, i + 1) = -spec.b;
      w(i + 1, i) = -spec.b;
    }
  }
  if (spec.boundary == Boundary::Cyclic && dim >= 3) {
    w(0, dim - 1) += -spec.b;
    w(dim - 1, 0) += -spec.b;
  }
  return CouplingMatrix{std::move(w), spec.boundary};
}

CouplingMatrix coupling_from_matrix(const Eigen::MatrixXd& w, Boundary boundary) {
  if (w.rows() != w.cols() || w.rows() == 0) throw InvalidArgument("coupling matrix must be square");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw InvalidArgument("coupling matrix must be exactly symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues()(0) > 0.0))
    throw InvalidArgument("coupling matrix must be positive definite");
  return CouplingMatrix{w, boundary};
}

double HypothesisConstants::k(int h) const {
  h = std::abs(h);
  if (range && h > *range) return 0.0;
  if (h == 0) {
    double diag = a_part + self_bound;
    if (pair_bound > 0.0) {
      const double r = std::exp(-gamma0);
      if (range) {
        for (int j = 1; j <= *range; ++j) diag += 2.0 * pair_bound * std::exp(-gamma0 * j);
      } else {
        diag += 2.0 * pair_bound * r / (1.0 - r);
      }
    }
    return diag;
  }
  double off = (h == 1) ? b_part : 0.0;
  if (pair_bound > 0.0) off += pair_bound * std::exp(-gamma0 * h);
  return off;
}

bool HypothesisConstants::admits(double gamma) const {
  if (!(gamma > 0.0)) return false;
  return range.has_value() || gamma < gamma0;
}

double gaussian_fourier_moment(double eps, double width, int j) {
  // FT of eps*exp(-x^2/(2w^2)) is eps*w*sqrt(2pi)*exp(-w^2 xi^2/2);
  // int |xi|^j exp(-w^2 xi^2/2) dxi = 2^{(j+1)/2} Gamma((j+1)/2) / w^{j+1}.
  const double half = 0.5 * (j + 1);
  return eps * width * std::sqrt(2.0 * std::numbers::pi) * std::pow(2.0, half) * std::tgamma(half) /
         std::pow(width, j + 1);
}

HypothesisConstants hypothesis_constants(const ModelSpec& spec) {
  HypothesisConstants c;
  c.a_part = spec.a;
  c.b_part = std::abs(spec.b);
  c.gamma0 = std::numeric_limits<double>::infinity();
  c.range = 1;
  if (!spec.perturbation) return c;
  const auto& p = *spec.perturbation;
  if (!(p.width > 0.0)) throw InvalidArgument("hypothesis_constants: w must be > 0");
  if (!(p.gamma0 > 0.0)) throw InvalidArgument("hypothesis_constants: gamma0 must be > 0");
  const double two_pi = 2.0 * std::numbers::pi;

  // One-site bump: operator-norm prefactor (2pi)^{-1} ||xi^2 v^||_{L1} = eps/w^2.
  const double self_m2 = gaussian_fourier_moment(p.eps_self, p.width, 2);
  const double self_m3 = gaussian_fourier_moment(p.eps_self, p.width, 3);
  c.self_bound = self_m2 / two_pi;

  // Pair bump in x-y: its 2-D transform is 2pi*delta(xi1+xi2)*g^(xi1), so every
  // |xi1^j xi2^k| moment with j+k=m has mass 2pi*int|xi|^m|g^|.
  const double pair_m2 = gaussian_fourier_moment(p.eps_pair, p.width, 2);
  const double pair_m3 = gaussian_fourier_moment(p.eps_pair, p.width, 3);
  c.pair_bound = two_pi * pair_m2 / (two_pi * two_pi);

  const double c_self = self_m2 + self_m3;
  const double c_pair = two_pi * (3.0 * pair_m2 + 4.0 * pair_m3);
  c.C0 = std::max(c_self, c_pair);

  if (p.eps_pair > 0.0) {
    c.gamma0 = p.gamma0;
    if (p.range_cut) {
      c.range = std::max(1, *p.range_cut);
    } else {
      c.range.reset();
    }
  }
  return c;
}

namespace {

// sum over h >= 2 of pair_bound e^{-gamma0 h} w(h), for w = cosh or exp.
double pair_tail(const HypothesisConstants& c, double gamma, bool sharp) {
  if (c.pair_bound == 0.0) return 0.0;
  if (c.range) {
    double s = 0.0;
    for (int h = 2; h <= *c.range; ++h) {
      const double w = sharp ? std::cosh(gamma * h) : std::exp(gamma * h);
      s += c.pair_bound * std::exp(-c.gamma0 * h) * w;
    }
    return s;
  }
  const double r1 = std::exp(-(c.gamma0 - gamma));
  const double r2 = std::exp(-(c.gamma0 + gamma));
  const double g1 = r1 * r1 / (1.0 - r1);
  const double g2 = r2 * r2 / (1.0 - r2);
  return sharp ? 0.5 * c.pair_bound * (g1 + g2) : c.pair_bound * g1;
}

double s_series(const HypothesisConstants& c, double gamma, bool sharp) {
  if (!c.admits(gamma))
    throw InvalidArgument("s_gamma: gamma must lie in (0, gamma0) for infinite-range pair terms");
  const double w1 = sharp ? std::cosh(gamma) : std::exp(gamma);
  double s = c.k(0);
  if (!c.range || *c.range >= 1) s += 2.0 * c.k(1) * w1;
  s += 2.0 * pair_tail(c, gamma, sharp);
  return s;
}

}  // namespace

double s_gamma(const HypothesisConstants& consts, double gamma) {
  return s_series(consts, gamma, true);
}

double s_gamma_convolution(const HypothesisConstants& consts, double gamma) {
  return s_series(consts, gamma, false);
}

VelocityBound velocity_bound_general(const HypothesisConstants& consts,
                                     const std::vector<double>& gamma_grid) {
  if (gamma_grid.empty()) throw InvalidArgument("velocity_bound_general: empty gamma grid");
  VelocityBound best{std::numeric_limits<double>::infinity(), 0.0};
  for (double g : gamma_grid) {
    const double v = 2.0 * std::sqrt(s_gamma(consts, g)) / g;
    if (v < best.value) best = {v, g};
  }
  return best;
}

ModelSpec scaled(const ModelSpec& spec, double g) {
  ModelSpec out = spec;
  out.a *= g;
  out.b *= g;
  if (out.perturbation) {
    out.perturbation->eps_self *= g;
    out.perturbation->eps_pair *= g;
  }
  return out;
}

void to_json(nlohmann::json& j, const PerturbationSpec& p) {
  j = nlohmann::json{{"eps_self", p.eps_self},
                     {"eps_pair", p.eps_pair},
                     {"w", p.width},
                     {"gamma0", p.gamma0}};
  if (p.range_cut) {
    j["range_cut"] = *p.range_cut;
  } else {
    j["range_cut"] = "inf";
  }
}

void from_json(const nlohmann::json& j, PerturbationSpec& p) {
  p.eps_self = j.value("eps_self", 0.0);
  p.eps_pair = j.value("eps_pair", 0.0);
  p.width = j.value("w", 1.0);
  p.gamma0 = j.value("gamma0", 1.0);
  p.range_cut.reset();
  if (j.contains("range_cut")) {
    const auto& rc = j.at("range_cut");
    if (rc.is_number_integer()) {
      p.range_cut = rc.get<int>();
    } else if (!(rc.is_null() || (rc.is_string() && (rc == "inf" || rc == "infinite")))) {
      throw InvalidArgument("range_cut must be an integer or \"inf\"");
    }
  }
}

void to_json(nlohmann::json& j, const ModelSpec& m) {
  j = nlohmann::json{{"n_sites", m.n_sites}, {"boundary", to_string(m.boundary)}, {"a", m.a}, {"b", m.b}};
  if (m.perturbation) {
    j["perturbation"] = *m.perturbation;
  } else {
    j["perturbation"] = nullptr;
  }
}

void from_json(const nlohmann::json& j, ModelSpec& m) {
  m.n_sites = j.at("n_sites").get<int>();
  m.boundary = boundary_from_string(j.value("boundary", std::string("open")));
  m.a = j.at("a").get<double>();
  m.b = j.at("b").get<double>();
  m.perturbation.reset();
  if (j.contains("perturbation") && !j.at("perturbation").is_null())
    m.perturbation = j.at("perturbation").get<PerturbationSpec>();
}

}  // namespace lrcone
