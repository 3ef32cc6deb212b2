#include "lrcone/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "lrcone/dispersion.hpp"
#include "lrcone/dynamics.hpp"
#include "lrcone/errors.hpp"
#include "lrcone/fock.hpp"
#include "lrcone/harmonic.hpp"
#include "lrcone/lightcone.hpp"
#include "lrcone/ode.hpp"

#ifndef LRCONE_VERSION
#define LRCONE_VERSION "0.0.0"
#endif

namespace lrcone {

using nlohmann::json;

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::Dispersion, "dispersion"},  {ExperimentKind::HarmonicCone, "harmonic-cone"},
    {ExperimentKind::FockCone, "fock-cone"},     {ExperimentKind::Converge, "converge"},
    {ExperimentKind::Norms, "norms"},            {ExperimentKind::OdeCheck, "odecheck"},
    {ExperimentKind::CompressCheck, "compress-check"},
};

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "?";
}

ExperimentKind experiment_from_string(const std::string& s) {
  for (const auto& e : kKinds)
    if (s == e.name) return e.kind;
  throw ConfigError("unknown experiment \"" + s + "\"");
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::vector<double> parse_real_grid(const json& j, const char* name) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& x : j) {
      if (!x.is_number()) throw ConfigError(std::string("grid ") + name + ": entries must be numbers");
      out.push_back(x.get<double>());
    }
  } else if (j.is_object()) {
    const double lo = j.at("lo").get<double>();
    const double hi = j.at("hi").get<double>();
    const int count = j.at("count").get<int>();
    if (count < 1) throw ConfigError(std::string("grid ") + name + ": count must be >= 1");
    const std::string spacing = j.value("spacing", std::string("linear"));
    if (spacing == "linear") {
      out = linear_grid(lo, hi, count);
    } else if (spacing == "log") {
      if (!(lo > 0.0 && hi > 0.0)) throw ConfigError(std::string("grid ") + name + ": log grid needs lo, hi > 0");
      out = log_grid(lo, hi, count);
    } else {
      throw ConfigError(std::string("grid ") + name + ": spacing must be linear or log");
    }
  } else {
    throw ConfigError(std::string("grid ") + name + ": expected an array or {lo, hi, count}");
  }
  if (out.empty()) throw ConfigError(std::string("grid ") + name + " is empty");
  return out;
}

std::vector<int> parse_int_grid(const json& j, const char* name) {
  std::vector<int> out;
  if (j.is_array()) {
    for (const auto& x : j) {
      if (!x.is_number_integer()) throw ConfigError(std::string("grid ") + name + ": entries must be integers");
      out.push_back(x.get<int>());
    }
  } else if (j.is_object()) {
    const int lo = j.at("lo").get<int>();
    const int hi = j.at("hi").get<int>();
    const int step = j.value("step", 1);
    if (step < 1 || hi < lo) throw ConfigError(std::string("grid ") + name + ": need lo <= hi and step >= 1");
    for (int x = lo; x <= hi; x += step) out.push_back(x);
  } else {
    throw ConfigError(std::string("grid ") + name + ": expected an array or {lo, hi}");
  }
  if (out.empty()) throw ConfigError(std::string("grid ") + name + " is empty");
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON at " + line_column(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");

  ExperimentConfig cfg;
  cfg.raw = doc;
  try {
    if (!doc.contains("experiment")) throw ConfigError("missing key \"experiment\"");
    cfg.experiment = experiment_from_string(doc.at("experiment").get<std::string>());
    const bool model_given = doc.contains("model");
    if (model_given) {
      try {
        cfg.model = doc.at("model").get<ModelSpec>();
      } catch (const Error& e) {
        throw ConfigError(std::string("model: ") + e.what());
      }
    }
    if (doc.contains("grids")) {
      const json& g = doc.at("grids");
      if (g.contains("t")) cfg.t_grid = parse_real_grid(g.at("t"), "t");
      if (g.contains("h")) cfg.h_grid = parse_int_grid(g.at("h"), "h");
      if (g.contains("gamma")) cfg.gamma_grid = parse_real_grid(g.at("gamma"), "gamma");
      if (g.contains("d")) cfg.d_grid = parse_int_grid(g.at("d"), "d");
      if (g.contains("m")) cfg.m_values = parse_int_grid(g.at("m"), "m");
    }
    cfg.threshold = doc.value("threshold", cfg.threshold);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.samples = doc.value("samples", cfg.samples);
    cfg.block_quanta = doc.value("block_quanta", cfg.block_quanta);
    cfg.basis_omega = doc.value("basis_omega", cfg.basis_omega);
    cfg.laurent_K = doc.value("laurent_K", cfg.laurent_K);
    cfg.ode_step = doc.value("ode_step", cfg.ode_step);
    if (doc.contains("observable")) {
      const json& o = doc.at("observable");
      cfg.a_site = o.value("site", cfg.a_site);
      cfg.a_u = o.value("u", cfg.a_u);
      cfg.a_v = o.value("v", cfg.a_v);
      cfg.b_u = o.value("b_u", cfg.b_u);
      cfg.b_v = o.value("b_v", cfg.b_v);
    }
    if (doc.contains("output")) {
      const json& o = doc.at("output");
      if (o.is_string()) {
        cfg.out_dir = o.get<std::string>();
      } else {
        cfg.out_dir = o.value("dir", cfg.out_dir);
      }
    }
    resolve_defaults(cfg, model_given);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }

  if (!(cfg.threshold > 0.0)) throw ConfigError("threshold must be positive");
  if (cfg.samples < 1) throw ConfigError("samples must be >= 1");
  if (cfg.block_quanta < 0) throw ConfigError("block_quanta must be >= 0");
  if (!(cfg.basis_omega >= 0.0)) throw ConfigError("basis_omega must be >= 0");
  if (!(cfg.ode_step > 0.0)) throw ConfigError("ode_step must be positive");
  for (int d : cfg.d_grid)
    if (d < 2) throw ConfigError("grid d: levels must be >= 2");
  for (double g : cfg.gamma_grid)
    if (!(g > 0.0)) throw ConfigError("grid gamma: entries must be positive");
  if (cfg.model.n_sites < 0) throw ConfigError("model: n_sites must be >= 0");
  if (!(cfg.model.a > 2.0 * std::abs(cfg.model.b))) throw ConfigError("model: a > 2|b| required");
  return cfg;
}

double fock_omega(const ExperimentConfig& cfg) {
  return cfg.basis_omega > 0.0 ? cfg.basis_omega : std::sqrt(cfg.model.a);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void resolve_defaults(ExperimentConfig& cfg, bool model_given) {
  auto set_model = [&](int n, Boundary bnd) {
    if (model_given) return;
    cfg.model = ModelSpec{};
    cfg.model.n_sites = n;
    cfg.model.boundary = bnd;
  };
  switch (cfg.experiment) {
    case ExperimentKind::Dispersion:
      set_model(16, Boundary::Cyclic);
      if (cfg.gamma_grid.empty()) cfg.gamma_grid = default_gamma_grid();
      if (cfg.t_grid.empty()) cfg.t_grid = {0.5, 1.0, 2.0};
      break;
    case ExperimentKind::HarmonicCone:
      set_model(128, Boundary::Cyclic);
      // Far-field shifts: near the origin the crossing times carry the
      // finite-distance offset of the wave front.
      if (cfg.h_grid.empty())
        for (int h = std::max(1, cfg.model.n_sites / 4); h <= cfg.model.n_sites; ++h) cfg.h_grid.push_back(h);
      if (cfg.t_grid.empty()) {
        const double t_max = 1.1 * cfg.model.n_sites + 10.0;
        cfg.t_grid = linear_grid(0.0, t_max, static_cast<int>(std::lround(t_max / 0.02)) + 1);
      }
      if (cfg.gamma_grid.empty()) cfg.gamma_grid = {0.25, 0.5, 1.0};
      break;
    case ExperimentKind::FockCone:
      set_model(2, Boundary::Open);
      if (cfg.t_grid.empty()) cfg.t_grid = {0.5, 1.0, 1.5, 2.0};
      if (cfg.h_grid.empty()) cfg.h_grid = {1, 2};
      if (cfg.d_grid.empty()) cfg.d_grid = {12, 14, 16};
      break;
    case ExperimentKind::Converge:
      if (!model_given) {
        set_model(2, Boundary::Open);
        cfg.model.perturbation = PerturbationSpec{0.2, 0.2, 1.0, 1.0, std::nullopt};
      }
      if (cfg.t_grid.empty()) cfg.t_grid = {0.5};
      if (cfg.d_grid.empty()) cfg.d_grid = {10};
      if (cfg.m_values.empty())
        for (int m = 0; m <= cfg.model.n_sites; ++m) cfg.m_values.push_back(m);
      break;
    case ExperimentKind::Norms:
      set_model(16, Boundary::Cyclic);
      if (cfg.t_grid.empty()) cfg.t_grid = linear_grid(0.0, 3.0, 61);
      break;
    case ExperimentKind::OdeCheck:
      set_model(8, Boundary::Cyclic);
      if (cfg.t_grid.empty()) cfg.t_grid = {0.5, 1.0, 2.0};
      if (cfg.gamma_grid.empty()) cfg.gamma_grid = {0.5};
      break;
    case ExperimentKind::CompressCheck:
      set_model(1, Boundary::Open);
      if (cfg.d_grid.empty()) cfg.d_grid = {2, 3, 4, 5, 6};
      break;
  }
}

namespace {

class Artifacts {
 public:
  explicit Artifacts(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir_ + ": " + ec.message());
  }

  std::ofstream open(const std::string& name) {
    const auto path = std::filesystem::path(dir_) / name;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    files_.push_back(name);
    return out;
  }

  void write_json(const std::string& name, const json& j) {
    auto out = open(name);
    out << j.dump(2) << "\n";
  }

  const std::vector<std::string>& files() const { return files_; }
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

std::string fmt(double x) { return format_double(x); }

// Absolute accuracy of exact norms evaluated in double precision.
constexpr double kRoundingFloor = 1e-14;

json run_dispersion(const ExperimentConfig& cfg, Artifacts& art) {
  const DispersionParams p{cfg.model.a, cfg.model.b};
  {
    auto out = art.open("m_gamma.csv");
    out << "gamma,M,M_over_gamma\n";
    for (double g : cfg.gamma_grid) {
      const double m = m_gamma(p, g);
      out << fmt(g) << "," << fmt(m) << "," << fmt(m / g) << "\n";
    }
  }
  const QuadraticVelocity qv = velocity_bound_quadratic(p, cfg.gamma_grid);

  long checked = 0, violations = 0;
  double max_ratio = 0.0;
  {
    auto out = art.open("laurent.csv");
    out << "kind,t,gamma,k,re,im,bound\n";
    for (SymbolKind kind : {SymbolKind::F, SymbolKind::G, SymbolKind::H}) {
      for (double t : cfg.t_grid) {
        for (double g : {0.25, 0.5, 1.0}) {
          const LaurentTable tab = laurent_coefficients(p, kind, t, g, cfg.laurent_K);
          for (int k = -cfg.laurent_K; k <= cfg.laurent_K; ++k) {
            const cplx c = tab.coeff(k);
            const double bound = tab.bound(k);
            ++checked;
            if (std::abs(c) > bound + 1e-8) ++violations;
            max_ratio = std::max(max_ratio, std::abs(c) / bound);
            out << to_string(kind) << "," << fmt(t) << "," << fmt(g) << "," << k << "," << fmt(c.real()) << ","
                << fmt(c.imag()) << "," << fmt(bound) << "\n";
          }
        }
      }
    }
  }

  json h{{"v_bound_quadratic", qv.value},
         {"gamma_star", qv.gamma},
         {"group_velocity", qv.group_velocity},
         {"minimizer_at_small_end", qv.at_small_end},
         {"laurent_checked", checked},
         {"laurent_violations", violations},
         {"laurent_max_ratio", max_ratio}};
  const HypothesisConstants hc = hypothesis_constants(cfg.model);
  std::vector<double> grid;
  for (double g : cfg.gamma_grid)
    if (hc.admits(g)) grid.push_back(g);
  if (!grid.empty()) {
    const VelocityBound vb = velocity_bound_general(hc, grid);
    h["v_bound_general"] = vb.value;
    h["gamma_general"] = vb.gamma;
  }
  return h;
}

PhasePoint site_phase(const ModelSpec& spec, int label, double u, double v) {
  if (std::abs(label) > spec.n_sites) throw ConfigError("observable site outside the chain");
  PhasePoint p = PhasePoint::zero(spec.site_count());
  p.u(spec.index_of(label)) = u;
  p.v(spec.index_of(label)) = v;
  return p;
}

json run_harmonic_cone(const ExperimentConfig& cfg, Artifacts& art) {
  const PhasePoint a = site_phase(cfg.model, cfg.a_site, cfg.a_u, cfg.a_v);
  const PhasePoint b = site_phase(cfg.model, cfg.a_site, cfg.b_u, cfg.b_v);
  const ConeScan scan = cone_scan_harmonic(cfg.model, a, b, cfg.h_grid, cfg.t_grid);
  {
    auto out = art.open("cone.csv");
    write_csv(out, scan);
  }
  const VelocityReport vr = fit_velocity(scan, cfg.threshold);
  art.write_json("velocity.json", vr);

  json h{{"v_empirical", vr.v_empirical},
         {"velocity_defined", vr.defined},
         {"crossings", vr.crossings.size()},
         {"v_bound_quadratic", vr.v_bound_quadratic},
         {"v_bound_general", vr.v_bound_general},
         {"gamma_fit", vr.gamma_fit},
         {"M_fit", vr.M_fit},
         {"points", scan.points.size()}};

  if (cfg.model.boundary == Boundary::Cyclic) {
    const double pre = (std::abs(cfg.a_u) + std::abs(cfg.a_v)) * (std::abs(cfg.b_u) + std::abs(cfg.b_v));
    json checks = json::array();
    double worst = 0.0;
    long viol = 0;
    for (double g : cfg.gamma_grid) {
      const CyclicDecayConstant k = cyclic_decay_constant(DispersionParams{cfg.model.a, cfg.model.b}, g);
      const ConeBoundCheck c = check_cone_bound(scan, g, k.C(), k.M, cfg.model.site_count(), pre,
                                                kRoundingFloor);
      checks.push_back({{"gamma", g}, {"C", c.C}, {"M", c.M}, {"violations", c.violations}, {"max_ratio", c.max_ratio}});
      worst = std::max(worst, c.max_ratio);
      viol += c.violations;
    }
    h["cone_bound"] = checks;
    h["cone_bound_violations"] = viol;
    h["max_inequality_ratio"] = worst;
  }

  if (vr.defined && std::isfinite(vr.v_bound_quadratic)) {
    const double v = 1.5 * vr.v_bound_quadratic;
    // One site per step; ceil(v t_k) = k.
    const double dt = 1.0 / v;
    const int steps = cfg.model.n_sites / 2;
    if (steps >= 2) {
      const auto ray = ray_scan_harmonic(cfg.model, a, b, v, dt, steps);
      std::vector<double> vals;
      auto out = art.open("ray.csv");
      out << "h,t,norm\n";
      for (const auto& p : ray) {
        out << p.h << "," << fmt(p.t) << "," << fmt(p.norm) << "\n";
        if (p.norm > kRoundingFloor) vals.push_back(p.norm);
      }
      h["ray_velocity"] = v;
      h["ray_decreasing_from"] = strictly_decreasing_from(vals);
      h["ray_points_above_floor"] = vals.size();
    }
  }
  return h;
}

std::vector<int> chain_labels(const ModelSpec& spec) {
  std::vector<int> s;
  for (int l = -spec.n_sites; l <= spec.n_sites; ++l) s.push_back(l);
  return s;
}

json run_fock_cone(const ExperimentConfig& cfg, Artifacts& art) {
  const std::vector<int> sites = chain_labels(cfg.model);
  const bool harmonic = !cfg.model.perturbation ||
                        (cfg.model.perturbation->eps_self == 0.0 && cfg.model.perturbation->eps_pair == 0.0);
  std::optional<ConeScan> exact;
  if (harmonic) {
    exact = cone_scan_harmonic(cfg.model, site_phase(cfg.model, cfg.a_site, cfg.a_u, cfg.a_v),
                               site_phase(cfg.model, cfg.a_site, cfg.b_u, cfg.b_v), cfg.h_grid, cfg.t_grid);
    auto out = art.open("cone_exact.csv");
    write_csv(out, *exact);
  }

  json per_d = json::array();
  std::vector<double> errors;
  auto summary = art.open("fock_errors.csv");
  summary << "d,max_error,matvecs,seconds\n";
  for (int d : cfg.d_grid) {
    const auto t0 = std::chrono::steady_clock::now();
    const double omega = fock_omega(cfg);
    const auto prop = make_propagator(cfg.model, sites, d, 1024, {}, omega);
    const LocalObservable a = weyl_local_observable(d, {{cfg.a_site, cfg.a_u, cfg.a_v}}, omega);
    const LocalObservable b = weyl_local_observable(d, {{cfg.a_site, cfg.b_u, cfg.b_v}}, omega);
    const ConeScan scan = cone_scan_fock(*prop, a, b, cfg.h_grid, cfg.t_grid, cfg.block_quanta);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
      auto out = art.open("cone_fock_d" + std::to_string(d) + ".csv");
      write_csv(out, scan);
    }
    json entry{{"d", d}, {"matvecs", prop->matvecs()}, {"seconds", secs}};
    double err = std::numeric_limits<double>::quiet_NaN();
    if (exact) {
      err = 0.0;
      for (std::size_t i = 0; i < scan.points.size(); ++i)
        err = std::max(err, std::abs(scan.points[i].norm - exact->points[i].norm));
      errors.push_back(err);
      entry["max_error"] = err;
    } else {
      ConeScan named = scan;
      named.model = cfg.model;
      const VelocityReport vr = fit_velocity(named, cfg.threshold);
      entry["velocity"] = vr;
    }
    summary << d << "," << fmt(err) << "," << prop->matvecs() << "," << fmt(secs) << "\n";
    per_d.push_back(entry);
  }
  json h{{"per_d", per_d}, {"basis_omega", fock_omega(cfg)}};
  if (!errors.empty()) {
    bool monotone = true;
    for (std::size_t i = 1; i < errors.size(); ++i) monotone = monotone && errors[i] < errors[i - 1];
    h["max_error_last_d"] = errors.back();
    h["monotone_in_d"] = monotone;
  }
  return h;
}

json run_converge(const ExperimentConfig& cfg, Artifacts& art) {
  const int d = cfg.d_grid.front();
  const double t = cfg.t_grid.front();
  const double omega = fock_omega(cfg);
  const LocalObservable a = weyl_local_observable(d, {{cfg.a_site, cfg.a_u, cfg.a_v}}, omega);
  std::vector<GapResult> gaps;
  auto out = art.open("gaps.csv");
  out << "m,n,t,distance,gap\n";
  for (int m : cfg.m_values) {
    const GapResult g = convergence_gap(cfg.model, a, m, cfg.model.n_sites, t, d, cfg.block_quanta, {}, omega);
    gaps.push_back(g);
    out << g.m << "," << g.n << "," << fmt(g.t) << "," << g.distance << "," << fmt(g.gap) << "\n";
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) decreasing = decreasing && gaps[i].gap < gaps[i - 1].gap;
  bool concave = true;
  for (std::size_t i = 2; i < gaps.size(); ++i) {
    const double l0 = std::log(gaps[i - 2].gap), l1 = std::log(gaps[i - 1].gap), l2 = std::log(gaps[i].gap);
    concave = concave && (l2 - 2.0 * l1 + l0 <= 1e-12 * std::max(1.0, std::abs(l1)) || gaps[i].gap == 0.0);
  }
  json list = json::array();
  for (const auto& g : gaps) list.push_back({{"m", g.m}, {"distance", g.distance}, {"gap", g.gap}});
  return json{{"gaps", list}, {"strictly_decreasing", decreasing}, {"log_concave_or_linear", concave}};
}

json run_norms(const ExperimentConfig& cfg, Artifacts& art) {
  const PhasePoint a = site_phase(cfg.model, cfg.a_site, cfg.a_u, cfg.a_v);
  const HarmonicPropagator prop(build_coupling(cfg.model));
  std::vector<double> ts, logs;
  auto out = art.open("norms.csv");
  out << "t,w0,w1,w2,log_w2\n";
  for (double t : cfg.t_grid) {
    const NormBundle nb = weyl_norms_exact(prop.propagate(t, a));
    ts.push_back(t);
    logs.push_back(std::log(nb.w2()));
    out << fmt(t) << "," << fmt(nb.w0()) << "," << fmt(nb.w1()) << "," << fmt(nb.w2()) << "," << fmt(logs.back())
        << "\n";
  }
  const LineFit fit = fit_line(ts, logs);
  double envelope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ts.size(); ++i) envelope = std::max(envelope, logs[i] - fit.slope * ts[i]);
  return json{{"slope", fit.slope},
              {"intercept", fit.intercept},
              {"envelope_intercept", envelope},
              {"slope_finite", std::isfinite(fit.slope)}};
}

json run_odecheck(const ExperimentConfig& cfg, Artifacts& art) {
  const CouplingMatrix w = build_coupling(cfg.model);
  OdeOptions opt;
  opt.step = cfg.ode_step;
  opt.gamma = cfg.gamma_grid.front();
  const bool cyclic = cfg.model.boundary == Boundary::Cyclic && cfg.model.site_count() >= 3;
  const HarmonicPropagator prop(w);
  const auto id = Eigen::MatrixXd::Identity(w.dim(), w.dim());

  const EvolutionMatrices e0 = prop.at(0.0);
  const double init_err = std::max((e0.A - id).cwiseAbs().maxCoeff(), e0.B.cwiseAbs().maxCoeff());

  auto out = art.open("ode.csv");
  out << "t,spectral_vs_circulant,spectral_vs_ode,identity_residual,halving_error_A,halving_error_B,certificate_ok\n";
  double worst_circ = 0.0, worst_ode = 0.0, worst_id = 0.0;
  bool certified = true;
  const Eigen::MatrixXd neg = -w.W;
  const MatrixFn omega = [&neg](double) { return neg; };
  for (double t : cfg.t_grid) {
    const EvolutionMatrices es = prop.at(t);
    const double dc = cyclic ? max_entry_difference(es, evolve_matrices_circulant(cfg.model, t)) : 0.0;
    const OdeResult ra = ode_propagate_appB(omega, w.dim(), 0.0, t, OdeKind::AType, opt);
    const OdeResult rb = ode_propagate_appB(omega, w.dim(), 0.0, t, OdeKind::BType, opt);
    EvolutionMatrices eo;
    eo.t = t;
    eo.A = ra.X0;
    eo.Adot = ra.X1;
    eo.B = rb.X0;
    eo.Bdot = rb.X1;
    const double dode = max_entry_difference(es, eo);
    const double resid = (es.A * es.A + w.W * es.B * es.B - id).cwiseAbs().maxCoeff();
    const bool ok = ra.certificate.ok() && rb.certificate.ok();
    certified = certified && ok;
    worst_circ = std::max(worst_circ, dc);
    worst_ode = std::max(worst_ode, dode);
    worst_id = std::max(worst_id, resid);
    out << fmt(t) << "," << fmt(dc) << "," << fmt(dode) << "," << fmt(resid) << "," << fmt(ra.halving_error) << ","
        << fmt(rb.halving_error) << "," << (ok ? 1 : 0) << "\n";
  }
  return json{{"max_spectral_vs_circulant", worst_circ},
              {"max_spectral_vs_ode", worst_ode},
              {"max_identity_residual", worst_id},
              {"initial_condition_error", init_err},
              {"certificates_ok", certified},
              {"circulant_checked", cyclic}};
}

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

json run_compress_check(const ExperimentConfig& cfg, Artifacts& art) {
  std::mt19937_64 rng(cfg.seed);
  double worst_exact = 0.0, worst_comp = 0.0, worst_contr = 0.0;
  long contr_violations = 0;
  auto out = art.open("compress.csv");
  out << "sample,d,exactness_error,norm_T,norm_rho,composition_error\n";
  for (int s = 0; s < cfg.samples; ++s) {
    const int d = cfg.d_grid[static_cast<std::size_t>(s) % cfg.d_grid.size()];
    const TruncatedRep g({0, 1, 2}, d);
    const TruncatedRep e2({0, 1}, d);

    // Operator acting trivially on the dropped site.
    const Eigen::MatrixXcd inner = random_matrix(rng, e2.total_dim());
    const ObservableOp te = local_operator(g, {0, 1}, inner);
    const double exact_err = (compress_operator(te, {0, 1}).matrix - inner).cwiseAbs().maxCoeff();

    const ObservableOp t(g, random_matrix(rng, g.total_dim()), g.sites);
    const double nt = operator_norm(t.matrix);
    const double nr = operator_norm(compress_operator(t, {0, 1}).matrix);
    const ObservableOp direct = compress_operator(t, {0});
    const ObservableOp chained = compress_operator(compress_operator(t, {0, 1}), {0});
    const double comp = (direct.matrix - chained.matrix).cwiseAbs().maxCoeff();

    worst_exact = std::max(worst_exact, exact_err);
    worst_comp = std::max(worst_comp, comp);
    worst_contr = std::max(worst_contr, nr / nt);
    if (nr > nt * (1.0 + 1e-12)) ++contr_violations;
    out << s << "," << d << "," << fmt(exact_err) << "," << fmt(nt) << "," << fmt(nr) << "," << fmt(comp) << "\n";
  }
  return json{{"max_exactness_error", worst_exact},
              {"max_composition_error", worst_comp},
              {"max_norm_ratio", worst_contr},
              {"contractivity_violations", contr_violations},
              {"samples", cfg.samples}};
}

}  // namespace

json run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Artifacts art(cfg.out_dir);
  json headline;
  switch (cfg.experiment) {
    case ExperimentKind::Dispersion: headline = run_dispersion(cfg, art); break;
    case ExperimentKind::HarmonicCone: headline = run_harmonic_cone(cfg, art); break;
    case ExperimentKind::FockCone: headline = run_fock_cone(cfg, art); break;
    case ExperimentKind::Converge: headline = run_converge(cfg, art); break;
    case ExperimentKind::Norms: headline = run_norms(cfg, art); break;
    case ExperimentKind::OdeCheck: headline = run_odecheck(cfg, art); break;
    case ExperimentKind::CompressCheck: headline = run_compress_check(cfg, art); break;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(cfg.raw.dump());

  json manifest{{"experiment", to_string(cfg.experiment)},
                {"config_hash", hash.str()},
                {"version", LRCONE_VERSION},
                {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                      "." + std::to_string(EIGEN_MINOR_VERSION)},
                {"wall_clock_seconds", secs},
                {"model", cfg.model},
                {"model_id", model_id(cfg.model)},
                {"headline", headline},
                {"files", art.files()}};
  art.write_json("manifest.json", manifest);
  return manifest;
}

}  // namespace lrcone
