#include "lrcone/lightcone.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lrcone/dispersion.hpp"
#include "lrcone/errors.hpp"

namespace lrcone {

std::string to_string(ScanSource s) {
  return s == ScanSource::HarmonicExact ? "harmonic-exact" : "fock-numeric";
}

ScanSource scan_source_from_string(const std::string& s) {
  if (s == "harmonic-exact") return ScanSource::HarmonicExact;
  if (s == "fock-numeric") return ScanSource::FockNumeric;
  throw InvalidArgument("unknown scan source: " + s);
}

std::vector<int> ConeScan::shifts() const {
  std::vector<int> out;
  for (const auto& p : points)
    if (std::find(out.begin(), out.end(), p.h) == out.end()) out.push_back(p.h);
  return out;
}

std::string model_id(const ModelSpec& spec) {
  std::ostringstream os;
  os << to_string(spec.boundary) << "-n" << spec.n_sites << "-a" << spec.a << "-b" << spec.b;
  if (spec.perturbation)
    os << "-eps" << spec.perturbation->eps_self << "," << spec.perturbation->eps_pair;
  return os.str();
}

namespace {

std::string describe(const PhasePoint& p, int n_sites) {
  std::ostringstream os;
  os << "weyl";
  for (auto i : p.support()) os << "[" << (i - n_sites) << ":" << p.u(i) << "," << p.v(i) << "]";
  return os.str();
}

std::string describe(const std::vector<int>& sites) {
  std::ostringstream os;
  os << "sites";
  for (int s : sites) os << "[" << s << "]";
  return os.str();
}

void check_time_grid(const std::vector<double>& t_grid, const char* who) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0)) throw InvalidArgument(std::string(who) + ": times must be >= 0");
    if (i > 0 && t_grid[i] < t_grid[i - 1]) throw InvalidArgument(std::string(who) + ": times must be sorted");
  }
}

}  // namespace

ConeScan cone_scan_harmonic(const ModelSpec& spec, const PhasePoint& a, const PhasePoint& b,
                            const std::vector<int>& h_grid, const std::vector<double>& t_grid) {
  const int size = spec.site_count();
  if (a.dim() != size || b.dim() != size) throw InvalidArgument("cone_scan_harmonic: phase point size mismatch");
  const bool cyclic = spec.boundary == Boundary::Cyclic;
  const auto supp = b.support();

  // Kept shifts and the shifted support of b for each.
  const int quarter = (!cyclic && size >= 16) ? size / 8 : 0;
  std::vector<int> kept;
  std::vector<std::vector<Eigen::Index>> targets;
  for (int h : h_grid) {
    if (cyclic && std::abs(h) > spec.n_sites) throw InvalidArgument("cone_scan_harmonic: shift exceeds the ring");
    std::vector<Eigen::Index> tgt;
    bool inner = true;
    for (auto i : supp) {
      long j = i + h;
      if (cyclic) {
        j = ((j % size) + size) % size;
      } else if (j < 0 || j >= size) {
        throw InvalidArgument("cone_scan_harmonic: shifted observable leaves the lattice");
      }
      if (j < quarter || j >= size - quarter) inner = false;
      tgt.push_back(j);
    }
    if (!inner) continue;
    kept.push_back(h);
    targets.push_back(std::move(tgt));
  }

  ConeScan scan;
  scan.model = spec;
  scan.model_id = model_id(spec);
  scan.a_desc = describe(a, spec.n_sites);
  scan.b_desc = describe(b, spec.n_sites);
  scan.source = ScanSource::HarmonicExact;
  scan.points.reserve(kept.size() * t_grid.size());

  const HarmonicPropagator prop(build_coupling(spec));
  std::vector<PhasePoint> evolved;
  evolved.reserve(t_grid.size());
  for (double t : t_grid) evolved.push_back(prop.propagate(t, a));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      const PhasePoint& q = evolved[ti];
      double sigma = 0.0;
      for (std::size_t s = 0; s < supp.size(); ++s) {
        const auto i = supp[s];
        const auto j = targets[k][s];
        sigma += q.u(j) * b.v(i) - q.v(j) * b.u(i);
      }
      scan.points.push_back({kept[k], t_grid[ti], 2.0 * std::abs(std::sin(0.5 * sigma))});
    }
  }
  return scan;
}

ConeScan cone_scan_fock(const HamiltonianBundle& bundle, const ObservableOp& a, const ObservableOp& b,
                        const std::vector<int>& h_grid, const std::vector<double>& t_grid, const BulkBlock* block) {
  ConeScan scan;
  scan.model = bundle.model;
  scan.model_id = model_id(bundle.model);
  scan.a_desc = describe(a.support);
  scan.b_desc = describe(b.support);
  scan.source = ScanSource::FockNumeric;
  std::vector<ObservableOp> shifted;
  for (int h : h_grid) shifted.push_back(shift_observable(b, h));
  std::vector<std::vector<ConePoint>> rows(h_grid.size());
  for (double t : t_grid) {
    const ObservableOp at = heisenberg_evolve(bundle, a, t);
    for (std::size_t k = 0; k < h_grid.size(); ++k)
      rows[k].push_back({h_grid[k], t, commutator_norm(at, shifted[k], block)});
  }
  for (auto& r : rows) scan.points.insert(scan.points.end(), r.begin(), r.end());
  return scan;
}

ConeScan cone_scan_fock(const Propagator& prop, const LocalObservable& a, const LocalObservable& b,
                        const std::vector<int>& h_grid, const std::vector<double>& t_grid, int block_quanta) {
  check_time_grid(t_grid, "cone_scan_fock");
  const TruncatedRep& rep = prop.rep();
  for (int s : a.sites)
    if (!rep.contains(s)) throw InvalidArgument("cone_scan_fock: observable A outside the representation");

  ConeScan scan;
  scan.model_id = "fock";
  scan.a_desc = describe(a.sites);
  scan.b_desc = describe(b.sites);
  scan.source = ScanSource::FockNumeric;

  const LocalObservable ap = prop.prepare(a);
  std::vector<LocalObservable> bp;
  for (int h : h_grid) {
    LocalObservable s{b.sites, b.local};
    for (int& x : s.sites) {
      x += h;
      if (!rep.contains(x)) throw InvalidArgument("cone_scan_fock: shifted observable leaves the representation");
    }
    bp.push_back(prop.prepare(s));
  }

  const BulkBlock block = BulkBlock::total_quanta(rep, block_quanta);
  const std::size_t nb = block.indices.size();
  const std::size_t nh = h_grid.size();
  std::vector<Eigen::VectorXcd> f(nb);
  std::vector<std::vector<Eigen::VectorXcd>> g(nh, std::vector<Eigen::VectorXcd>(nb));
  for (std::size_t j = 0; j < nb; ++j) {
    f[j] = prop.basis_state(block.indices[j]);
    for (std::size_t k = 0; k < nh; ++k) g[k][j] = prop.apply_prepared(bp[k], f[j]);
  }

  std::vector<std::vector<ConePoint>> rows(nh);
  double prev = 0.0;
  for (double t : t_grid) {
    const double dt = t - prev;
    prev = t;
    for (std::size_t j = 0; j < nb; ++j) {
      f[j] = prop.evolve(f[j], dt);
      for (std::size_t k = 0; k < nh; ++k) g[k][j] = prop.evolve(g[k][j], dt);
    }
    // alpha^t(A) x = e^{iHt} A e^{-iHt} x; f and g already carry e^{-iHt}.
    std::vector<Eigen::VectorXcd> x(nb);
    for (std::size_t j = 0; j < nb; ++j) x[j] = prop.evolve(prop.apply_prepared(ap, f[j]), -t);
    for (std::size_t k = 0; k < nh; ++k) {
      Eigen::MatrixXcd cols(rep.total_dim(), static_cast<Eigen::Index>(nb));
      for (std::size_t j = 0; j < nb; ++j) {
        const Eigen::VectorXcd y = prop.evolve(prop.apply_prepared(ap, g[k][j]), -t);
        cols.col(static_cast<Eigen::Index>(j)) = y - prop.apply_prepared(bp[k], x[j]);
      }
      const Eigen::MatrixXcd gram = cols.adjoint() * cols;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
      rows[k].push_back({h_grid[k], t, std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()))});
    }
  }
  for (auto& r : rows) scan.points.insert(scan.points.end(), r.begin(), r.end());
  return scan;
}

std::vector<Crossing> crossing_times(const ConeScan& scan, double threshold) {
  std::map<int, std::vector<std::pair<double, double>>> by_h;
  for (const auto& p : scan.points)
    if (p.h != 0) by_h[p.h].push_back({p.t, p.norm});
  std::vector<Crossing> out;
  for (auto& [h, series] : by_h) {
    std::sort(series.begin(), series.end());
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series[i].second <= threshold) continue;
      double tc = series[i].first;
      if (i > 0) {
        const auto [t0, n0] = series[i - 1];
        const auto [t1, n1] = series[i];
        tc = t0 + (threshold - n0) * (t1 - t0) / (n1 - n0);
      }
      out.push_back({h, tc});
      break;
    }
  }
  return out;
}

VelocityReport fit_velocity(const ConeScan& scan, double threshold) {
  if (!(threshold > 0.0)) throw InvalidArgument("fit_velocity: threshold must be positive");
  VelocityReport r;
  r.threshold = threshold;
  r.crossings = crossing_times(scan, threshold);

  std::vector<double> tc, hh;
  for (const auto& c : r.crossings) {
    tc.push_back(c.t);
    hh.push_back(std::abs(c.h));
  }
  std::sort(hh.begin(), hh.end());
  const bool distinct = std::unique(hh.begin(), hh.end()) - hh.begin() >= 3;
  if (r.crossings.size() >= 3 && distinct) {
    hh.clear();
    for (const auto& c : r.crossings) hh.push_back(std::abs(c.h));
    r.v_empirical = fit_line(tc, hh).slope;
    r.defined = std::isfinite(r.v_empirical);
  }

  if (r.defined) {
    std::vector<const ConePoint*> outside;
    for (const auto& p : scan.points)
      if (std::abs(p.h) > r.v_empirical * p.t + 1.0 && p.norm > 1e-13) outside.push_back(&p);
    r.outside_points = static_cast<int>(outside.size());
    if (outside.size() >= 3) {
      Eigen::MatrixXd x(outside.size(), 3);
      Eigen::VectorXd y(outside.size());
      for (std::size_t i = 0; i < outside.size(); ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = outside[i]->t;
        x(i, 2) = -std::abs(outside[i]->h);
        y(i) = std::log(outside[i]->norm);
      }
      const Eigen::Vector3d c = x.colPivHouseholderQr().solve(y);
      if (x.colPivHouseholderQr().rank() == 3) {
        r.C_fit = std::exp(c(0));
        r.M_fit = c(1);
        r.gamma_fit = c(2);
      }
    }
  }

  const ModelSpec& m = scan.model;
  if (m.a > 2.0 * std::abs(m.b)) {
    r.v_bound_quadratic = velocity_bound_quadratic(DispersionParams{m.a, m.b}, default_gamma_grid()).value;
    const HypothesisConstants hc = hypothesis_constants(m);
    std::vector<double> grid;
    for (double g : default_gamma_grid())
      if (hc.admits(g)) grid.push_back(g);
    if (!grid.empty()) r.v_bound_general = velocity_bound_general(hc, grid).value;
  }
  return r;
}

ConeBoundCheck check_cone_bound(const ConeScan& scan, double gamma, double C, double M, int ring_size,
                                double prefactor, double abs_floor) {
  ConeBoundCheck out;
  out.gamma = gamma;
  out.C = C;
  out.M = M;
  for (const auto& p : scan.points) {
    const int d = ring_size > 0 ? cyclic_distance(0, p.h, ring_size) : std::abs(p.h);
    const double rhs = prefactor * C * std::exp(M * std::abs(p.t) - gamma * d);
    ++out.checked;
    if (p.norm > rhs + abs_floor) ++out.violations;
    if (p.norm > abs_floor) out.max_ratio = std::max(out.max_ratio, p.norm / rhs);
  }
  return out;
}

std::vector<ConePoint> ray_scan_harmonic(const ModelSpec& spec, const PhasePoint& a, const PhasePoint& b,
                                         double v, double dt, int steps) {
  if (steps < 0 || !(dt > 0.0)) throw InvalidArgument("ray_scan_harmonic: need dt > 0 and steps >= 0");
  std::vector<ConePoint> out;
  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt;
    const int h = static_cast<int>(std::ceil(v * t - 1e-12));
    const ConeScan s = cone_scan_harmonic(spec, a, b, {h}, {t});
    if (s.points.empty()) throw InvalidArgument("ray_scan_harmonic: ray leaves the scanned region");
    out.push_back(s.points.front());
  }
  return out;
}

int strictly_decreasing_from(const std::vector<double>& values) {
  if (values.empty()) return -1;
  int start = static_cast<int>(values.size()) - 1;
  while (start > 0 && values[start - 1] > values[start]) --start;
  return start;
}

void write_csv(std::ostream& os, const ConeScan& scan) {
  os << "h,t,norm\n";
  for (const auto& p : scan.points) os << p.h << "," << format_double(p.t) << "," << format_double(p.norm) << "\n";
}

namespace {

double number_or_nan(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const ConeScan& s) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : s.points) pts.push_back({p.h, p.t, p.norm});
  j = nlohmann::json{{"model_id", s.model_id}, {"model", s.model},       {"a", s.a_desc},
                     {"b", s.b_desc},          {"source", to_string(s.source)}, {"columns", {"h", "t", "norm"}},
                     {"points", pts}};
}

void from_json(const nlohmann::json& j, ConeScan& s) {
  s.model_id = j.at("model_id").get<std::string>();
  s.model = j.at("model").get<ModelSpec>();
  s.a_desc = j.at("a").get<std::string>();
  s.b_desc = j.at("b").get<std::string>();
  s.source = scan_source_from_string(j.at("source").get<std::string>());
  s.points.clear();
  for (const auto& p : j.at("points")) s.points.push_back({p.at(0).get<int>(), p.at(1).get<double>(), p.at(2).get<double>()});
}

void to_json(nlohmann::json& j, const VelocityReport& r) {
  nlohmann::json cr = nlohmann::json::array();
  for (const auto& c : r.crossings) cr.push_back({c.h, c.t});
  j = nlohmann::json{{"defined", r.defined},
                     {"v_empirical", r.v_empirical},
                     {"threshold", r.threshold},
                     {"crossings", cr},
                     {"gamma_fit", r.gamma_fit},
                     {"M_fit", r.M_fit},
                     {"C_fit", r.C_fit},
                     {"outside_points", r.outside_points},
                     {"v_bound_quadratic", r.v_bound_quadratic},
                     {"v_bound_general", r.v_bound_general}};
}

void from_json(const nlohmann::json& j, VelocityReport& r) {
  r.defined = j.at("defined").get<bool>();
  r.v_empirical = number_or_nan(j, "v_empirical");
  r.threshold = j.at("threshold").get<double>();
  r.crossings.clear();
  for (const auto& c : j.at("crossings")) r.crossings.push_back({c.at(0).get<int>(), c.at(1).get<double>()});
  r.gamma_fit = number_or_nan(j, "gamma_fit");
  r.M_fit = number_or_nan(j, "M_fit");
  r.C_fit = number_or_nan(j, "C_fit");
  r.outside_points = j.value("outside_points", 0);
  r.v_bound_quadratic = number_or_nan(j, "v_bound_quadratic");
  r.v_bound_general = number_or_nan(j, "v_bound_general");
}

}  // namespace lrcone
