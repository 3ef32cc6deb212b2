#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "lrcone/dispersion.hpp"
#include "lrcone/errors.hpp"
#include "lrcone/experiment.hpp"
#include "lrcone/harmonic.hpp"
#include "lrcone/lightcone.hpp"
#include "lrcone/model.hpp"

namespace py = pybind11;
using namespace lrcone;

namespace {

ModelSpec model_from(const std::string& text) {
  try {
    return nlohmann::json::parse(text).get<ModelSpec>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("model: ") + e.what());
  }
}

py::dict matrices_dict(const EvolutionMatrices& e) {
  py::dict d;
  d["t"] = e.t;
  d["A"] = e.A;
  d["B"] = e.B;
  d["Adot"] = e.Adot;
  d["Bdot"] = e.Bdot;
  return d;
}

EvolutionMatrices evolution(const ModelSpec& m, double t, const std::string& source) {
  if (source == "spectral") return evolve_matrices_spectral(build_coupling(m), t);
  if (source == "circulant") return evolve_matrices_circulant(m, t);
  throw InvalidArgument("unknown evolution source '" + source + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Light-cone estimates for anharmonic oscillator chains.";
  m.attr("__version__") = LRCONE_VERSION;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base.ptr());
  py::register_exception<CertificationFailure>(m, "CertificationFailure", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def(
      "coupling_matrix", [](const std::string& model) { return build_coupling(model_from(model)).W; },
      py::arg("model"), "Coupling matrix W of a model given as JSON.");

  m.def(
      "evolution_matrices",
      [](const std::string& model, double t, const std::string& source) {
        return matrices_dict(evolution(model_from(model), t, source));
      },
      py::arg("model"), py::arg("t"), py::arg("source") = "spectral",
      "A, B and their time derivatives at time t ('spectral' or 'circulant').");

  m.def(
      "weyl_commutator_norm",
      [](const std::string& model, double t, const Eigen::VectorXd& au, const Eigen::VectorXd& av,
         const Eigen::VectorXd& bu, const Eigen::VectorXd& bv) {
        const EvolutionMatrices e = evolve_matrices_spectral(build_coupling(model_from(model)), t);
        return weyl_commutator_norm_exact(e, PhasePoint(au, av), PhasePoint(bu, bv));
      },
      py::arg("model"), py::arg("t"), py::arg("a_u"), py::arg("a_v"), py::arg("b_u"), py::arg("b_v"),
      "Exact commutator norm of two evolved Weyl operators.");

  m.def(
      "velocity_bound_quadratic",
      [](double a, double b) {
        const QuadraticVelocity q = velocity_bound_quadratic(DispersionParams{a, b}, default_gamma_grid());
        return py::dict(py::arg("value") = q.value, py::arg("gamma") = q.gamma,
                        py::arg("group_velocity") = q.group_velocity);
      },
      py::arg("a"), py::arg("b"), "min over gamma of M(gamma)/gamma for the quadratic chain.");

  m.def(
      "cone_scan_harmonic",
      [](const std::string& model, const Eigen::VectorXd& au, const Eigen::VectorXd& av,
         const Eigen::VectorXd& bu, const Eigen::VectorXd& bv, const std::vector<int>& h_grid,
         const std::vector<double>& t_grid) {
        const ConeScan s = cone_scan_harmonic(model_from(model), PhasePoint(au, av), PhasePoint(bu, bv), h_grid, t_grid);
        return nlohmann::json(s).dump();
      },
      py::arg("model"), py::arg("a_u"), py::arg("a_v"), py::arg("b_u"), py::arg("b_v"), py::arg("h_grid"),
      py::arg("t_grid"), "Exact harmonic cone scan as a JSON document.");

  m.def(
      "fit_velocity",
      [](const std::string& scan, double threshold) {
        ConeScan s;
        try {
          s = nlohmann::json::parse(scan).get<ConeScan>();
        } catch (const nlohmann::json::exception& e) {
          throw InvalidArgument(std::string("scan: ") + e.what());
        }
        return nlohmann::json(fit_velocity(s, threshold)).dump();
      },
      py::arg("scan"), py::arg("threshold"), "Velocity report of a JSON cone scan.");

  m.def(
      "run_experiment",
      [](const std::string& config, const std::string& out_dir) {
        ExperimentConfig cfg = parse_config(config);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        nlohmann::json manifest;
        {
          py::gil_scoped_release release;
          manifest = run_experiment(cfg);
        }
        return manifest.dump();
      },
      py::arg("config"), py::arg("out_dir") = "", "Runs an experiment and returns its manifest as JSON.");
}
