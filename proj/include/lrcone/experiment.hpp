#pragma once

// Experiment runner behind the command line tool: JSON configuration,
// dispatch to the library and CSV/JSON artifacts with a manifest.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lrcone/model.hpp"

namespace lrcone {

enum class ExperimentKind { Dispersion, HarmonicCone, FockCone, Converge, Norms, OdeCheck, CompressCheck };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

/// Missing grids are filled with per-experiment defaults by resolve_defaults().
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Dispersion;
  ModelSpec model;
  std::vector<double> t_grid;
  std::vector<int> h_grid;
  std::vector<double> gamma_grid;
  std::vector<int> d_grid;
  std::vector<int> m_values;  // converge: inner volumes
  double threshold = 1e-3;
  std::uint64_t seed = 20240611;
  int samples = 100;          // compress-check
  int block_quanta = 0;       // Fock block: total occupation <= block_quanta
  double basis_omega = 0.0;   // Fock reference frequency; 0 selects sqrt(a)
  int laurent_K = 20;         // dispersion
  double ode_step = 1e-3;     // odecheck
  int a_site = 0;             // label of the observable A
  double a_u = 1.0, a_v = 0.0;  // phase of A: exp(i(u Q + v P))
  double b_u = 1.0, b_v = 0.0;  // phase of B before shifting
  std::string out_dir = "out";
  nlohmann::json raw;         // the parsed document
};

/// Parses a JSON document. Syntax errors raise ConfigError with the line and
/// column; unknown experiments, bad grids and bad models raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Fills empty grids and model fields with the defaults of the experiment.
void resolve_defaults(ExperimentConfig& cfg, bool model_given = true);

/// Fock reference frequency used by the experiment.
double fock_omega(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the text.
std::uint64_t fnv1a64(const std::string& text);

/// Runs the experiment, writes its artifacts and manifest.json into out_dir
/// and returns the manifest.
nlohmann::json run_experiment(const ExperimentConfig& cfg);

}  // namespace lrcone
