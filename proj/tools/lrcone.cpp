// lrcone run --config path.json [--out dir] [--experiment name]

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lrcone/errors.hpp"
#include "lrcone/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitCertification = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light-cone experiments for oscillator chains"};
  app.set_version_flag("--version", std::string(LRCONE_VERSION));
  app.require_subcommand(1);

  std::string config_path, out_dir, experiment;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON configuration");
  run->add_option("--config", config_path, "Configuration file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the configuration)");
  run->add_option("--experiment", experiment, "Experiment name (overrides the configuration)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    lrcone::ExperimentConfig cfg = lrcone::load_config(config_path);
    if (!experiment.empty()) {
      // Re-resolve defaults for the overriding experiment.
      cfg.raw["experiment"] = experiment;
      cfg = lrcone::parse_config(cfg.raw.dump());
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    const auto manifest = lrcone::run_experiment(cfg);
    std::cout << manifest["headline"].dump(2) << "\n";
    std::cout << "wrote " << cfg.out_dir << "/manifest.json\n";
    return 0;
  } catch (const lrcone::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lrcone::InvalidArgument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lrcone::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const lrcone::CertificationFailure& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return kExitCertification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
