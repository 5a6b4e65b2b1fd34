#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dragforge/experiment.hpp"
#include "dragforge/propagator.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kBadInput = 2, kNoConvergence = 3 };

int run(const std::string& preset_name, const std::string& config_path, int jobs, const std::string& out_dir,
        int steps) {
  using namespace dragforge;
  ExperimentConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot read config " << config_path << "\n";
        return kBadInput;
      }
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: " << config_path << " is not valid JSON: " << e.what() << "\n";
        return kBadInput;
      }
      config = ExperimentConfig::from_json(doc);
    } else {
      config = preset(preset_name);
    }
  } catch (const UnknownPreset& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const SchemaError& e) {
    std::cerr << "error: config field " << (e.path().empty() ? "/" : e.path()) << ": " << e.what() << "\n";
    return kBadInput;
  }
  if (steps > 0) {
    if (steps < TimeGrid::kMinSteps) {
      std::cerr << "error: --steps must be at least " << TimeGrid::kMinSteps << "\n";
      return kBadInput;
    }
    config.n_steps = steps;
  }

  try {
    const ExperimentOutput out = run_experiment(config, jobs);
    write_outputs(out, out_dir);
    for (const auto& f : out.files) std::cout << (std::filesystem::path(out_dir) / f.name).string() << "\n";
  } catch (const ConvergenceFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulse synthesis and gate-error sweeps for leakage-suppressed multi-level qubits"};
  app.require_subcommand(1);

  std::string preset_name, config_path, out_dir = ".";
  int jobs = 1, steps = 0;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a preset or a JSON experiment config");
  run_cmd->add_option("preset", preset_name, "Preset name");
  run_cmd->add_option("--config", config_path, "Path to a JSON experiment config");
  run_cmd->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out,-o", out_dir, "Output directory");
  run_cmd->add_option("--steps", steps, "Fixed integrator step count (default: step doubling)");

  CLI::App* list_cmd = app.add_subcommand("presets", "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kBadInput;
  }

  if (list_cmd->parsed()) {
    for (const auto& n : dragforge::preset_names()) std::cout << n << "\n";
    return kOk;
  }
  if (preset_name.empty() == config_path.empty()) {
    std::cerr << "error: give exactly one of a preset name or --config\n";
    return kBadInput;
  }
  return run(preset_name, config_path, jobs, out_dir, steps);
}
