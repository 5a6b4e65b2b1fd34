#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dragforge/model.hpp"
#include "dragforge/optimizer.hpp"
#include "dragforge/pulses.hpp"

namespace dragforge {

std::string_view library_version();

enum class ExperimentKind { Sweep, Optimize, Populations, Dressing };

/// Invalid config; path is a JSON pointer to the offending field.
class SchemaError : public std::invalid_argument {
 public:
  SchemaError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class UnknownPreset : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::Sweep;
  std::optional<SystemSpec> spec;
  std::vector<DragVariant> variants;  // Sweep, Populations
  std::vector<ParameterMask> masks;   // Optimize
  AnsatzParams initial{};             // Optimize starting point
  std::vector<double> sigmas;         // strictly increasing
  double t_g_multiple = 4.0;
  double area = 3.14159265358979323846;
  int n_steps = 0;      // 0: pick per point by step doubling
  double tol = 1e-9;    // step-doubling tolerance
  int max_steps = 1 << 20;  // step-doubling cap
  int initial_level = 0;  // Populations
  double ratio_lo = -3.0, ratio_hi = 3.0, ratio_step = 0.01, pole_guard = 0.02;  // Dressing

  GaussianParams pulse(double sigma) const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& doc);
};

std::vector<std::string> preset_names();

/// Throws UnknownPreset listing the valid names.
ExperimentConfig preset(const std::string& name);

struct OutputFile {
  std::string name;
  std::string content;
};

struct ExperimentOutput {
  std::vector<OutputFile> files;  // CSVs, then the JSON manifest last
  nlohmann::json manifest;
};

/// Runs every point, fanning out over `jobs` worker threads. Rows come out in
/// config order regardless of completion order. ConvergenceFailure propagates.
ExperimentOutput run_experiment(const ExperimentConfig& config, int jobs);

void write_outputs(const ExperimentOutput& out, const std::filesystem::path& dir);

}  // namespace dragforge
