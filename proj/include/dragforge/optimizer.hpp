#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dragforge/model.hpp"
#include "dragforge/pulses.hpp"

namespace dragforge {

struct NelderMeadOptions {
  double tolerance = 1e-8;  // stop once the simplex diameter falls below this
  int max_evals = 4000;     // shared across the first descent and all restarts
  int restarts = 3;
  double relative_step = 0.05;  // initial simplex and restart perturbation
  double absolute_step = 0.05;  // used instead when a coordinate is zero
  std::uint64_t seed = 0x5eed5eedULL;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f;
  int evals;
  bool converged;
};

/// Simplex descent with reflection, expansion, contraction and shrink, followed by
/// restarts from the best vertex with a randomly signed perturbation. Non-finite
/// objective values count as +infinity.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& options);

/// Free/frozen flags for (alpha, beta, gamma, delta0).
using ParameterMask = std::array<bool, 4>;

/// e.g. "alpha+beta+delta0".
std::string mask_label(const ParameterMask& mask);
ParameterMask mask_from_label(const std::string& label);

struct OptimizeTask {
  SystemSpec spec;
  GaussianParams params;
  ParameterMask mask{true, false, false, false};
  AnsatzParams initial{};
  double tolerance = 1e-8;
  int max_evals = 4000;
  double propagation_tol = 1e-11;  // picks n_steps at the initial point when n_steps == 0
  int n_steps = 0;
  int max_steps = 1 << 20;  // step-doubling cap
  NelderMeadOptions search{};
};

struct OptimizeResult {
  AnsatzParams best;
  double gate_error = 1.0;
  double initial_error = 1.0;
  int n_evals = 0;
  bool converged = false;
  int n_steps = 0;

  nlohmann::json to_json() const;
};

/// Minimizes the NOT-gate error of the ansatz over the free parameters. All
/// evaluations share one step count, fixed before the search starts.
OptimizeResult optimize(const OptimizeTask& task);

/// Columns: sigma, mask, alpha, beta, gamma, delta0, gate_error, n_evals.
std::string optimize_csv_header();
std::string optimize_csv_row(double sigma, const ParameterMask& mask, const OptimizeResult& r);

}  // namespace dragforge
