#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dragforge/model.hpp"
#include "dragforge/pulses.hpp"

namespace dragforge {

/// Uniform grid of n_steps intervals on [t0, t1].
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  int n_steps = 4096;

  static constexpr int kMinSteps = 16;

  static TimeGrid over(double t_g, int n_steps);
  double step() const { return (t1 - t0) / n_steps; }
  double node(int k) const { return k == n_steps ? t1 : t0 + k * step(); }
  double midpoint(int k) const { return t0 + (k + 0.5) * step(); }
  void validate() const;
};

/// Raised when a control sample is NaN or infinite.
class NonFiniteControl : public std::domain_error {
 public:
  NonFiniteControl(double t, const std::string& what);
  double time() const { return t_; }

 private:
  double t_;
};

/// Raised when the step-doubling loop hits its cap.
class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// U = prod_k exp(-i H(t_k^mid) dt), later steps on the left.
Matrix propagate(const HamiltonianGenerators& gen, const ControlSet& cs, const TimeGrid& grid);
Matrix propagate(const SystemSpec& spec, const ControlSet& cs, int n_steps);

struct PopulationTrace {
  std::vector<int> levels;  // signed labels, one per column
  std::vector<double> t;
  std::vector<std::vector<double>> p;  // p[k][j] = |<level_j|psi(t_k)>|^2

  /// Header `t,p<level>...`; negative labels keep their sign.
  std::string csv() const;
};

/// Probabilities at every grid node, starting from the given signed level.
PopulationTrace populations(const SystemSpec& spec, const ControlSet& cs, const TimeGrid& grid, int initial_level);

struct ConvergedUnitary {
  Matrix u;
  int n_steps;
  double last_change;
};

/// Doubles n_steps from `start` until max|U_2n - U_n| < tol and returns U_2n.
/// Throws ConvergenceFailure once 2n would exceed `cap`.
ConvergedUnitary converge(const SystemSpec& spec, const ControlSet& cs, double tol, int start = 256,
                          int cap = 1 << 20);

}  // namespace dragforge
