#pragma once

#include <array>
#include <string>

#include "json.hpp"

#include "dragforge/model.hpp"
#include "dragforge/pulses.hpp"

namespace dragforge {

/// Dense row/column indices of the qubit levels 0 and 1.
using QubitIndices = std::array<int, 2>;
inline constexpr QubitIndices kDefaultQubit{0, 1};

/// The six axial Bloch states (+x, -x, +y, -y, |0>, |1>) embedded in d dimensions.
std::array<Matrix, 6> axial_states(int d, QubitIndices q = kDefaultQubit);

/// sigma_x on the qubit block, identity elsewhere.
Matrix ideal_not(int d, QubitIndices q = kDefaultQubit);

/// F = (1/6) sum_j Tr[U_ideal rho_j U_ideal^dag  U rho_j U^dag] over the axial states.
double average_gate_fidelity(const Matrix& u_actual, const Matrix& u_ideal, QubitIndices q = kDefaultQubit);

struct FidelityReport {
  double f_gate = 0.0;
  double gate_error = 1.0;
  std::string variant;
  double sigma = 0.0;
  double t_g = 0.0;
  int n_steps = 0;

  nlohmann::json to_json() const;
};

/// NOT-gate report for controls propagated with a fixed step count.
FidelityReport not_gate_report(const SystemSpec& spec, const ControlSet& cs, int n_steps);

/// Same, with the step count chosen by converge(spec, cs, tol).
FidelityReport not_gate_report_converged(const SystemSpec& spec, const ControlSet& cs, double tol,
                                         int max_steps = 1 << 20);

/// Diagnostic only: the error after the best virtual-Z correction exp(-i theta Pi_1)
/// applied to the output. Never used for headline numbers.
double phase_optimized_error(const Matrix& u_actual, const Matrix& u_ideal, QubitIndices q = kDefaultQubit);

}  // namespace dragforge
