#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dragforge/model.hpp"

namespace dragforge {

/// Pedestal-subtracted Gaussian on [0, t_g]; area is the rotation angle.
struct GaussianParams {
  double area = 3.14159265358979323846;
  double sigma = 1.0;
  double t_g = 4.0;

  /// t_g = 4 sigma, area pi (a NOT).
  static GaussianParams standard(double sigma);
  void validate() const;
};

struct EnvelopeSample {
  double value;
  double derivative;
  double second;
};

/// Omega_G(t) and its first two derivatives. Throws for t outside [0, t_g].
EnvelopeSample gaussian(const GaussianParams& p, double t);

enum class VariantKind { Gaussian0, ZOnly1, YOnly1, Optimal1, Drag1, ZOnly2, YOnly2, Drag2, Ansatz };

/// Ansatz: Omega_x = alpha Omega_G, Omega_y = -beta dOmega_G/Delta2,
/// delta = gamma Omega_G^2 / Delta2 + delta0.
struct AnsatzParams {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta0 = 0.0;
};

struct DragVariant {
  VariantKind kind = VariantKind::Gaussian0;
  AnsatzParams ansatz{};

  static DragVariant ansatz_of(AnsatzParams a) { return {VariantKind::Ansatz, a}; }
};

std::string_view to_string(VariantKind k);
VariantKind variant_from_string(std::string_view name);

/// Every closed-form control in this library is a combination of
///   Omega_x = x_linear Omega_G + x_cubic Omega_G^3
///   Omega_y = y_derivative dOmega_G/dt
///   delta   = detuning_quadratic Omega_G^2 + detuning_offset
struct ControlCoefficients {
  double x_linear = 1.0;
  double x_cubic = 0.0;
  double y_derivative = 0.0;
  double detuning_quadratic = 0.0;
  double detuning_offset = 0.0;
};

struct ControlSample {
  double omega_x;
  double omega_y;
  double delta;
  double d_omega_x;
  double d_omega_y;
  double d_delta;
};

/// Accumulated phase Phi(t) = int_0^t delta on a uniform table; evaluated by
/// cubic Hermite interpolation using Phi' = delta at the nodes.
struct PhaseTable {
  double step;
  std::vector<double> phi;
  std::vector<double> rate;

  double at(double t) const;
  double final_phase() const { return phi.back(); }
};

/// Three controls on [0, t_g] with analytic first derivatives. Immutable.
class ControlSet {
 public:
  ControlSet(GaussianParams params, DragVariant variant, ControlCoefficients coeffs);

  ControlSample at(double t) const;
  double omega_x(double t) const { return at(t).omega_x; }
  double omega_y(double t) const { return at(t).omega_y; }
  double delta(double t) const { return at(t).delta; }

  const GaussianParams& params() const { return params_; }
  double t_g() const { return params_.t_g; }
  const DragVariant& variant() const { return variant_; }
  const ControlCoefficients& coefficients() const { return coeffs_; }

  /// Non-null for phase-ramped controls; the detuning is then folded into the
  /// drive phase and delta() returns 0.
  const std::shared_ptr<const PhaseTable>& ramp() const { return ramp_; }
  bool is_ramped() const { return ramp_ != nullptr; }

  nlohmann::json describe() const;

 private:
  friend ControlSet phase_ramp(const ControlSet& cs, int n_steps);

  ControlSample base_at(double t) const;

  GaussianParams params_;
  DragVariant variant_;
  ControlCoefficients coeffs_;
  std::shared_ptr<const PhaseTable> ramp_;
};

/// Ladder closed forms for every variant; Gaussian0 and Ansatz work on any topology.
ControlSet build_controls(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params);

/// First-order variants ZOnly1, YOnly1, Optimal1 with leakage below (-1) and above (2).
ControlSet build_controls_intermediate(const SystemSpec& spec, const DragVariant& variant,
                                       const GaussianParams& params);

/// First-order variants ZOnly1, YOnly1, Optimal1 with level 1 coupled to every leakage level.
ControlSet build_controls_star(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params);

/// Dispatch on the spec topology.
ControlSet build_controls_any(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params);

/// sqrt(sum_k Delta2^2 lambda_{k-1}^2 / Delta_k^2) over the leakage levels of a star.
double effective_lambda(const SystemSpec& spec);

/// Folds delta into the drive phase:
///   Omega'_x = Omega_x cos Phi - Omega_y sin Phi,  Omega'_y = Omega_y cos Phi + Omega_x sin Phi
/// with Phi = int_0^t delta. Phi is tabulated by composite Simpson on the half-step
/// grid of an n_steps propagation, so the midpoint samples hit table nodes exactly.
/// The original gate is exp(-i Phi(t_g) h_z) times the ramped gate.
ControlSet phase_ramp(const ControlSet& cs, int n_steps);

/// Samples at n_samples equally spaced points including both ends.
/// Columns: t, omega_x, omega_y, delta.
std::string controls_csv(const ControlSet& cs, int n_samples);

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

}  // namespace dragforge
