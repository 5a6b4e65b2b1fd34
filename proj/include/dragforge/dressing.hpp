#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace dragforge {

/// Multi-level oscillator coupled to a single resonator mode. Transition j is
/// (j-1) -> j for j = 1..d-1; g[j-1] is its vacuum Rabi coupling.
struct CavitySpec {
  double omega_r = 0.0;
  double omega = 0.0;
  std::vector<double> delta;  // bare Delta_0..Delta_{d-1}, Delta_0 = Delta_1 = 0
  std::vector<double> g;      // g_{0,1}, g_{1,2}, ...

  int dim() const { return static_cast<int>(delta.size()); }

  /// omega + Delta_j - Delta_{j-1}.
  double transition_frequency(int j) const;
  void validate() const;
};

/// Thrown when a transition sits on the resonator (or a formula hits its pole).
class ResonanceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// chi_{j-1,j} = g_{j-1,j}^2 / (omega'_{j-1,j} - omega_r).
double chi(const CavitySpec& cavity, int j);

struct DressedParams {
  double omega_tilde;
  std::vector<double> delta_tilde;  // Delta_j + chi_{j-1,j} - j chi_{0,1}, Delta_tilde_0 = 0
};

DressedParams dressed_params(const CavitySpec& cavity);

struct DressedCoupling {
  double lambda;        // lambda_{j-1}
  double drive_factor;  // g_{0,1} / (omega'_{0,1} - omega_r); the drive becomes E(t) = eps(t) * drive_factor
};

/// lambda_{j-1} = g_{j-1,j} (omega'_{0,1} - omega_r) / (g_{0,1} (omega'_{j-1,j} - omega_r)).
DressedCoupling lambda_dressed(const CavitySpec& cavity, int j);

/// SNO limit: lambda_{j-1} = sqrt(j) / (1 + (j-1) ratio), ratio = Delta2 / (omega - omega_r).
/// Throws ResonanceError at ratio = -1/(j-1), where the dispersive transform fails.
double lambda_sno(int j, double ratio);

/// |g_{j-1,j} / (omega'_{j-1,j} - omega_r)| on every transition, and whether any exceeds 0.1.
struct DispersiveCheck {
  double worst_ratio;
  bool valid;
};

inline constexpr double kDispersiveThreshold = 0.1;

DispersiveCheck dispersive_check(const CavitySpec& cavity);

/// SNO cavity with g_{j-1,j} = sqrt(j) g01 and omega'_{j-1,j} = omega + (j-1) delta2.
CavitySpec sno_cavity(int d, double omega, double omega_r, double delta2, double g01);

/// Rows of (ratio, lambda1 through the cavity, lambda1 for direct drive) for ratio in
/// [lo, hi] at the given step, skipping |ratio - pole| < guard.
struct LambdaCurvePoint {
  double ratio;
  double lambda_cavity;
  double lambda_direct;
};

std::vector<LambdaCurvePoint> lambda_curve(double lo, double hi, double step, double guard);

std::string lambda_curve_csv(const std::vector<LambdaCurvePoint>& points);

}  // namespace dragforge
