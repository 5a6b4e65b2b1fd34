#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "json.hpp"

#include "dragforge/fidelity.hpp"
#include "dragforge/model.hpp"
#include "dragforge/propagator.hpp"
#include "dragforge/pulses.hpp"

namespace dragforge {

/// Dimensionless form of the rotating-frame problem. Time tau = t / t_g in [0, 1],
/// energies scaled by t_g, eps = 1/(t_g Delta2) (signed):
///   Hbar(tau) = h0 / eps + sum_n eps^n H^(n)(tau),
///   H^(n) = delta^(n) hz + Omega_x^(n)/2 hx + Omega_y^(n)/2 hy.
struct DimensionlessModel {
  double t_g;
  double delta2;
  double epsilon;
  Matrix h0;  // sum_k (Delta_k / Delta2) Pi_k over leakage levels
  Matrix hz;
  Matrix hx;
  Matrix hy;
  QubitIndices qubit;
  std::vector<int> leakage;  // dense indices of the non-qubit levels

  Matrix controls(double omega_x, double omega_y, double delta) const;
};

DimensionlessModel dimensionless_model(const SystemSpec& spec, double t_g);

/// Samples tau_k = k / n_steps, k = 0..n_steps, of a TimeGrid on [0, 1].
int sample_count(const TimeGrid& grid);

/// Order-n frame generator S^(n)(tau) on the grid nodes. `ds` holds dS/dtau when
/// it is known in closed form; otherwise it is empty and derivative() falls back to
/// fourth-order finite differences.
struct FrameTransform {
  int order = 1;
  double epsilon = 0.0;
  TimeGrid grid;
  MatrixSeries s;
  MatrixSeries ds;

  MatrixSeries derivative() const;
};

/// H^(0), H^(1), H^(2) of a closed-form or ansatz control set. Each coefficient
/// lands at the order its Delta2 power implies: Omega_x linear at 0, Omega_y and
/// delta at 1, the cubic Omega_x correction at 2. Phase-ramped controls are rejected.
std::array<MatrixSeries, 3> control_hamiltonians(const DimensionlessModel& model, const ControlSet& cs,
                                                 const TimeGrid& grid);

/// The s_y01 = -c t_g Omega_G choice behind each first-order variant.
double first_order_frame_coefficient(const SystemSpec& spec, VariantKind kind);

/// Published S^(1): s_y between each qubit level and each leakage level it couples
/// to, equal to -lambda t_g Omega_G Delta2 / (2 Delta_k), plus s_y01 = -c t_g Omega_G.
/// Throws for Gaussian0 and Ansatz.
FrameTransform frame_first_order(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params,
                                 const TimeGrid& grid);

/// Closed-form S^(2) entries between the qubit and level 2 of a ladder that follow
/// from S^(1) through the frame constraints:
///   s_y02 = -g lambda1 (g + s_y01) / 4,  s_x12 = lambda1 (dg + 2 ds_y01) / 2,
/// with g = t_g Omega_G and s_x01 = s_z = 0.
FrameTransform frame_second_order(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params,
                                  const TimeGrid& grid);

/// S^(n+1) from the frame constraints: S_jk = i <j|X|k> / h0_kk for qubit j and
/// leakage k, where X = H_extra^(n) + H^(n). Every other entry is zero.
FrameTransform solve_frame(const DimensionlessModel& model, int order, const MatrixSeries& x, const TimeGrid& grid);

/// H_extra^(n) for n in 0..3. frames[m - 1] holds S^(m) and must cover orders 1..n;
/// h_series[m] holds H^(m) and must cover orders 0..n-1.
MatrixSeries h_extra(int n, const std::vector<FrameTransform>& frames, const std::vector<MatrixSeries>& h_series,
                     const Matrix& h0, const TimeGrid& grid);

/// H_eff^(n) = H_extra^(n) + H^(n) + i[S^(n+1), h0]. Frames or controls beyond the
/// supplied lists count as zero.
MatrixSeries h_eff_order(int n, const std::vector<FrameTransform>& frames, const std::vector<MatrixSeries>& h_series,
                         const Matrix& h0, const TimeGrid& grid);

struct OrderResidual {
  int order = 0;
  double qubit_x = 0.0;  // max |Tr[H_eff sx01] - target|, target t_g Omega_G at order 0
  double qubit_y = 0.0;  // max |Tr[H_eff sy01]|
  double qubit_z = 0.0;  // max |Tr[H_eff (Pi0 - Pi1)]|
  double coupling = 0.0; // max |Tr[H_eff s^{x,y}_{j,k}]|, j qubit, k leakage
  bool coupling_frame_published = true;

  double qubit_block() const { return std::max({qubit_x, qubit_y, qubit_z}); }
};

struct ExpansionReport {
  std::string variant;
  double epsilon = 0.0;
  int n_points = 0;
  std::vector<OrderResidual> orders;

  nlohmann::json to_json() const;
};

/// Residuals of H_eff^(0..order) (order <= 2) for a variant's published controls and
/// frames. S^(1) is the published frame; S^(2) is the closed form on a ladder and
/// the constraint solution elsewhere; S^(3) is not published and is taken as zero,
/// so the order-2 coupling column is informational (coupling_frame_published = false).
/// Gaussian0 runs with no frames.
ExpansionReport constraint_residuals(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params,
                                     const TimeGrid& grid, int order);

/// Non-perturbative H_eff = A^dag Hbar A + i (dA^dag/dtau) A with A = exp(-i S),
/// in dimensionless units on the grid nodes. dA^dag/dtau by finite differences.
MatrixSeries h_eff_exact(const SystemSpec& spec, const ControlSet& cs, const MatrixSeries& s_total,
                         const TimeGrid& grid);

}  // namespace dragforge
