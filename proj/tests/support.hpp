#pragma once

// Shared test helpers that drive the library; the pure references live in oracles.hpp.

#include <cmath>
#include <vector>

#include "dragforge/adiabatic.hpp"

namespace support {

using namespace dragforge;

// max_tau |H_eff exact - (h0/eps + sum_{m<=order} eps^m H_eff^(m))| for the published
// ladder frames S^(1) (and S^(2) from order 1 on), in dimensionless units.
inline double truncation_gap(const SystemSpec& spec, VariantKind kind, double sigma, int order, int n_steps) {
  const GaussianParams p = GaussianParams::standard(sigma);
  const DimensionlessModel model = dimensionless_model(spec, p.t_g);
  const ControlSet cs = build_controls(spec, {kind, {}}, p);
  const TimeGrid grid{0.0, 1.0, n_steps};
  const auto ordered = control_hamiltonians(model, cs, grid);
  const std::vector<MatrixSeries> h(ordered.begin(), ordered.end());
  std::vector<FrameTransform> frames{frame_first_order(spec, {kind, {}}, p, grid)};
  if (order >= 1) frames.push_back(frame_second_order(spec, {kind, {}}, p, grid));

  const double eps = model.epsilon;
  const int count = sample_count(grid);
  MatrixSeries s_total(count), truncated(count);
  for (int k = 0; k < count; ++k) {
    s_total[k] = Matrix::Zero(spec.dim(), spec.dim());
    for (std::size_t m = 0; m < frames.size(); ++m) s_total[k] += std::pow(eps, m + 1) * frames[m].s[k];
    truncated[k] = model.h0 / eps;
  }
  for (int m = 0; m <= order; ++m) {
    const MatrixSeries term = h_eff_order(m, frames, h, model.h0, grid);
    for (int k = 0; k < count; ++k) truncated[k] += std::pow(eps, m) * term[k];
  }
  return max_abs_difference(h_eff_exact(spec, cs, s_total, grid), truncated);
}

// Least-squares slope of log y against log x.
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace support
