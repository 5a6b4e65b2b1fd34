#include "dragforge/adiabatic.hpp"

#include <cmath>
#include <stdexcept>

namespace dragforge {

namespace {

const Complex kI(0.0, 1.0);

Matrix C(const Matrix& a, const Matrix& b) { return commutator(a, b); }

struct EnvelopeSeries {
  std::vector<double> g, dg, ddg;  // t_g Omega_G and its tau derivatives
};

EnvelopeSeries envelope_series(const GaussianParams& p, const TimeGrid& grid) {
  EnvelopeSeries e;
  const double tg = p.t_g;
  for (int k = 0; k < sample_count(grid); ++k) {
    const EnvelopeSample s = gaussian(p, grid.node(k) * tg);
    e.g.push_back(tg * s.value);
    e.dg.push_back(tg * tg * s.derivative);
    e.ddg.push_back(tg * tg * tg * s.second);
  }
  return e;
}

void check_unit_grid(const TimeGrid& grid) {
  grid.validate();
  if (grid.t0 != 0.0 || grid.t1 != 1.0) throw std::invalid_argument("adiabatic grids run over tau in [0, 1]");
}

// s_y sigma^y_{a,b} adds -i s at (a, b) and +i s at (b, a).
void add_sy(Matrix& m, int a, int b, double s) {
  m(a, b) += -kI * s;
  m(b, a) += kI * s;
}

void add_sx(Matrix& m, int a, int b, double s) {
  m(a, b) += s;
  m(b, a) += s;
}

const Matrix& at_or_zero(const std::vector<MatrixSeries>& series, std::size_t order, int k, const Matrix& zero) {
  return order < series.size() && !series[order].empty() ? series[order][k] : zero;
}

// Mixing parameter B and the Optimal1 scale L of the first-order family:
// delta^(1) = 2 s_y01 g + B g^2 / 4 and the optimal frame has c = L / 4.
std::pair<double, double> family_constants(const SystemSpec& spec) {
  const double d2 = spec.reference_anharmonicity();
  switch (spec.topology()) {
    case Topology::Ladder: {
      const double l = spec.lambda(1);
      return {l * l, l};
    }
    case Topology::Intermediate: {
      const double lp = spec.lambda(1), lm = spec.lambda(-1);
      const double r = d2 / spec.anharmonicity(-1);
      return {lp * lp - r * lm * lm, std::sqrt(lp * lp + r * r * lm * lm)};
    }
    case Topology::Star: {
      double sum = 0.0;
      for (int k = 2; k < spec.dim(); ++k) sum += spec.lambda(k - 1) * spec.lambda(k - 1) / spec.anharmonicity(k);
      return {d2 * sum, effective_lambda(spec)};
    }
  }
  return {0.0, 0.0};
}

}  // namespace

Matrix DimensionlessModel::controls(double omega_x, double omega_y, double delta) const {
  return delta * hz + (0.5 * omega_x) * hx + (0.5 * omega_y) * hy;
}

DimensionlessModel dimensionless_model(const SystemSpec& spec, double t_g) {
  if (!(t_g > 0.0)) throw std::invalid_argument("dimensionless_model: t_g must be positive");
  const HamiltonianGenerators gen = generators(spec);
  const double d2 = spec.reference_anharmonicity();
  DimensionlessModel m{t_g, d2, 1.0 / (t_g * d2), gen.h_drift / d2, gen.h_z, gen.h_x, gen.h_y,
                       spec.qubit_indices(), {}};
  for (int i = 0; i < spec.dim(); ++i) {
    if (i != m.qubit[0] && i != m.qubit[1]) m.leakage.push_back(i);
  }
  return m;
}

int sample_count(const TimeGrid& grid) { return grid.n_steps + 1; }

MatrixSeries FrameTransform::derivative() const {
  if (!ds.empty()) return ds;
  return differentiate(s, grid.step());
}

std::array<MatrixSeries, 3> control_hamiltonians(const DimensionlessModel& model, const ControlSet& cs,
                                                 const TimeGrid& grid) {
  check_unit_grid(grid);
  if (cs.is_ramped()) throw std::invalid_argument("control_hamiltonians: phase-ramped controls have no order split");
  const ControlCoefficients& c = cs.coefficients();
  const EnvelopeSeries e = envelope_series(cs.params(), grid);
  const double d2 = model.delta2, tg = cs.t_g();
  std::array<MatrixSeries, 3> h;
  for (int k = 0; k < sample_count(grid); ++k) {
    const double g = e.g[k];
    h[0].push_back(model.controls(c.x_linear * g, 0.0, 0.0));
    h[1].push_back(model.controls(0.0, d2 * c.y_derivative * e.dg[k],
                                  d2 * c.detuning_quadratic * g * g + d2 * tg * tg * c.detuning_offset));
    h[2].push_back(model.controls(d2 * d2 * c.x_cubic * g * g * g, 0.0, 0.0));
  }
  return h;
}

double first_order_frame_coefficient(const SystemSpec& spec, VariantKind kind) {
  const auto [b, l] = family_constants(spec);
  switch (kind) {
    case VariantKind::ZOnly1:
    case VariantKind::ZOnly2:
      return 0.0;
    case VariantKind::YOnly1:
    case VariantKind::YOnly2:
      return b / 8.0;
    case VariantKind::Optimal1:
      return l / 4.0;
    case VariantKind::Drag1:
    case VariantKind::Drag2:
      if (spec.topology() != Topology::Ladder) break;
      return 0.5;
    default:
      break;
  }
  throw std::invalid_argument("no published first-order frame for " + std::string(to_string(kind)) + " on a " +
                              std::string(to_string(spec.topology())));
}

FrameTransform frame_first_order(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params,
                                 const TimeGrid& grid) {
  check_unit_grid(grid);
  const double c = first_order_frame_coefficient(spec, variant.kind);
  const DimensionlessModel model = dimensionless_model(spec, params.t_g);
  const EnvelopeSeries e = envelope_series(params, grid);
  const int d = spec.dim();

  // Unit-envelope template: S^(1) = g * T, dS^(1)/dtau = dg * T.
  Matrix tmpl = Matrix::Zero(d, d);
  for (const Transition& t : spec.transitions()) {
    const int a = spec.index_of(t.lower), b = spec.index_of(t.upper);
    const bool a_qubit = a == model.qubit[0] || a == model.qubit[1];
    const bool b_qubit = b == model.qubit[0] || b == model.qubit[1];
    if (a_qubit == b_qubit) continue;
    const int j = a_qubit ? a : b, k = a_qubit ? b : a;
    add_sy(tmpl, j, k, -t.weight / (2.0 * model.h0(k, k).real()));
  }
  add_sy(tmpl, model.qubit[0], model.qubit[1], -c);

  FrameTransform f{1, model.epsilon, grid, {}, {}};
  for (int k = 0; k < sample_count(grid); ++k) {
    f.s.push_back(e.g[k] * tmpl);
    f.ds.push_back(e.dg[k] * tmpl);
  }
  return f;
}

FrameTransform frame_second_order(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params,
                                  const TimeGrid& grid) {
  check_unit_grid(grid);
  if (spec.topology() != Topology::Ladder) {
    throw std::invalid_argument("frame_second_order: closed forms exist for ladders only");
  }
  const double c = first_order_frame_coefficient(spec, variant.kind);
  const double l1 = spec.lambda(1);
  const EnvelopeSeries e = envelope_series(params, grid);
  const int d = spec.dim();
  FrameTransform f{2, 1.0 / (params.t_g * spec.reference_anharmonicity()), grid, {}, {}};
  for (int k = 0; k < sample_count(grid); ++k) {
    const double g = e.g[k], dg = e.dg[k], ddg = e.ddg[k];
    Matrix s = Matrix::Zero(d, d), ds = Matrix::Zero(d, d);
    add_sy(s, 0, 2, -0.25 * l1 * (1.0 - c) * g * g);
    add_sy(ds, 0, 2, -0.5 * l1 * (1.0 - c) * g * dg);
    add_sx(s, 1, 2, 0.5 * l1 * (1.0 - 2.0 * c) * dg);
    add_sx(ds, 1, 2, 0.5 * l1 * (1.0 - 2.0 * c) * ddg);
    f.s.push_back(std::move(s));
    f.ds.push_back(std::move(ds));
  }
  return f;
}

FrameTransform solve_frame(const DimensionlessModel& model, int order, const MatrixSeries& x, const TimeGrid& grid) {
  FrameTransform f{order, model.epsilon, grid, {}, {}};
  const int d = static_cast<int>(model.h0.rows());
  for (const Matrix& xk : x) {
    Matrix s = Matrix::Zero(d, d);
    for (int j : model.qubit) {
      for (int k : model.leakage) {
        s(j, k) = kI * xk(j, k) / model.h0(k, k).real();
        s(k, j) = std::conj(s(j, k));
      }
    }
    f.s.push_back(std::move(s));
  }
  return f;
}

MatrixSeries h_extra(int n, const std::vector<FrameTransform>& frames, const std::vector<MatrixSeries>& h_series,
                     const Matrix& h0, const TimeGrid& grid) {
  if (n < 0 || n > 3) throw std::invalid_argument("h_extra: order must be in 0..3");
  const int count = sample_count(grid);
  const Matrix zero = Matrix::Zero(h0.rows(), h0.cols());
  if (n == 0) return MatrixSeries(count, zero);
  if (static_cast<int>(frames.size()) < n) {
    throw std::invalid_argument("h_extra: order " + std::to_string(n) + " needs frames S^(1)..S^(" +
                                std::to_string(n) + ")");
  }
  if (static_cast<int>(h_series.size()) < n) {
    throw std::invalid_argument("h_extra: order " + std::to_string(n) + " needs controls H^(0)..H^(" +
                                std::to_string(n - 1) + ")");
  }
  for (int m = 0; m < n; ++m) {
    if (static_cast<int>(frames[m].s.size()) != count) throw std::invalid_argument("h_extra: frame length mismatch");
  }

  std::vector<MatrixSeries> dots;
  for (int m = 0; m < n; ++m) dots.push_back(frames[m].derivative());

  MatrixSeries out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const Matrix& s1 = frames[0].s[k];
    const Matrix& ds1 = dots[0][k];
    const Matrix& c0 = at_or_zero(h_series, 0, k, zero);
    const Matrix s1h0 = C(s1, h0);
    if (n == 1) {
      out.push_back(kI * C(s1, c0) - 0.5 * C(s1, s1h0) - ds1);
      continue;
    }
    const Matrix& s2 = frames[1].s[k];
    const Matrix& ds2 = dots[1][k];
    const Matrix& c1 = at_or_zero(h_series, 1, k, zero);
    const Matrix s2h0 = C(s2, h0);
    const Matrix s1s1h0 = C(s1, s1h0);
    if (n == 2) {
      out.push_back(kI * C(s2, c0) + kI * C(s1, c1) - 0.5 * C(s1, C(s1, c0)) - 0.5 * C(s1, s2h0) -
                    0.5 * C(s2, s1h0) - (kI / 6.0) * C(s1, s1s1h0) + (0.5 * kI) * C(ds1, s1) - ds2);
      continue;
    }
    const Matrix& s3 = frames[2].s[k];
    const Matrix& ds3 = dots[2][k];
    const Matrix& c2 = at_or_zero(h_series, 2, k, zero);
    out.push_back(kI * C(s3, c0) + kI * C(s2, c1) + kI * C(s1, c2) - 0.5 * C(s1, C(s1, c1)) -
                  0.5 * C(s1, C(s2, c0)) - 0.5 * C(s2, C(s1, c0)) - (kI / 6.0) * C(s1, C(s1, C(s1, c0))) -
                  0.5 * C(s1, C(s3, h0)) - 0.5 * C(s3, s1h0) - 0.5 * C(s2, s2h0) -
                  (kI / 6.0) * (C(s1, C(s1, s2h0)) + C(s2, s1s1h0) + C(s1, C(s2, s1h0))) +
                  C(s1, C(s1, s1s1h0)) / 24.0 + (0.5 * kI) * (C(ds1, s2) + C(ds2, s1)) - C(s1, C(ds1, s1)) / 6.0 -
                  ds3);
  }
  return out;
}

MatrixSeries h_eff_order(int n, const std::vector<FrameTransform>& frames, const std::vector<MatrixSeries>& h_series,
                         const Matrix& h0, const TimeGrid& grid) {
  const int count = sample_count(grid);
  const Matrix zero = Matrix::Zero(h0.rows(), h0.cols());
  std::vector<FrameTransform> padded = frames;
  while (static_cast<int>(padded.size()) < n + 1) {
    const int order = static_cast<int>(padded.size()) + 1;
    padded.push_back({order, 0.0, grid, MatrixSeries(count, zero), MatrixSeries(count, zero)});
  }
  std::vector<MatrixSeries> controls = h_series;
  while (static_cast<int>(controls.size()) < n + 1) controls.emplace_back(count, zero);

  MatrixSeries out = h_extra(n, padded, controls, h0, grid);
  for (int k = 0; k < count; ++k) out[k] += controls[n][k] + kI * C(padded[n].s[k], h0);
  return out;
}

nlohmann::json ExpansionReport::to_json() const {
  nlohmann::json doc;
  doc["variant"] = variant;
  doc["epsilon"] = epsilon;
  doc["grid"] = {{"tau0", 0.0}, {"tau1", 1.0}, {"n_points", n_points}};
  doc["orders"] = nlohmann::json::array();
  for (const auto& r : orders) {
    doc["orders"].push_back({{"order", r.order},
                             {"qubit_x", r.qubit_x},
                             {"qubit_y", r.qubit_y},
                             {"qubit_z", r.qubit_z},
                             {"qubit_block", r.qubit_block()},
                             {"coupling", r.coupling},
                             {"coupling_frame_published", r.coupling_frame_published}});
  }
  return doc;
}

ExpansionReport constraint_residuals(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params,
                                     const TimeGrid& grid, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("constraint_residuals: order must be in 0..2");
  check_unit_grid(grid);
  const DimensionlessModel model = dimensionless_model(spec, params.t_g);
  const ControlSet cs = build_controls_any(spec, variant, params);
  const auto ordered = control_hamiltonians(model, cs, grid);
  const std::vector<MatrixSeries> h_series(ordered.begin(), ordered.end());
  const EnvelopeSeries e = envelope_series(params, grid);

  std::vector<FrameTransform> frames;
  if (variant.kind != VariantKind::Gaussian0) {
    frames.push_back(frame_first_order(spec, variant, params, grid));
    if (order >= 1) {
      const MatrixSeries x1 = h_extra(1, frames, h_series, model.h0, grid);
      MatrixSeries sum(x1.size());
      for (std::size_t k = 0; k < x1.size(); ++k) sum[k] = x1[k] + h_series[1][k];
      FrameTransform s2 = solve_frame(model, 2, sum, grid);
      if (spec.topology() == Topology::Ladder) {
        const FrameTransform pub = frame_second_order(spec, variant, params, grid);
        for (std::size_t k = 0; k < s2.s.size(); ++k) {
          for (int j : {0, 1}) {
            s2.s[k](j, 2) = pub.s[k](j, 2);
            s2.s[k](2, j) = pub.s[k](2, j);
          }
        }
      }
      frames.push_back(std::move(s2));
    }
  }

  ExpansionReport report;
  report.variant = std::string(to_string(variant.kind));
  report.epsilon = model.epsilon;
  report.n_points = sample_count(grid);
  const int q0 = model.qubit[0], q1 = model.qubit[1];
  for (int n = 0; n <= order; ++n) {
    const MatrixSeries heff = h_eff_order(n, frames, h_series, model.h0, grid);
    OrderResidual r;
    r.order = n;
    r.coupling_frame_published = n + 1 <= static_cast<int>(frames.size());
    for (std::size_t k = 0; k < heff.size(); ++k) {
      const Matrix& h = heff[k];
      const double target = n == 0 ? e.g[k] : 0.0;
      r.qubit_x = std::max(r.qubit_x, std::abs(2.0 * h(q0, q1).real() - target));
      r.qubit_y = std::max(r.qubit_y, std::abs(2.0 * h(q0, q1).imag()));
      r.qubit_z = std::max(r.qubit_z, std::abs((h(q0, q0) - h(q1, q1)).real()));
      for (int j : model.qubit) {
        for (int l : model.leakage) {
          r.coupling = std::max({r.coupling, std::abs(2.0 * h(j, l).real()), std::abs(2.0 * h(j, l).imag())});
        }
      }
    }
    report.orders.push_back(r);
  }
  return report;
}

MatrixSeries h_eff_exact(const SystemSpec& spec, const ControlSet& cs, const MatrixSeries& s_total,
                         const TimeGrid& grid) {
  check_unit_grid(grid);
  const int count = sample_count(grid);
  if (static_cast<int>(s_total.size()) != count) throw std::invalid_argument("h_eff_exact: S length mismatch");
  const HamiltonianGenerators gen = generators(spec);
  const double tg = cs.t_g();
  MatrixSeries a, a_dag;
  for (const Matrix& s : s_total) {
    a.push_back(expm_hermitian(s, 1.0));
    a_dag.push_back(expm_hermitian(s, -1.0));
  }
  const MatrixSeries da_dag = differentiate(a_dag, grid.step());
  MatrixSeries out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const ControlSample c = cs.at(grid.node(k) * tg);
    const Matrix h = tg * hamiltonian_at(gen, c.delta, c.omega_x, c.omega_y);
    out.push_back(a_dag[k] * h * a[k] + kI * da_dag[k] * a[k]);
  }
  return out;
}

}  // namespace dragforge
