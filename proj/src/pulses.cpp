#include "dragforge/pulses.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dragforge {

GaussianParams GaussianParams::standard(double sigma) {
  GaussianParams p;
  p.sigma = sigma;
  p.t_g = 4.0 * sigma;
  p.validate();
  return p;
}

void GaussianParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("gaussian: sigma must be positive");
  if (!(t_g > 0.0) || !std::isfinite(t_g)) throw std::invalid_argument("gaussian: t_g must be positive");
  if (!std::isfinite(area)) throw std::invalid_argument("gaussian: area must be finite");
}

EnvelopeSample gaussian(const GaussianParams& p, double t) {
  const double slack = 1e-12 * p.t_g;
  if (t < -slack || t > p.t_g + slack) {
    throw std::out_of_range("gaussian: t = " + format_double(t) + " outside [0, " + format_double(p.t_g) + "]");
  }
  t = std::clamp(t, 0.0, p.t_g);
  const double s2 = p.sigma * p.sigma;
  const double pedestal = std::exp(-p.t_g * p.t_g / (8.0 * s2));
  const double norm = std::sqrt(2.0 * M_PI * s2) * std::erf(p.t_g / (std::sqrt(8.0) * p.sigma)) - p.t_g * pedestal;
  const double u = t - 0.5 * p.t_g;
  const double e = std::exp(-u * u / (2.0 * s2));
  const double a = p.area / norm;
  return {a * (e - pedestal), -a * e * u / s2, a * e * (u * u / (s2 * s2) - 1.0 / s2)};
}

namespace {

constexpr std::pair<VariantKind, std::string_view> kVariantNames[] = {
    {VariantKind::Gaussian0, "Gaussian0"}, {VariantKind::ZOnly1, "ZOnly1"},   {VariantKind::YOnly1, "YOnly1"},
    {VariantKind::Optimal1, "Optimal1"},   {VariantKind::Drag1, "Drag1"},     {VariantKind::ZOnly2, "ZOnly2"},
    {VariantKind::YOnly2, "YOnly2"},       {VariantKind::Drag2, "Drag2"},     {VariantKind::Ansatz, "Ansatz"},
};

}  // namespace

std::string_view to_string(VariantKind k) {
  for (const auto& [kind, name] : kVariantNames) {
    if (kind == k) return name;
  }
  return "unknown";
}

VariantKind variant_from_string(std::string_view name) {
  for (const auto& [kind, n] : kVariantNames) {
    if (n == name) return kind;
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

double PhaseTable::at(double t) const {
  const int last = static_cast<int>(phi.size()) - 1;
  const double x = t / step;
  const int i = std::clamp(static_cast<int>(std::floor(x)), 0, last - 1);
  const double s = x - i;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * phi[i] + h10 * step * rate[i] + h01 * phi[i + 1] + h11 * step * rate[i + 1];
}

ControlSet::ControlSet(GaussianParams params, DragVariant variant, ControlCoefficients coeffs)
    : params_(params), variant_(variant), coeffs_(coeffs) {
  params_.validate();
  const double c[] = {coeffs.x_linear, coeffs.x_cubic, coeffs.y_derivative, coeffs.detuning_quadratic,
                      coeffs.detuning_offset};
  for (double v : c) {
    if (!std::isfinite(v)) throw std::invalid_argument("control coefficients must be finite");
  }
}

ControlSample ControlSet::base_at(double t) const {
  const EnvelopeSample g = gaussian(params_, t);
  const ControlCoefficients& c = coeffs_;
  const double g2 = g.value * g.value;
  return {c.x_linear * g.value + c.x_cubic * g2 * g.value,
          c.y_derivative * g.derivative,
          c.detuning_quadratic * g2 + c.detuning_offset,
          (c.x_linear + 3.0 * c.x_cubic * g2) * g.derivative,
          c.y_derivative * g.second,
          2.0 * c.detuning_quadratic * g.value * g.derivative};
}

ControlSample ControlSet::at(double t) const {
  const ControlSample b = base_at(t);
  if (!ramp_) return b;
  const double phi = ramp_->at(t);
  const double cs = std::cos(phi), sn = std::sin(phi);
  const double w = b.delta;
  return {b.omega_x * cs - b.omega_y * sn,
          b.omega_y * cs + b.omega_x * sn,
          0.0,
          b.d_omega_x * cs - b.omega_x * sn * w - b.d_omega_y * sn - b.omega_y * cs * w,
          b.d_omega_y * cs - b.omega_y * sn * w + b.d_omega_x * sn + b.omega_x * cs * w,
          0.0};
}

nlohmann::json ControlSet::describe() const {
  nlohmann::json doc;
  doc["variant"] = std::string(to_string(variant_.kind));
  if (variant_.kind == VariantKind::Ansatz) {
    doc["ansatz"] = {{"alpha", variant_.ansatz.alpha},
                     {"beta", variant_.ansatz.beta},
                     {"gamma", variant_.ansatz.gamma},
                     {"delta0", variant_.ansatz.delta0}};
  }
  doc["area"] = params_.area;
  doc["sigma"] = params_.sigma;
  doc["t_g"] = params_.t_g;
  doc["coefficients"] = {{"x_linear", coeffs_.x_linear},
                         {"x_cubic", coeffs_.x_cubic},
                         {"y_derivative", coeffs_.y_derivative},
                         {"detuning_quadratic", coeffs_.detuning_quadratic},
                         {"detuning_offset", coeffs_.detuning_offset}};
  doc["phase_ramped"] = is_ramped();
  return doc;
}

namespace {

ControlCoefficients ansatz_coefficients(const AnsatzParams& a, double delta2) {
  for (double v : {a.alpha, a.beta, a.gamma, a.delta0}) {
    if (!std::isfinite(v)) throw std::invalid_argument("ansatz parameters must be finite");
  }
  ControlCoefficients c;
  c.x_linear = a.alpha;
  c.y_derivative = -a.beta / delta2;
  c.detuning_quadratic = a.gamma / delta2;
  c.detuning_offset = a.delta0;
  return c;
}

bool is_first_order_family(VariantKind k) {
  return k == VariantKind::ZOnly1 || k == VariantKind::YOnly1 || k == VariantKind::Optimal1;
}

}  // namespace

ControlSet build_controls(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params) {
  if (variant.kind == VariantKind::Gaussian0) return ControlSet(params, variant, ControlCoefficients{});
  const double d2 = spec.reference_anharmonicity();
  if (variant.kind == VariantKind::Ansatz) return ControlSet(params, variant, ansatz_coefficients(variant.ansatz, d2));
  if (spec.topology() != Topology::Ladder) {
    throw std::invalid_argument("build_controls: variant " + std::string(to_string(variant.kind)) +
                                " needs a ladder; use build_controls_intermediate or build_controls_star");
  }
  const double l = spec.lambda(1);
  const double l2 = l * l;
  ControlCoefficients c;
  switch (variant.kind) {
    case VariantKind::Gaussian0:
      break;
    case VariantKind::ZOnly1:
    case VariantKind::ZOnly2:
      c.detuning_quadratic = l2 / (4.0 * d2);
      if (variant.kind == VariantKind::ZOnly2) c.x_cubic = l2 / (8.0 * d2 * d2);
      break;
    case VariantKind::YOnly1:
    case VariantKind::YOnly2:
      c.y_derivative = -l2 / (4.0 * d2);
      if (variant.kind == VariantKind::YOnly2) c.x_cubic = -l2 * (l2 - 4.0) / (32.0 * d2 * d2);
      break;
    case VariantKind::Optimal1:
      c.y_derivative = -l / (2.0 * d2);
      c.detuning_quadratic = (l2 - 2.0 * l) / (4.0 * d2);
      break;
    case VariantKind::Drag1:
    case VariantKind::Drag2:
      c.y_derivative = -1.0 / d2;
      c.detuning_quadratic = (l2 - 4.0) / (4.0 * d2);
      if (variant.kind == VariantKind::Drag2) c.x_cubic = (l2 - 4.0) / (8.0 * d2 * d2);
      break;
    case VariantKind::Ansatz:
      break;
  }
  return ControlSet(params, variant, c);
}

ControlSet build_controls_intermediate(const SystemSpec& spec, const DragVariant& variant,
                                       const GaussianParams& params) {
  if (spec.topology() != Topology::Intermediate) {
    throw std::invalid_argument("build_controls_intermediate: spec topology is " + std::string(to_string(spec.topology())));
  }
  if (variant.kind == VariantKind::Ansatz || variant.kind == VariantKind::Gaussian0) {
    return build_controls(spec, variant, params);
  }
  if (!is_first_order_family(variant.kind)) {
    throw std::invalid_argument("build_controls_intermediate: no closed form for " + std::string(to_string(variant.kind)));
  }
  const double d2 = spec.reference_anharmonicity();
  const double dm = spec.anharmonicity(-1);
  const double lp = spec.lambda(1), lm = spec.lambda(-1);
  const double bracket = lp * lp / d2 - lm * lm / dm;
  ControlCoefficients c;
  switch (variant.kind) {
    case VariantKind::ZOnly1:
      c.detuning_quadratic = bracket / 4.0;
      break;
    case VariantKind::YOnly1:
      c.y_derivative = -bracket / 4.0;
      break;
    default: {
      const double r = d2 / dm;
      const double lt = std::sqrt(lp * lp + r * r * lm * lm);
      c.y_derivative = -lt / (2.0 * d2);
      c.detuning_quadratic = (lp * lp - r * lm * lm - 2.0 * lt) / (4.0 * d2);
      break;
    }
  }
  return ControlSet(params, variant, c);
}

ControlSet build_controls_star(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params) {
  if (spec.topology() != Topology::Star) {
    throw std::invalid_argument("build_controls_star: spec topology is " + std::string(to_string(spec.topology())));
  }
  if (variant.kind == VariantKind::Ansatz || variant.kind == VariantKind::Gaussian0) {
    return build_controls(spec, variant, params);
  }
  if (!is_first_order_family(variant.kind)) {
    throw std::invalid_argument("build_controls_star: no closed form for " + std::string(to_string(variant.kind)));
  }
  const double d2 = spec.reference_anharmonicity();
  double sum = 0.0;
  for (int k = 2; k < spec.dim(); ++k) {
    const double l = spec.lambda(k - 1);
    sum += l * l / spec.anharmonicity(k);
  }
  ControlCoefficients c;
  switch (variant.kind) {
    case VariantKind::ZOnly1:
      c.detuning_quadratic = sum / 4.0;
      break;
    case VariantKind::YOnly1:
      c.y_derivative = -sum / 4.0;
      break;
    default: {
      const double lt = effective_lambda(spec);
      c.y_derivative = -lt / (2.0 * d2);
      c.detuning_quadratic = (d2 * sum - 2.0 * lt) / (4.0 * d2);
      break;
    }
  }
  return ControlSet(params, variant, c);
}

ControlSet build_controls_any(const SystemSpec& spec, const DragVariant& variant, const GaussianParams& params) {
  switch (spec.topology()) {
    case Topology::Intermediate: return build_controls_intermediate(spec, variant, params);
    case Topology::Star: return build_controls_star(spec, variant, params);
    case Topology::Ladder: break;
  }
  return build_controls(spec, variant, params);
}

double effective_lambda(const SystemSpec& spec) {
  if (spec.topology() != Topology::Star) throw std::invalid_argument("effective_lambda: star topology required");
  const double d2 = spec.reference_anharmonicity();
  double sum = 0.0;
  for (int k = 2; k < spec.dim(); ++k) {
    const double r = d2 * spec.lambda(k - 1) / spec.anharmonicity(k);
    sum += r * r;
  }
  return std::sqrt(sum);
}

ControlSet phase_ramp(const ControlSet& cs, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("phase_ramp: n_steps must be positive");
  if (cs.is_ramped()) return cs;
  auto table = std::make_shared<PhaseTable>();
  const double h = cs.t_g() / (2.0 * n_steps);
  const int nodes = 2 * n_steps + 1;
  table->step = h;
  table->phi.assign(nodes, 0.0);
  table->rate.assign(nodes, 0.0);
  double left = cs.base_at(0.0).delta;
  table->rate[0] = left;
  for (int k = 1; k < nodes; ++k) {
    const double t1 = k == nodes - 1 ? cs.t_g() : k * h;
    const double mid = cs.base_at(t1 - 0.5 * h).delta;
    const double right = cs.base_at(t1).delta;
    table->phi[k] = table->phi[k - 1] + h / 6.0 * (left + 4.0 * mid + right);
    table->rate[k] = right;
    left = right;
  }
  ControlSet out = cs;
  out.ramp_ = std::move(table);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string controls_csv(const ControlSet& cs, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("controls_csv: need at least two samples");
  std::ostringstream out;
  out << "t,omega_x,omega_y,delta\n";
  for (int k = 0; k < n_samples; ++k) {
    const double t = k == n_samples - 1 ? cs.t_g() : cs.t_g() * k / (n_samples - 1);
    const ControlSample s = cs.at(t);
    out << format_double(t) << ',' << format_double(s.omega_x) << ',' << format_double(s.omega_y) << ','
        << format_double(s.delta) << '\n';
  }
  return out.str();
}

}  // namespace dragforge
