#include "dragforge/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dragforge/fidelity.hpp"
#include "dragforge/propagator.hpp"

namespace dragforge {

namespace {

using Point = std::vector<double>;

double step_for(double v, const NelderMeadOptions& o) {
  return v == 0.0 ? o.absolute_step : o.relative_step * std::abs(v);
}

struct Descent {
  const std::function<double(const Point&)>& f;
  const NelderMeadOptions& o;
  int evals = 0;

  double eval(const Point& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }

  double diameter(const std::vector<Point>& s) const {
    double d = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      for (std::size_t j = 0; j < s[i].size(); ++j) d = std::max(d, std::abs(s[i][j] - s[0][j]));
    }
    return d;
  }

  // One descent from the simplex spanned by x0 and x0 + steps[i] e_i.
  NelderMeadResult run(const Point& x0, const Point& steps) {
    const std::size_t n = x0.size();
    std::vector<Point> s(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += steps[i];
    for (std::size_t i = 0; i <= n; ++i) fs[i] = eval(s[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort = [&] {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
      std::vector<Point> s2;
      std::vector<double> f2;
      for (std::size_t i : order) s2.push_back(s[i]), f2.push_back(fs[i]);
      s.swap(s2);
      fs.swap(f2);
    };
    auto along = [&](const Point& c, const Point& worst, double t) {
      Point p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = c[j] + t * (worst[j] - c[j]);
      return p;
    };

    bool converged = false;
    sort();
    while (evals < o.max_evals) {
      if (diameter(s) < o.tolerance) {
        converged = true;
        break;
      }
      Point c(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) c[j] += s[i][j] / n;
      }
      const Point xr = along(c, s[n], -1.0);
      const double fr = eval(xr);
      if (fr < fs[0]) {
        const Point xe = along(c, s[n], -2.0);
        const double fe = eval(xe);
        if (fe < fr) s[n] = xe, fs[n] = fe;
        else s[n] = xr, fs[n] = fr;
      } else if (fr < fs[n - 1]) {
        s[n] = xr, fs[n] = fr;
      } else {
        const bool outside = fr < fs[n];
        const Point xc = along(c, s[n], outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fs[n])) {
          s[n] = xc, fs[n] = fc;
        } else {
          for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) s[i][j] = s[0][j] + 0.5 * (s[i][j] - s[0][j]);
            fs[i] = eval(s[i]);
          }
        }
      }
      sort();
    }
    return {s[0], fs[0], evals, converged};
  }
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& options) {
  if (x0.empty()) throw std::invalid_argument("nelder_mead: no free parameters");
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("nelder_mead: tolerance must be positive");
  Descent d{f, options};
  Point steps(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) steps[i] = step_for(x0[i], options);
  NelderMeadResult best = d.run(x0, steps);

  std::mt19937_64 rng(options.seed);
  std::bernoulli_distribution sign(0.5);
  for (int r = 0; r < options.restarts && d.evals < options.max_evals; ++r) {
    Point start = best.x;
    for (std::size_t i = 0; i < start.size(); ++i) {
      const double delta = step_for(start[i], options);
      start[i] += sign(rng) ? delta : -delta;
      steps[i] = step_for(start[i], options);
    }
    NelderMeadResult next = d.run(start, steps);
    if (next.f <= best.f) {
      best.x = next.x;
      best.f = next.f;
    }
    best.converged = next.converged;
  }
  best.evals = d.evals;
  return best;
}

std::string mask_label(const ParameterMask& mask) {
  static const char* names[] = {"alpha", "beta", "gamma", "delta0"};
  std::string out;
  for (int i = 0; i < 4; ++i) {
    if (!mask[i]) continue;
    if (!out.empty()) out += '+';
    out += names[i];
  }
  return out.empty() ? "none" : out;
}

ParameterMask mask_from_label(const std::string& label) {
  static const char* names[] = {"alpha", "beta", "gamma", "delta0"};
  ParameterMask m{false, false, false, false};
  std::stringstream in(label);
  std::string part;
  while (std::getline(in, part, '+')) {
    bool found = false;
    for (int i = 0; i < 4; ++i) {
      if (part == names[i]) m[i] = found = true;
    }
    if (!found) throw std::invalid_argument("unknown parameter '" + part + "' in mask '" + label + "'");
  }
  return m;
}

nlohmann::json OptimizeResult::to_json() const {
  return {{"alpha", best.alpha},       {"beta", best.beta},     {"gamma", best.gamma},
          {"delta0", best.delta0},     {"gate_error", gate_error}, {"initial_error", initial_error},
          {"n_evals", n_evals},        {"converged", converged},   {"n_steps", n_steps}};
}

OptimizeResult optimize(const OptimizeTask& task) {
  if (std::none_of(task.mask.begin(), task.mask.end(), [](bool b) { return b; })) {
    throw std::invalid_argument("optimize: every parameter is frozen");
  }
  if (!(task.tolerance > 0.0)) throw std::invalid_argument("optimize: tolerance must be positive");

  auto unpack = [&](const Point& x) {
    double v[4] = {task.initial.alpha, task.initial.beta, task.initial.gamma, task.initial.delta0};
    std::size_t k = 0;
    for (int i = 0; i < 4; ++i) {
      if (task.mask[i]) v[i] = x[k++];
    }
    return AnsatzParams{v[0], v[1], v[2], v[3]};
  };
  Point x0;
  const double init[4] = {task.initial.alpha, task.initial.beta, task.initial.gamma, task.initial.delta0};
  for (int i = 0; i < 4; ++i) {
    if (task.mask[i]) x0.push_back(init[i]);
  }

  int n_steps = task.n_steps;
  if (n_steps == 0) {
    const ControlSet cs0 = build_controls(task.spec, DragVariant::ansatz_of(task.initial), task.params);
    n_steps = converge(task.spec, cs0, task.propagation_tol, 256, task.max_steps).n_steps;
  }
  const HamiltonianGenerators gen = generators(task.spec);
  const TimeGrid grid = TimeGrid::over(task.params.t_g, n_steps);
  const Matrix target = ideal_not(task.spec.dim(), task.spec.qubit_indices());
  auto objective = [&](const Point& x) {
    const ControlSet cs = build_controls(task.spec, DragVariant::ansatz_of(unpack(x)), task.params);
    return 1.0 - average_gate_fidelity(propagate(gen, cs, grid), target, task.spec.qubit_indices());
  };

  NelderMeadOptions opts = task.search;
  opts.tolerance = task.tolerance;
  opts.max_evals = task.max_evals;

  OptimizeResult r;
  r.n_steps = n_steps;
  r.initial_error = objective(x0);
  const NelderMeadResult nm = nelder_mead(objective, x0, opts);
  r.n_evals = nm.evals + 1;
  r.converged = nm.converged;
  if (nm.f <= r.initial_error) {
    r.best = unpack(nm.x);
    r.gate_error = nm.f;
  } else {
    r.best = task.initial;
    r.gate_error = r.initial_error;
  }
  return r;
}

std::string optimize_csv_header() { return "sigma,mask,alpha,beta,gamma,delta0,gate_error,n_evals\n"; }

std::string optimize_csv_row(double sigma, const ParameterMask& mask, const OptimizeResult& r) {
  std::ostringstream out;
  out << format_double(sigma) << ',' << mask_label(mask) << ',' << format_double(r.best.alpha) << ','
      << format_double(r.best.beta) << ',' << format_double(r.best.gamma) << ',' << format_double(r.best.delta0)
      << ',' << format_double(r.gate_error) << ',' << r.n_evals << '\n';
  return out.str();
}

}  // namespace dragforge
