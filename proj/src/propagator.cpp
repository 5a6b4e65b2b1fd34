#include "dragforge/propagator.hpp"

#include <cmath>
#include <sstream>

namespace dragforge {

TimeGrid TimeGrid::over(double t_g, int n_steps) {
  TimeGrid g{0.0, t_g, n_steps};
  g.validate();
  return g;
}

void TimeGrid::validate() const {
  if (n_steps < kMinSteps) throw std::invalid_argument("time grid needs at least 16 steps");
  if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) throw std::invalid_argument("time grid needs t1 > t0");
}

NonFiniteControl::NonFiniteControl(double t, const std::string& what) : std::domain_error(what), t_(t) {}

namespace {

Matrix step_hamiltonian(const HamiltonianGenerators& gen, const ControlSet& cs, double t) {
  const ControlSample s = cs.at(t);
  if (!std::isfinite(s.omega_x) || !std::isfinite(s.omega_y) || !std::isfinite(s.delta)) {
    throw NonFiniteControl(t, "non-finite control sample at t = " + format_double(t));
  }
  return hamiltonian_at(gen, s.delta, s.omega_x, s.omega_y);
}

}  // namespace

Matrix propagate(const HamiltonianGenerators& gen, const ControlSet& cs, const TimeGrid& grid) {
  grid.validate();
  const double dt = grid.step();
  Matrix u = Matrix::Identity(gen.h_drift.rows(), gen.h_drift.cols());
  for (int k = 0; k < grid.n_steps; ++k) {
    u = expm_hermitian(step_hamiltonian(gen, cs, grid.midpoint(k)), dt) * u;
  }
  return u;
}

Matrix propagate(const SystemSpec& spec, const ControlSet& cs, int n_steps) {
  return propagate(generators(spec), cs, TimeGrid::over(cs.t_g(), n_steps));
}

std::string PopulationTrace::csv() const {
  std::ostringstream out;
  out << 't';
  for (int level : levels) out << ",p" << level;
  out << '\n';
  for (std::size_t k = 0; k < t.size(); ++k) {
    out << format_double(t[k]);
    for (double v : p[k]) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

PopulationTrace populations(const SystemSpec& spec, const ControlSet& cs, const TimeGrid& grid, int initial_level) {
  grid.validate();
  const HamiltonianGenerators gen = generators(spec);
  const int d = spec.dim();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
  psi[spec.index_of(initial_level)] = 1.0;

  PopulationTrace trace;
  for (int i = 0; i < d; ++i) trace.levels.push_back(spec.level_at(i));
  auto record = [&](double t) {
    trace.t.push_back(t);
    std::vector<double> row(d);
    for (int i = 0; i < d; ++i) row[i] = std::norm(psi[i]);
    trace.p.push_back(std::move(row));
  };
  record(grid.node(0));
  const double dt = grid.step();
  for (int k = 0; k < grid.n_steps; ++k) {
    psi = expm_hermitian(step_hamiltonian(gen, cs, grid.midpoint(k)), dt) * psi;
    record(grid.node(k + 1));
  }
  return trace;
}

ConvergedUnitary converge(const SystemSpec& spec, const ControlSet& cs, double tol, int start, int cap) {
  if (!(tol > 0.0)) throw std::invalid_argument("converge: tol must be positive");
  const HamiltonianGenerators gen = generators(spec);
  int n = std::max(start, TimeGrid::kMinSteps);
  Matrix coarse = propagate(gen, cs, TimeGrid::over(cs.t_g(), n));
  double change = 0.0;
  while (2 * n <= cap) {
    Matrix fine = propagate(gen, cs, TimeGrid::over(cs.t_g(), 2 * n));
    change = max_abs(fine - coarse);
    n *= 2;
    if (change < tol) return {fine, n, change};
    coarse = std::move(fine);
  }
  throw ConvergenceFailure("propagation did not reach tol " + format_double(tol) + " within " + std::to_string(cap) +
                           " steps (last change " + format_double(change) + ", sigma " +
                           format_double(cs.params().sigma) + ", variant " +
                           std::string(to_string(cs.variant().kind)) + ")");
}

}  // namespace dragforge
