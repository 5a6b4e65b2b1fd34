#include "dragforge/fidelity.hpp"

#include <cmath>
#include <stdexcept>

#include "dragforge/propagator.hpp"

namespace dragforge {

namespace {

void check_qubit(int d, QubitIndices q) {
  if (d < 2) throw std::invalid_argument("need d >= 2");
  if (q[0] < 0 || q[1] < 0 || q[0] >= d || q[1] >= d || q[0] == q[1]) {
    throw std::invalid_argument("qubit indices out of range");
  }
}

// |psi><psi| from its qubit-block entries; written out so the halves stay exact.
Matrix pure_state(int d, QubitIndices q, double p0, double p1, Complex c01) {
  Matrix rho = Matrix::Zero(d, d);
  rho(q[0], q[0]) = p0;
  rho(q[1], q[1]) = p1;
  rho(q[0], q[1]) = c01;
  rho(q[1], q[0]) = std::conj(c01);
  return rho;
}

}  // namespace

std::array<Matrix, 6> axial_states(int d, QubitIndices q) {
  check_qubit(d, q);
  const Complex i(0.0, 1.0);
  return {pure_state(d, q, 0.5, 0.5, 0.5),      pure_state(d, q, 0.5, 0.5, -0.5), pure_state(d, q, 0.5, 0.5, -0.5 * i),
          pure_state(d, q, 0.5, 0.5, 0.5 * i), pure_state(d, q, 1.0, 0.0, 0.0),  pure_state(d, q, 0.0, 1.0, 0.0)};
}

Matrix ideal_not(int d, QubitIndices q) {
  check_qubit(d, q);
  Matrix u = Matrix::Identity(d, d);
  u(q[0], q[0]) = u(q[1], q[1]) = 0.0;
  u(q[0], q[1]) = u(q[1], q[0]) = 1.0;
  return u;
}

double average_gate_fidelity(const Matrix& u_actual, const Matrix& u_ideal, QubitIndices q) {
  if (u_actual.rows() != u_ideal.rows() || u_actual.cols() != u_ideal.cols() || u_actual.rows() != u_actual.cols()) {
    throw std::invalid_argument("average_gate_fidelity: dimension mismatch");
  }
  Complex total = 0.0;
  for (const Matrix& rho : axial_states(static_cast<int>(u_actual.rows()), q)) {
    const Matrix target = u_ideal * rho * u_ideal.adjoint();
    const Matrix out = u_actual * rho * u_actual.adjoint();
    total += (target * out).trace();
  }
  total /= 6.0;
  if (std::abs(total.imag()) > 1e-10) throw std::logic_error("average_gate_fidelity: complex overlap");
  return total.real();
}

nlohmann::json FidelityReport::to_json() const {
  return {{"f_gate", f_gate}, {"gate_error", gate_error}, {"variant", variant},
          {"sigma", sigma},   {"t_g", t_g},               {"n_steps", n_steps}};
}

namespace {

FidelityReport make_report(const SystemSpec& spec, const ControlSet& cs, const Matrix& u, int n_steps) {
  FidelityReport r;
  r.f_gate = average_gate_fidelity(u, ideal_not(spec.dim(), spec.qubit_indices()), spec.qubit_indices());
  r.gate_error = 1.0 - r.f_gate;
  r.variant = std::string(to_string(cs.variant().kind));
  r.sigma = cs.params().sigma;
  r.t_g = cs.t_g();
  r.n_steps = n_steps;
  return r;
}

}  // namespace

FidelityReport not_gate_report(const SystemSpec& spec, const ControlSet& cs, int n_steps) {
  return make_report(spec, cs, propagate(spec, cs, n_steps), n_steps);
}

FidelityReport not_gate_report_converged(const SystemSpec& spec, const ControlSet& cs, double tol, int max_steps) {
  const ConvergedUnitary c = converge(spec, cs, tol, 256, max_steps);
  return make_report(spec, cs, c.u, c.n_steps);
}

double phase_optimized_error(const Matrix& u_actual, const Matrix& u_ideal, QubitIndices q) {
  auto error_at = [&](double theta) {
    Matrix z = Matrix::Identity(u_actual.rows(), u_actual.cols());
    z(q[1], q[1]) = std::polar(1.0, -theta);
    return 1.0 - average_gate_fidelity(z * u_actual, u_ideal, q);
  };
  // Coarse scan, then golden-section refinement around the best bracket.
  const int n = 360;
  int best = 0;
  double best_err = error_at(0.0);
  for (int k = 1; k < n; ++k) {
    const double e = error_at(2.0 * M_PI * k / n);
    if (e < best_err) best_err = e, best = k;
  }
  double a = 2.0 * M_PI * (best - 1) / n, b = 2.0 * M_PI * (best + 1) / n;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = error_at(c), fd = error_at(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc, c = b - g * (b - a), fc = error_at(c);
    } else {
      a = c, c = d, fc = fd, d = a + g * (b - a), fd = error_at(d);
    }
  }
  return std::min({best_err, fc, fd});
}

}  // namespace dragforge
