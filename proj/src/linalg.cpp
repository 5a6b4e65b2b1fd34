#include "dragforge/linalg.hpp"

#include <stdexcept>

namespace dragforge {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const Matrix& h) { return max_abs(h - h.adjoint()); }

Matrix expm_hermitian(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("expm_hermitian: eigendecomposition failed");
  }
  const Eigen::VectorXd& w = solver.eigenvalues();
  Eigen::VectorXcd phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    phases[k] = std::polar(1.0, -w[k] * t);
  }
  const Matrix& v = solver.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

double max_abs_difference(const MatrixSeries& a, const MatrixSeries& b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_difference: length mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, max_abs(a[k] - b[k]));
  return worst;
}

namespace {

// Stencils exact for polynomials up to degree 4.
template <typename T>
std::vector<T> differentiate_impl(const std::vector<T>& f, double h) {
  const std::size_t n = f.size();
  if (n < 5) throw std::invalid_argument("differentiate: need at least five samples");
  std::vector<T> out(n);
  const double c = 1.0 / (12.0 * h);
  for (std::size_t k = 2; k + 2 < n; ++k) {
    out[k] = (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) * c;
  }
  out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
  out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
  out[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * c;
  out[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * c;
  return out;
}

}  // namespace

MatrixSeries differentiate(const MatrixSeries& samples, double step) {
  return differentiate_impl(samples, step);
}

std::vector<double> differentiate(const std::vector<double>& samples, double step) {
  return differentiate_impl(samples, step);
}

}  // namespace dragforge
