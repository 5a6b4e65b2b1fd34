#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace dragforge {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Dense samples of a matrix-valued function on a uniform grid.
using MatrixSeries = std::vector<Matrix>;

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// Largest elementwise modulus.
double max_abs(const Matrix& m);

/// max |H - H^dagger|, zero for an exactly Hermitian matrix.
double hermiticity_defect(const Matrix& h);

/// exp(-i h t) for Hermitian h, via eigendecomposition with exponentiated
/// eigenvalues. Only the lower triangle of h is read.
Matrix expm_hermitian(const Matrix& h, double t);

/// max_k ||a_k - b_k||_max over two series of equal length.
double max_abs_difference(const MatrixSeries& a, const MatrixSeries& b);

/// Fourth-order finite-difference derivative of uniformly sampled data.
/// Interior points use the five-point central stencil; the first and last two
/// samples use one-sided fourth-order stencils. Needs at least five samples.
MatrixSeries differentiate(const MatrixSeries& samples, double step);
std::vector<double> differentiate(const std::vector<double>& samples, double step);

}  // namespace dragforge
