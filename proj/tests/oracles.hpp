#pragma once

// Independent reference computations used only by the tests. None of these call
// into the library code they are checking.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Adaptive Simpson quadrature with Richardson correction.
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

// Matrix-valued polynomials in eps, truncated at a fixed degree.
struct Poly {
  std::vector<Matrix> c;

  Poly(int degree, int d) : c(degree + 1, Matrix::Zero(d, d)) {}
  int degree() const { return static_cast<int>(c.size()) - 1; }
};

inline Poly operator*(const Poly& a, const Poly& b) {
  Poly out(a.degree(), a.c[0].rows());
  for (int i = 0; i <= a.degree(); ++i) {
    for (int j = 0; i + j <= a.degree(); ++j) out.c[i + j] += a.c[i] * b.c[j];
  }
  return out;
}

inline Poly operator+(Poly a, const Poly& b) {
  for (int i = 0; i <= a.degree(); ++i) a.c[i] += b.c[i];
  return a;
}

inline Poly scaled(Poly a, Complex s) {
  for (auto& m : a.c) m *= s;
  return a;
}

// exp(i S) for S with no eps^0 term; the series terminates at the truncation degree.
inline Poly exp_i(const Poly& s) {
  const int d = static_cast<int>(s.c[0].rows());
  Poly out(s.degree(), d), term(s.degree(), d);
  out.c[0] = Matrix::Identity(d, d);
  term.c[0] = Matrix::Identity(d, d);
  for (int k = 1; k <= s.degree(); ++k) {
    term = scaled(term * s, Complex(0.0, 1.0) / double(k));
    out = out + term;
  }
  return out;
}

// d/dtau exp(i S) = sum_k i^k / k! sum_j S^j dS S^(k-1-j).
inline Poly d_exp_i(const Poly& s, const Poly& ds) {
  const int d = static_cast<int>(s.c[0].rows());
  const int deg = s.degree();
  std::vector<Poly> pow(deg + 1, Poly(deg, d));
  pow[0].c[0] = Matrix::Identity(d, d);
  for (int k = 1; k <= deg; ++k) pow[k] = pow[k - 1] * s;
  Poly out(deg, d);
  Complex coeff = 1.0;
  for (int k = 1; k <= deg + 1; ++k) {
    coeff *= Complex(0.0, 1.0) / double(k);
    for (int j = 0; j < k && j <= deg && k - 1 - j <= deg; ++j) out = out + scaled(pow[j] * ds * pow[k - 1 - j], coeff);
  }
  return out;
}

// Expands H_eff = e^{iS} Hbar e^{-iS} + i (d e^{iS}/dtau) e^{-iS} with
// Hbar = h0 / eps + sum_n eps^n h[n] and S = sum_n eps^n s[n-1], at one instant.
// Returns H_eff^(n) for n = 0..max_order.
inline std::vector<Matrix> h_eff_orders(const std::vector<Matrix>& s, const std::vector<Matrix>& ds,
                                        const std::vector<Matrix>& h, const Matrix& h0, int max_order) {
  const int d = static_cast<int>(h0.rows());
  const int deg = max_order + 1;
  Poly sp(deg, d), dsp(deg, d), hp(deg, d);
  for (std::size_t m = 0; m < s.size() && int(m) + 1 <= deg; ++m) {
    sp.c[m + 1] = s[m];
    dsp.c[m + 1] = ds[m];
  }
  // eps * Hbar
  hp.c[0] = h0;
  for (std::size_t n = 0; n < h.size() && int(n) + 1 <= deg; ++n) hp.c[n + 1] = h[n];
  const Poly e = exp_i(sp);
  const Poly e_inv = exp_i(scaled(sp, -1.0));
  const Poly rotated = e * hp * e_inv;
  const Poly kinetic = d_exp_i(sp, dsp) * e_inv;
  std::vector<Matrix> out;
  for (int n = 0; n <= max_order; ++n) {
    Matrix term = rotated.c[n + 1];
    // i eps (dE) E^-1 contributes its eps^n coefficient to eps^(n+1).
    term += Complex(0.0, 1.0) * kinetic.c[n];
    out.push_back(term);
  }
  return out;
}

// Dressed energies of the zero-photon states |j, 0> of a generalized
// Jaynes-Cummings Hamiltonian, by full diagonalization of the truncated space.
//   H = sum_j (j omega + delta_j) |j><j| + omega_r a^dag a
//       + sum_j g_{j-1,j} (a^dag |j-1><j| + a |j><j-1|)
inline std::vector<double> jc_vacuum_energies(double omega, double omega_r, const std::vector<double>& delta,
                                              const std::vector<double>& g, int photons) {
  const int d = static_cast<int>(delta.size());
  const int np = photons + 1;
  const int n = d * np;
  auto idx = [&](int j, int k) { return j * np + k; };
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < np; ++k) h(idx(j, k), idx(j, k)) = j * omega + delta[j] + k * omega_r;
  }
  for (int j = 1; j < d; ++j) {
    for (int k = 0; k + 1 < np; ++k) {
      const double v = g[j - 1] * std::sqrt(double(k + 1));
      h(idx(j - 1, k + 1), idx(j, k)) = v;
      h(idx(j, k), idx(j - 1, k + 1)) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  std::vector<double> out(d);
  for (int j = 0; j < d; ++j) {
    Eigen::Index best = 0;
    solver.eigenvectors().row(idx(j, 0)).cwiseAbs().maxCoeff(&best);
    out[j] = solver.eigenvalues()[best];
  }
  return out;
}

struct ScanResult {
  double x;
  double f;
};

// Brute-force grid scan of f over [lo, hi] at the given resolution.
inline ScanResult scan(const std::function<double(double)>& f, double lo, double hi, double step) {
  ScanResult best{lo, f(lo)};
  const int n = static_cast<int>(std::round((hi - lo) / step));
  for (int k = 1; k <= n; ++k) {
    const double x = lo + k * step;
    const double v = f(x);
    if (v < best.f) best = {x, v};
  }
  return best;
}

// Random Hermitian matrix with entries of order one.
template <typename Rng>
Matrix random_hermitian(int d, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
  }
  return 0.5 * (m + m.adjoint());
}

}  // namespace oracle
