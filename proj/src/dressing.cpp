#include "dragforge/dressing.hpp"

#include <cmath>
#include <sstream>

#include "dragforge/pulses.hpp"

namespace dragforge {

double CavitySpec::transition_frequency(int j) const {
  if (j < 1 || j >= dim()) throw std::out_of_range("transition index " + std::to_string(j) + " out of range");
  return omega + delta[j] - delta[j - 1];
}

void CavitySpec::validate() const {
  if (dim() < 2) throw std::invalid_argument("cavity: need at least two levels");
  if (static_cast<int>(g.size()) != dim() - 1) throw std::invalid_argument("cavity: need one coupling per transition");
  if (delta[0] != 0.0 || delta[1] != 0.0) throw std::invalid_argument("cavity: Delta_0 and Delta_1 must be zero");
  for (int j = 1; j < dim(); ++j) {
    if (transition_frequency(j) == omega_r) {
      throw ResonanceError("transition " + std::to_string(j - 1) + "->" + std::to_string(j) + " is resonant with the cavity");
    }
  }
}

double chi(const CavitySpec& cavity, int j) {
  const double detuning = cavity.transition_frequency(j) - cavity.omega_r;
  if (detuning == 0.0) {
    throw ResonanceError("chi: transition " + std::to_string(j - 1) + "->" + std::to_string(j) + " is resonant");
  }
  const double gj = cavity.g.at(j - 1);
  return gj * gj / detuning;
}

DressedParams dressed_params(const CavitySpec& cavity) {
  cavity.validate();
  const double chi01 = chi(cavity, 1);
  DressedParams out{cavity.omega + chi01, std::vector<double>(cavity.dim(), 0.0)};
  for (int j = 1; j < cavity.dim(); ++j) out.delta_tilde[j] = cavity.delta[j] + chi(cavity, j) - j * chi01;
  return out;
}

DressedCoupling lambda_dressed(const CavitySpec& cavity, int j) {
  cavity.validate();
  const double det01 = cavity.transition_frequency(1) - cavity.omega_r;
  const double detj = cavity.transition_frequency(j) - cavity.omega_r;
  if (cavity.g[0] == 0.0) throw std::domain_error("lambda_dressed: g_{0,1} must be nonzero");
  return {cavity.g.at(j - 1) * det01 / (cavity.g[0] * detj), cavity.g[0] / det01};
}

double lambda_sno(int j, double ratio) {
  if (j < 1) throw std::out_of_range("lambda_sno: j must be >= 1");
  const double denom = 1.0 + (j - 1) * ratio;
  if (denom == 0.0) {
    throw ResonanceError("lambda_sno: pole at ratio = " + format_double(ratio) +
                         " (transition " + std::to_string(j - 1) + "->" + std::to_string(j) +
                         " resonant with the cavity; the dispersive diagonalization is invalid)");
  }
  return std::sqrt(static_cast<double>(j)) / denom;
}

DispersiveCheck dispersive_check(const CavitySpec& cavity) {
  cavity.validate();
  double worst = 0.0;
  for (int j = 1; j < cavity.dim(); ++j) {
    worst = std::max(worst, std::abs(cavity.g[j - 1] / (cavity.transition_frequency(j) - cavity.omega_r)));
  }
  return {worst, worst <= kDispersiveThreshold};
}

CavitySpec sno_cavity(int d, double omega, double omega_r, double delta2, double g01) {
  CavitySpec c;
  c.omega = omega;
  c.omega_r = omega_r;
  for (int j = 0; j < d; ++j) c.delta.push_back(delta2 * j * (j - 1) / 2.0);
  for (int j = 1; j < d; ++j) c.g.push_back(std::sqrt(static_cast<double>(j)) * g01);
  return c;
}

std::vector<LambdaCurvePoint> lambda_curve(double lo, double hi, double step, double guard) {
  if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("lambda_curve: need hi > lo and step > 0");
  const double pole = -1.0;  // j = 2
  std::vector<LambdaCurvePoint> out;
  const long n = std::lround((hi - lo) / step);
  for (long k = 0; k <= n; ++k) {
    const double r = lo + k * step;
    if (std::abs(r - pole) < guard) continue;
    out.push_back({r, lambda_sno(2, r), std::sqrt(2.0)});
  }
  return out;
}

std::string lambda_curve_csv(const std::vector<LambdaCurvePoint>& points) {
  std::ostringstream out;
  out << "ratio,lambda1_cavity,lambda1_direct\n";
  for (const auto& p : points) {
    out << format_double(p.ratio) << ',' << format_double(p.lambda_cavity) << ',' << format_double(p.lambda_direct)
        << '\n';
  }
  return out.str();
}

}  // namespace dragforge
