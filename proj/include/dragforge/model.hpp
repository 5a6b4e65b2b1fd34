#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dragforge/linalg.hpp"

namespace dragforge {

/// How the leakage levels attach to the qubit.
///   Ladder:       0 - 1 - 2 - ... - (d-1)
///   Intermediate: lo - ... - -1 - 0 - 1 - 2 - ... - hi   (leakage on both sides)
///   Star:         0 - 1, and 1 - j for every j >= 2
enum class Topology { Ladder, Intermediate, Star };

std::string_view to_string(Topology t);
Topology topology_from_string(std::string_view name);

/// A single-photon transition between two signed level labels.
struct Transition {
  int lower;
  int upper;
  double weight;  // lambda, relative to the 0 -> 1 element
};

/// Rotating-frame description of a multi-level qubit. Levels carry signed labels;
/// for Ladder and Star they are 0..d-1, for Intermediate they run from
/// lowest_level() (< 0) upwards. Storage is dense with offset -lowest_level().
///
/// Immutable after construction; every constructor validates:
///   Delta_0 = Delta_1 = 0 exactly, Delta_k != 0 for every leakage level,
///   lambda_0 (the 0 -> 1 weight) = 1.
class SystemSpec {
 public:
  /// Ladder with anharmonicities Delta_0..Delta_{d-1} and weights lambda_0..lambda_{d-2}.
  /// d = 2 is accepted (a bare qubit); build_sno enforces d >= 3.
  static SystemSpec ladder(std::vector<double> anharmonicity, std::vector<double> weights);

  /// Intermediate-level qubit with levels lowest_level .. lowest_level + size - 1.
  /// weights[i] couples level (lowest_level + i) to (lowest_level + i + 1).
  static SystemSpec intermediate(int lowest_level, std::vector<double> anharmonicity,
                                 std::vector<double> weights);

  /// Star: anharmonicity for levels 0..d-1; weights[0] = lambda_0 (0 -> 1) and
  /// weights[j-1] couples 1 -> j for j >= 2.
  static SystemSpec star(std::vector<double> anharmonicity, std::vector<double> weights);

  Topology topology() const { return topology_; }
  int dim() const { return static_cast<int>(anharmonicity_.size()); }
  int lowest_level() const { return lowest_; }
  int highest_level() const { return lowest_ + dim() - 1; }
  bool has_level(int level) const { return level >= lowest_ && level <= highest_level(); }
  int index_of(int level) const;
  int level_at(int index) const { return lowest_ + index; }
  std::array<int, 2> qubit_indices() const { return {index_of(0), index_of(1)}; }

  double anharmonicity(int level) const { return anharmonicity_.at(index_of(level)); }
  const std::vector<double>& anharmonicities() const { return anharmonicity_; }

  /// Delta_2, the unit of the first leakage transition.
  double reference_anharmonicity() const { return anharmonicity(2); }

  /// lambda_k in the topology's own indexing: Ladder / Intermediate index by the
  /// lower level of the transition; Star indexes 1 -> j as lambda_{j-1}.
  double lambda(int k) const;
  const std::vector<Transition>& transitions() const { return transitions_; }

  /// Bare qubit frequency, only consumed by the dressing module.
  double omega() const { return omega_; }
  SystemSpec with_omega(double omega) const;

  /// Time unit convention, echoed into serialized configs.
  const std::string& time_unit() const { return time_unit_; }
  SystemSpec with_time_unit(std::string unit) const;

  nlohmann::json to_json() const;
  static SystemSpec from_json(const nlohmann::json& doc);

 private:
  SystemSpec(Topology topology, int lowest, std::vector<double> anharmonicity,
             std::vector<Transition> transitions);
  void validate() const;

  Topology topology_;
  int lowest_;
  std::vector<double> anharmonicity_;
  std::vector<Transition> transitions_;
  double omega_ = 0.0;
  std::string time_unit_ = "2pi/|Delta2|";
};

/// Standard nonlinear oscillator: Delta_j = delta2 j (j-1) / 2, lambda_{j-1} = sqrt(j).
SystemSpec build_sno(int d, double delta2);

/// Window of an SNO of dimension source_dim re-centred so that the transition
/// qubit_lower -> qubit_lower + 1 becomes 0 -> 1. Couplings are rescaled so the
/// new lambda_0 = 1; anharmonicities are measured in the frame of the new qubit.
SystemSpec intermediate_from_sno(int source_dim, int qubit_lower, double delta2);

/// Symmetric intermediate window, levels -N..N with N = (d - 1) / 2. d must be odd, d >= 5.
SystemSpec build_intermediate_sno(int d, double delta2);

/// Rotating-frame generators in physical units:
///   H(t) = h_drift + delta(t) h_z + (Omega_x / 2) h_x + (Omega_y / 2) h_y.
struct HamiltonianGenerators {
  Matrix h_drift;
  Matrix h_z;
  Matrix h_x;
  Matrix h_y;
};

HamiltonianGenerators generators(const SystemSpec& spec);

Matrix hamiltonian_at(const HamiltonianGenerators& gen, double delta, double omega_x, double omega_y);

}  // namespace dragforge
