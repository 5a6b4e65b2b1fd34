#include "dragforge/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dragforge {

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::Ladder: return "ladder";
    case Topology::Intermediate: return "intermediate";
    case Topology::Star: return "star";
  }
  return "unknown";
}

Topology topology_from_string(std::string_view name) {
  if (name == "ladder") return Topology::Ladder;
  if (name == "intermediate") return Topology::Intermediate;
  if (name == "star") return Topology::Star;
  throw std::invalid_argument("unknown topology '" + std::string(name) + "'");
}

SystemSpec::SystemSpec(Topology topology, int lowest, std::vector<double> anharmonicity,
                       std::vector<Transition> transitions)
    : topology_(topology),
      lowest_(lowest),
      anharmonicity_(std::move(anharmonicity)),
      transitions_(std::move(transitions)) {
  validate();
}

SystemSpec SystemSpec::ladder(std::vector<double> anharmonicity, std::vector<double> weights) {
  const int d = static_cast<int>(anharmonicity.size());
  if (d < 2) throw std::invalid_argument("ladder: need at least two levels");
  if (static_cast<int>(weights.size()) != d - 1) {
    throw std::invalid_argument("ladder: expected " + std::to_string(d - 1) + " weights, got " +
                                std::to_string(weights.size()));
  }
  std::vector<Transition> tr;
  for (int j = 0; j + 1 < d; ++j) tr.push_back({j, j + 1, weights[j]});
  return SystemSpec(Topology::Ladder, 0, std::move(anharmonicity), std::move(tr));
}

SystemSpec SystemSpec::intermediate(int lowest_level, std::vector<double> anharmonicity,
                                    std::vector<double> weights) {
  const int d = static_cast<int>(anharmonicity.size());
  if (lowest_level > -1) throw std::invalid_argument("intermediate: lowest level must be <= -1");
  if (lowest_level + d - 1 < 2) throw std::invalid_argument("intermediate: highest level must be >= 2");
  if (static_cast<int>(weights.size()) != d - 1) {
    throw std::invalid_argument("intermediate: expected " + std::to_string(d - 1) + " weights");
  }
  std::vector<Transition> tr;
  for (int i = 0; i + 1 < d; ++i) tr.push_back({lowest_level + i, lowest_level + i + 1, weights[i]});
  return SystemSpec(Topology::Intermediate, lowest_level, std::move(anharmonicity), std::move(tr));
}

SystemSpec SystemSpec::star(std::vector<double> anharmonicity, std::vector<double> weights) {
  const int d = static_cast<int>(anharmonicity.size());
  if (d < 3) throw std::invalid_argument("star: need at least three levels");
  if (static_cast<int>(weights.size()) != d - 1) {
    throw std::invalid_argument("star: expected " + std::to_string(d - 1) + " weights");
  }
  std::vector<Transition> tr{{0, 1, weights[0]}};
  for (int j = 2; j < d; ++j) tr.push_back({1, j, weights[j - 1]});
  return SystemSpec(Topology::Star, 0, std::move(anharmonicity), std::move(tr));
}

int SystemSpec::index_of(int level) const {
  if (!has_level(level)) {
    throw std::out_of_range("level " + std::to_string(level) + " not in [" + std::to_string(lowest_) +
                            ", " + std::to_string(highest_level()) + "]");
  }
  return level - lowest_;
}

double SystemSpec::lambda(int k) const {
  for (const auto& t : transitions_) {
    const int key = topology_ == Topology::Star && t.lower == 1 ? t.upper - 1 : t.lower;
    if (key == k) return t.weight;
  }
  throw std::out_of_range("no transition with lambda index " + std::to_string(k));
}

SystemSpec SystemSpec::with_omega(double omega) const {
  SystemSpec out = *this;
  out.omega_ = omega;
  return out;
}

SystemSpec SystemSpec::with_time_unit(std::string unit) const {
  SystemSpec out = *this;
  out.time_unit_ = std::move(unit);
  return out;
}

void SystemSpec::validate() const {
  if (!has_level(0) || !has_level(1)) throw std::invalid_argument("spec must contain levels 0 and 1");
  if (anharmonicity(0) != 0.0 || anharmonicity(1) != 0.0) {
    throw std::invalid_argument("Delta_0 and Delta_1 must be exactly zero");
  }
  for (int level = lowest_; level <= highest_level(); ++level) {
    const double a = anharmonicity(level);
    if (!std::isfinite(a)) throw std::invalid_argument("non-finite anharmonicity at level " + std::to_string(level));
    if (level != 0 && level != 1 && a == 0.0) {
      throw std::invalid_argument("leakage level " + std::to_string(level) + " has zero anharmonicity");
    }
  }
  for (const auto& t : transitions_) {
    if (!std::isfinite(t.weight)) throw std::invalid_argument("non-finite coupling weight");
    if (t.lower == 0 && t.upper == 1 && t.weight != 1.0) {
      throw std::invalid_argument("lambda_0 must equal 1");
    }
  }
}

namespace {

nlohmann::json signed_map(const std::vector<double>& values, int first) {
  nlohmann::json m = nlohmann::json::object();
  for (std::size_t i = 0; i < values.size(); ++i) m[std::to_string(first + static_cast<int>(i))] = values[i];
  return m;
}

// Arrays start at `first`; objects map signed labels to values.
std::vector<double> read_levels(const nlohmann::json& node, int first, int count, const char* field) {
  std::vector<double> out;
  if (node.is_array()) {
    for (const auto& v : node) out.push_back(v.get<double>());
  } else if (node.is_object()) {
    for (int k = 0; k < count; ++k) {
      const std::string key = std::to_string(first + k);
      if (!node.contains(key)) throw std::invalid_argument(std::string(field) + ": missing key " + key);
      out.push_back(node.at(key).get<double>());
    }
  } else {
    throw std::invalid_argument(std::string(field) + ": expected array or object");
  }
  if (static_cast<int>(out.size()) != count) {
    throw std::invalid_argument(std::string(field) + ": expected " + std::to_string(count) + " entries");
  }
  return out;
}

int lowest_key(const nlohmann::json& node) {
  int lo = 0;
  for (auto it = node.begin(); it != node.end(); ++it) lo = std::min(lo, std::stoi(it.key()));
  return lo;
}

}  // namespace

nlohmann::json SystemSpec::to_json() const {
  nlohmann::json doc;
  doc["topology"] = std::string(to_string(topology_));
  doc["d"] = dim();
  std::vector<double> weights;
  for (const auto& t : transitions_) weights.push_back(t.weight);
  if (topology_ == Topology::Intermediate) {
    doc["delta"] = signed_map(anharmonicity_, lowest_);
    doc["lambda"] = signed_map(weights, lowest_);
  } else {
    doc["delta"] = anharmonicity_;
    doc["lambda"] = weights;
  }
  doc["time_unit"] = time_unit_;
  if (omega_ != 0.0) doc["omega"] = omega_;
  return doc;
}

SystemSpec SystemSpec::from_json(const nlohmann::json& doc) {
  const Topology topo = topology_from_string(doc.at("topology").get<std::string>());
  const int d = doc.at("d").get<int>();
  const auto& delta = doc.at("delta");
  const auto& lam = doc.at("lambda");
  int lowest = 0;
  if (topo == Topology::Intermediate) {
    lowest = delta.is_object() ? lowest_key(delta) : -(d - 1) / 2;
    if (doc.contains("lowest_level")) lowest = doc["lowest_level"].get<int>();
  }
  std::vector<double> a = read_levels(delta, lowest, d, "delta");
  std::vector<double> w = read_levels(lam, lowest, d - 1, "lambda");
  SystemSpec spec = topo == Topology::Ladder         ? ladder(std::move(a), std::move(w))
                    : topo == Topology::Intermediate ? intermediate(lowest, std::move(a), std::move(w))
                                                     : star(std::move(a), std::move(w));
  if (doc.contains("time_unit")) spec = spec.with_time_unit(doc["time_unit"].get<std::string>());
  if (doc.contains("omega")) spec = spec.with_omega(doc["omega"].get<double>());
  return spec;
}

SystemSpec build_sno(int d, double delta2) {
  if (d < 3) throw std::invalid_argument("build_sno: d must be >= 3");
  if (delta2 == 0.0 || !std::isfinite(delta2)) throw std::invalid_argument("build_sno: delta2 must be finite and nonzero");
  std::vector<double> a(d), w(d - 1);
  for (int j = 0; j < d; ++j) a[j] = j < 2 ? 0.0 : delta2 * j * (j - 1) / 2.0;
  for (int j = 1; j < d; ++j) w[j - 1] = std::sqrt(static_cast<double>(j));
  return SystemSpec::ladder(std::move(a), std::move(w));
}

SystemSpec intermediate_from_sno(int source_dim, int qubit_lower, double delta2) {
  if (delta2 == 0.0 || !std::isfinite(delta2)) throw std::invalid_argument("intermediate_from_sno: delta2 must be finite and nonzero");
  if (qubit_lower < 1 || qubit_lower + 3 > source_dim) {
    throw std::invalid_argument("intermediate_from_sno: need at least one level below and one above the qubit");
  }
  const int lowest = -qubit_lower;
  std::vector<double> a, w;
  for (int m = lowest; m < source_dim - qubit_lower; ++m) a.push_back(delta2 * m * (m - 1) / 2.0);
  // Source element for k -> k+1 is sqrt(k + q + 1); divide by the new qubit element sqrt(q + 1).
  for (int k = lowest; k + 1 < source_dim - qubit_lower; ++k) {
    w.push_back(k == 0 ? 1.0 : std::sqrt(static_cast<double>(k + qubit_lower + 1) / (qubit_lower + 1)));
  }
  return SystemSpec::intermediate(lowest, std::move(a), std::move(w));
}

SystemSpec build_intermediate_sno(int d, double delta2) {
  if (d % 2 == 0) throw std::invalid_argument("build_intermediate_sno: d must be odd");
  if (d < 5) throw std::invalid_argument("build_intermediate_sno: d must be >= 5");
  return intermediate_from_sno(d, (d - 1) / 2, delta2);
}

HamiltonianGenerators generators(const SystemSpec& spec) {
  const int d = spec.dim();
  HamiltonianGenerators g{Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d)};
  for (int i = 0; i < d; ++i) {
    const int level = spec.level_at(i);
    g.h_drift(i, i) = spec.anharmonicities()[i];
    if (spec.topology() == Topology::Star) {
      g.h_z(i, i) = level == 0 ? 0.0 : (level == 1 ? 1.0 : 2.0);
    } else {
      g.h_z(i, i) = level;
    }
  }
  const Complex I(0.0, 1.0);
  for (const auto& t : spec.transitions()) {
    const int j = spec.index_of(t.lower), k = spec.index_of(t.upper);
    g.h_x(j, k) = g.h_x(k, j) = t.weight;
    g.h_y(j, k) = -I * t.weight;
    g.h_y(k, j) = I * t.weight;
  }
  return g;
}

Matrix hamiltonian_at(const HamiltonianGenerators& gen, double delta, double omega_x, double omega_y) {
  return gen.h_drift + delta * gen.h_z + (0.5 * omega_x) * gen.h_x + (0.5 * omega_y) * gen.h_y;
}

}  // namespace dragforge
