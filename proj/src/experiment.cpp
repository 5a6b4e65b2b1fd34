#include "dragforge/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "dragforge/dressing.hpp"
#include "dragforge/fidelity.hpp"
#include "dragforge/propagator.hpp"

#ifndef DRAGFORGE_VERSION
#define DRAGFORGE_VERSION "0.0.0"
#endif

namespace dragforge {

using nlohmann::json;

std::string_view library_version() { return DRAGFORGE_VERSION; }

SchemaError::SchemaError(std::string path, const std::string& message)
    : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDelta2 = -2.0 * kPi;

std::string_view kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Sweep: return "sweep";
    case ExperimentKind::Optimize: return "optimize";
    case ExperimentKind::Populations: return "populations";
    case ExperimentKind::Dressing: return "dressing";
  }
  return "unknown";
}

ExperimentKind kind_from(const std::string& s) {
  if (s == "sweep") return ExperimentKind::Sweep;
  if (s == "optimize") return ExperimentKind::Optimize;
  if (s == "populations") return ExperimentKind::Populations;
  if (s == "dressing") return ExperimentKind::Dressing;
  throw SchemaError("/kind", "expected one of sweep, optimize, populations, dressing");
}

template <typename T>
T field(const json& doc, const std::string& key, const std::string& path) {
  if (!doc.contains(key)) throw SchemaError(path + "/" + key, "required field missing");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(path + "/" + key, "wrong type");
  }
}

template <typename T>
T field_or(const json& doc, const std::string& key, const std::string& path, T fallback) {
  return doc.contains(key) ? field<T>(doc, key, path) : fallback;
}

SystemSpec spec_from(const json& node) {
  if (!node.is_object()) throw SchemaError("/spec", "expected an object");
  try {
    if (node.contains("builder")) {
      const std::string b = field<std::string>(node, "builder", "/spec");
      const double d2 = field_or<double>(node, "delta2", "/spec", kDelta2);
      if (b == "sno") return build_sno(field<int>(node, "d", "/spec"), d2);
      if (b == "intermediate_sno") return build_intermediate_sno(field<int>(node, "d", "/spec"), d2);
      if (b == "intermediate_window") {
        return intermediate_from_sno(field<int>(node, "source_dim", "/spec"), field<int>(node, "qubit_lower", "/spec"),
                                     d2);
      }
      throw SchemaError("/spec/builder", "expected sno, intermediate_sno or intermediate_window");
    }
    return SystemSpec::from_json(node);
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    throw SchemaError("/spec", e.what());
  }
}

json variant_to_json(const DragVariant& v) {
  if (v.kind != VariantKind::Ansatz) return std::string(to_string(v.kind));
  return {{"ansatz", {{"alpha", v.ansatz.alpha}, {"beta", v.ansatz.beta}, {"gamma", v.ansatz.gamma},
                      {"delta0", v.ansatz.delta0}}}};
}

AnsatzParams ansatz_from(const json& node, const std::string& path) {
  if (!node.is_object()) throw SchemaError(path, "expected an object");
  return {field_or<double>(node, "alpha", path, 1.0), field_or<double>(node, "beta", path, 0.0),
          field_or<double>(node, "gamma", path, 0.0), field_or<double>(node, "delta0", path, 0.0)};
}

DragVariant variant_from(const json& node, const std::string& path) {
  if (node.is_string()) {
    try {
      const VariantKind k = variant_from_string(node.get<std::string>());
      if (k == VariantKind::Ansatz) throw SchemaError(path, "Ansatz needs an {\"ansatz\": {...}} object");
      return {k, {}};
    } catch (const SchemaError&) {
      throw;
    } catch (const std::exception& e) {
      throw SchemaError(path, e.what());
    }
  }
  if (node.is_object() && node.contains("ansatz")) return DragVariant::ansatz_of(ansatz_from(node["ansatz"], path + "/ansatz"));
  throw SchemaError(path, "expected a variant name or an ansatz object");
}

std::vector<double> sigmas_from(const json& node) {
  std::vector<double> out;
  if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (!node[i].is_number()) throw SchemaError("/sigma/" + std::to_string(i), "expected a number");
      out.push_back(node[i].get<double>());
    }
  } else if (node.is_object()) {
    const double lo = field<double>(node, "from", "/sigma"), hi = field<double>(node, "to", "/sigma");
    const int n = field<int>(node, "count", "/sigma");
    if (n < 1) throw SchemaError("/sigma/count", "must be >= 1");
    for (int k = 0; k < n; ++k) out.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
  } else {
    throw SchemaError("/sigma", "expected an array or {from, to, count}");
  }
  if (out.empty()) throw SchemaError("/sigma", "sigma grid is empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0) || !std::isfinite(out[i])) throw SchemaError("/sigma/" + std::to_string(i), "must be positive");
    if (i > 0 && !(out[i] > out[i - 1])) throw SchemaError("/sigma/" + std::to_string(i), "sigma grid must be strictly increasing");
  }
  return out;
}

// Runs body(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure by index.
template <typename Body>
void parallel_for(int n, int jobs, Body body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(jobs, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string manifest_line(const ExperimentConfig& c) { return "# manifest: " + c.name + ".json\n"; }

}  // namespace

GaussianParams ExperimentConfig::pulse(double sigma) const {
  GaussianParams p;
  p.area = area;
  p.sigma = sigma;
  p.t_g = t_g_multiple * sigma;
  p.validate();
  return p;
}

json ExperimentConfig::to_json() const {
  json doc;
  doc["name"] = name;
  doc["kind"] = std::string(kind_name(kind));
  if (spec) doc["spec"] = spec->to_json();
  if (kind == ExperimentKind::Dressing) {
    doc["ratio"] = {{"from", ratio_lo}, {"to", ratio_hi}, {"step", ratio_step}, {"pole_guard", pole_guard}};
    return doc;
  }
  if (kind == ExperimentKind::Optimize) {
    doc["masks"] = json::array();
    for (const auto& m : masks) doc["masks"].push_back(mask_label(m));
    doc["initial"] = {{"alpha", initial.alpha}, {"beta", initial.beta}, {"gamma", initial.gamma},
                      {"delta0", initial.delta0}};
  } else {
    doc["variants"] = json::array();
    for (const auto& v : variants) doc["variants"].push_back(variant_to_json(v));
  }
  if (kind == ExperimentKind::Populations) doc["initial_level"] = initial_level;
  doc["sigma"] = sigmas;
  doc["t_g_rule"] = {{"multiple_of_sigma", t_g_multiple}};
  doc["area"] = area;
  doc["grid"] = {{"n_steps", n_steps}, {"tol", tol}, {"max_steps", max_steps}};
  return doc;
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "config must be a JSON object");
  ExperimentConfig c;
  c.name = field<std::string>(doc, "name", "");
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
    throw SchemaError("/name", "must be a non-empty file stem");
  }
  c.kind = kind_from(field_or<std::string>(doc, "kind", "", "sweep"));
  if (c.kind == ExperimentKind::Dressing) {
    if (doc.contains("ratio")) {
      const json& r = doc["ratio"];
      c.ratio_lo = field_or<double>(r, "from", "/ratio", c.ratio_lo);
      c.ratio_hi = field_or<double>(r, "to", "/ratio", c.ratio_hi);
      c.ratio_step = field_or<double>(r, "step", "/ratio", c.ratio_step);
      c.pole_guard = field_or<double>(r, "pole_guard", "/ratio", c.pole_guard);
      if (!(c.ratio_hi > c.ratio_lo)) throw SchemaError("/ratio/to", "must exceed from");
      if (!(c.ratio_step > 0.0)) throw SchemaError("/ratio/step", "must be positive");
    }
    return c;
  }
  if (!doc.contains("spec")) throw SchemaError("/spec", "required field missing");
  c.spec = spec_from(doc["spec"]);
  if (c.kind == ExperimentKind::Optimize) {
    if (!doc.contains("masks") || !doc["masks"].is_array() || doc["masks"].empty()) {
      throw SchemaError("/masks", "expected a non-empty array of masks");
    }
    for (std::size_t i = 0; i < doc["masks"].size(); ++i) {
      const std::string path = "/masks/" + std::to_string(i);
      if (!doc["masks"][i].is_string()) throw SchemaError(path, "expected a string like \"alpha+beta\"");
      try {
        c.masks.push_back(mask_from_label(doc["masks"][i].get<std::string>()));
      } catch (const std::exception& e) {
        throw SchemaError(path, e.what());
      }
    }
    if (doc.contains("initial")) c.initial = ansatz_from(doc["initial"], "/initial");
  } else {
    if (!doc.contains("variants") || !doc["variants"].is_array() || doc["variants"].empty()) {
      throw SchemaError("/variants", "expected a non-empty array of variants");
    }
    for (std::size_t i = 0; i < doc["variants"].size(); ++i) {
      c.variants.push_back(variant_from(doc["variants"][i], "/variants/" + std::to_string(i)));
    }
  }
  if (!doc.contains("sigma")) throw SchemaError("/sigma", "required field missing");
  c.sigmas = sigmas_from(doc["sigma"]);
  if (doc.contains("t_g_rule")) {
    c.t_g_multiple = field<double>(doc["t_g_rule"], "multiple_of_sigma", "/t_g_rule");
    if (!(c.t_g_multiple > 0.0)) throw SchemaError("/t_g_rule/multiple_of_sigma", "must be positive");
  }
  c.area = field_or<double>(doc, "area", "", c.area);
  if (doc.contains("grid")) {
    c.n_steps = field_or<int>(doc["grid"], "n_steps", "/grid", 0);
    c.tol = field_or<double>(doc["grid"], "tol", "/grid", c.tol);
    if (c.n_steps != 0 && c.n_steps < TimeGrid::kMinSteps) throw SchemaError("/grid/n_steps", "must be 0 or >= 16");
    if (!(c.tol > 0.0)) throw SchemaError("/grid/tol", "must be positive");
    c.max_steps = field_or<int>(doc["grid"], "max_steps", "/grid", c.max_steps);
    if (c.max_steps < 512) throw SchemaError("/grid/max_steps", "must be >= 512");
  }
  c.initial_level = field_or<int>(doc, "initial_level", "", 0);
  if (c.kind == ExperimentKind::Populations && !c.spec->has_level(c.initial_level)) {
    throw SchemaError("/initial_level", "level not present in the spec");
  }
  // Fail early on variants that have no closed form for this topology.
  for (std::size_t i = 0; i < c.variants.size(); ++i) {
    try {
      build_controls_any(*c.spec, c.variants[i], c.pulse(c.sigmas.front()));
    } catch (const std::exception& e) {
      throw SchemaError("/variants/" + std::to_string(i), e.what());
    }
  }
  return c;
}

std::vector<std::string> preset_names() {
  return {"gaussian-benchmark", "fig3", "fig4", "fig5a", "fig5b", "fig7", "fig8", "fig9", "pop-traces"};
}

ExperimentConfig preset(const std::string& name) {
  const std::vector<double> benchmark{1.0 / 3.0, 2.0 / 3.0, 1.5};
  const std::vector<double> sweep{0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 5.0 / 6.0, 1.0, 1.25, 1.5, 1.75, 2.0};
  auto v = [](std::initializer_list<VariantKind> ks) {
    std::vector<DragVariant> out;
    for (VariantKind k : ks) out.push_back({k, {}});
    return out;
  };
  ExperimentConfig c;
  c.name = name;
  c.spec = build_sno(5, kDelta2);
  c.sigmas = sweep;
  c.n_steps = 4096;
  using K = VariantKind;
  if (name == "gaussian-benchmark") {
    c.variants = v({K::Gaussian0});
    c.sigmas = benchmark;
  } else if (name == "fig3") {
    c.variants = v({K::Gaussian0, K::ZOnly1, K::YOnly1, K::Drag1, K::Optimal1});
  } else if (name == "fig4") {
    c.variants = v({K::Gaussian0, K::ZOnly2, K::YOnly2, K::Drag2, K::Optimal1});
  } else if (name == "fig5a" || name == "fig5b") {
    c.kind = ExperimentKind::Optimize;
    c.sigmas = {0.5, 2.0 / 3.0, 1.0, 1.5};
    c.tol = 1e-11;
    const bool d0 = name == "fig5b";
    c.masks = {{true, false, false, d0}, {true, false, true, d0}, {true, true, false, d0}, {true, true, true, d0}};
  } else if (name == "fig7") {
    c.spec = intermediate_from_sno(6, 2, kDelta2);
    c.variants = v({K::Gaussian0, K::ZOnly1, K::YOnly1, K::Optimal1});
  } else if (name == "fig8") {
    c.spec = SystemSpec::star({0.0, 0.0, kDelta2, 2.0 * kDelta2, 3.0 * kDelta2, 4.0 * kDelta2}, {1, 1, 1, 1, 1});
    c.variants = v({K::Gaussian0, K::ZOnly1, K::YOnly1, K::Optimal1});
  } else if (name == "fig9") {
    c.kind = ExperimentKind::Dressing;
    c.spec.reset();
  } else if (name == "pop-traces") {
    c.kind = ExperimentKind::Populations;
    c.variants = v({K::Gaussian0});
    c.sigmas = benchmark;
  } else {
    std::string list;
    for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
    throw UnknownPreset("unknown preset '" + name + "'; available presets: " + list);
  }
  return c;
}

ExperimentOutput run_experiment(const ExperimentConfig& c, int jobs) {
  ExperimentOutput out;
  json& m = out.manifest;
  m["config"] = c.to_json();
  m["code_version"] = std::string(library_version());
  m["files"] = json::array();
  m["points"] = json::array();

  if (c.kind == ExperimentKind::Dressing) {
    const auto curve = lambda_curve(c.ratio_lo, c.ratio_hi, c.ratio_step, c.pole_guard);
    out.files.push_back({c.name + ".csv", manifest_line(c) + lambda_curve_csv(curve)});
    m["rows"] = curve.size();
  } else if (c.kind == ExperimentKind::Sweep) {
    struct Point {
      double sigma;
      DragVariant variant;
      FidelityReport report;
    };
    std::vector<Point> points;
    for (double s : c.sigmas) {
      for (const auto& var : c.variants) points.push_back({s, var, {}});
    }
    parallel_for(static_cast<int>(points.size()), jobs, [&](int i) {
      Point& p = points[i];
      const ControlSet cs = build_controls_any(*c.spec, p.variant, c.pulse(p.sigma));
      p.report = c.n_steps > 0 ? not_gate_report(*c.spec, cs, c.n_steps) : not_gate_report_converged(*c.spec, cs, c.tol, c.max_steps);
    });
    std::ostringstream csv;
    csv << manifest_line(c) << "sigma,variant,gate_error,n_steps\n";
    for (const Point& p : points) {
      csv << format_double(p.sigma) << ',' << p.report.variant << ',' << format_double(p.report.gate_error) << ','
          << p.report.n_steps << '\n';
      m["points"].push_back({{"sigma", p.sigma}, {"variant", variant_to_json(p.variant)},
                             {"gate_error", p.report.gate_error}, {"n_steps", p.report.n_steps}});
    }
    out.files.push_back({c.name + ".csv", csv.str()});
  } else if (c.kind == ExperimentKind::Optimize) {
    struct Point {
      double sigma;
      ParameterMask mask;
      OptimizeResult result;
    };
    std::vector<Point> points;
    for (double s : c.sigmas) {
      for (const auto& mask : c.masks) points.push_back({s, mask, {}});
    }
    parallel_for(static_cast<int>(points.size()), jobs, [&](int i) {
      Point& p = points[i];
      OptimizeTask task{*c.spec, c.pulse(p.sigma), p.mask, c.initial};
      task.propagation_tol = c.tol;
      task.n_steps = c.n_steps;
      task.max_steps = c.max_steps;
      p.result = optimize(task);
    });
    std::ostringstream csv;
    csv << manifest_line(c) << optimize_csv_header();
    for (const Point& p : points) {
      csv << optimize_csv_row(p.sigma, p.mask, p.result);
      json row = p.result.to_json();
      row["sigma"] = p.sigma;
      row["mask"] = mask_label(p.mask);
      m["points"].push_back(row);
    }
    out.files.push_back({c.name + ".csv", csv.str()});
  } else {
    struct Point {
      double sigma;
      DragVariant variant;
      std::string file;
      std::string csv;
      int n_steps;
      double leakage;
    };
    std::vector<Point> points;
    for (std::size_t i = 0; i < c.sigmas.size(); ++i) {
      for (const auto& var : c.variants) {
        points.push_back({c.sigmas[i], var,
                          c.name + "_" + std::string(to_string(var.kind)) + "_s" + std::to_string(i) + ".csv", "", 0,
                          0.0});
      }
    }
    parallel_for(static_cast<int>(points.size()), jobs, [&](int i) {
      Point& p = points[i];
      const ControlSet cs = build_controls_any(*c.spec, p.variant, c.pulse(p.sigma));
      p.n_steps = c.n_steps > 0 ? c.n_steps : converge(*c.spec, cs, c.tol, 256, c.max_steps).n_steps;
      const PopulationTrace trace = populations(*c.spec, cs, TimeGrid::over(cs.t_g(), p.n_steps), c.initial_level);
      for (std::size_t j = 0; j < trace.levels.size(); ++j) {
        if (trace.levels[j] != 0 && trace.levels[j] != 1) p.leakage += trace.p.back()[j];
      }
      p.csv = manifest_line(c) + trace.csv();
    });
    for (Point& p : points) {
      out.files.push_back({p.file, std::move(p.csv)});
      m["points"].push_back({{"sigma", p.sigma}, {"variant", variant_to_json(p.variant)}, {"file", p.file},
                             {"n_steps", p.n_steps}, {"final_leakage", p.leakage}});
    }
  }
  for (const auto& f : out.files) m["files"].push_back(f.name);
  out.files.push_back({c.name + ".json", m.dump(2) + "\n"});
  return out;
}

void write_outputs(const ExperimentOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& f : out.files) {
    std::ofstream os(dir / f.name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + (dir / f.name).string() + " for writing");
    os << f.content;
  }
}

}  // namespace dragforge
