#pragma once
// Run configuration: a single JSON document naming every object a batch run
// needs (quadrature, test functions, charges, measurement regions) plus
// command-specific blocks (scenario lists, r/t grids, word scripts).

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "charges.hpp"
#include "testfn.hpp"

namespace weylcharge {

// Configuration problems map to exit code 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  nlohmann::json raw;            // full document (digested for provenance)
  std::string raw_text;          // exact file bytes
  std::string dir;               // directory of the config file
  QuadratureSpec quadrature;
  std::map<std::string, TestFn> functions;
  std::map<std::string, Dipole> charges;
  std::map<std::string, MeasurementFn> measurements;

  const TestFn& function(const std::string& name) const {
    auto it = functions.find(name);
    if (it == functions.end())
      throw ConfigError("unknown function name: '" + name + "'");
    return it->second;
  }
  const Dipole& charge(const std::string& name) const {
    auto it = charges.find(name);
    if (it == charges.end())
      throw ConfigError("unknown charge name: '" + name + "'");
    return it->second;
  }
  const MeasurementFn& measurement(const std::string& name) const {
    auto it = measurements.find(name);
    if (it == measurements.end())
      throw ConfigError("unknown measurement name: '" + name + "'");
    return it->second;
  }
  const nlohmann::json* block(const std::string& name) const {
    auto it = raw.find(name);
    return it == raw.end() ? nullptr : &*it;
  }
};

namespace detail {

inline double get_num(const nlohmann::json& j, const std::string& field,
                      double dflt, bool required = false) {
  auto it = j.find(field);
  if (it == j.end()) {
    if (required) throw ConfigError("missing required field '" + field + "'");
    return dflt;
  }
  if (!it->is_number())
    throw ConfigError("field '" + field + "' must be a number");
  return it->get<double>();
}

// A TestFn reference: either a name into `functions` or an inline object.
inline TestFn resolve_fn(const RunConfig& cfg, const nlohmann::json& j,
                         const std::string& ctx) {
  try {
    if (j.is_string()) return cfg.function(j.get<std::string>());
    if (j.is_object()) return testfn_from_json(j);
  } catch (const std::exception& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  throw ConfigError(ctx + ": expected a function name or inline function");
}

}  // namespace detail

inline QuadratureSpec parse_quadrature(const nlohmann::json& j) {
  QuadratureSpec s;
  s.p_max = detail::get_num(j, "p_max", s.p_max);
  s.radial_panels = static_cast<int>(
      detail::get_num(j, "radial_panels", s.radial_panels));
  s.radial_order = static_cast<int>(
      detail::get_num(j, "radial_order", s.radial_order));
  s.n_theta = static_cast<int>(detail::get_num(j, "n_theta", s.n_theta));
  s.n_phi = static_cast<int>(detail::get_num(j, "n_phi", s.n_phi));
  if (s.p_max <= 0.0 || s.radial_panels < 1 || s.radial_order < 2 ||
      s.n_theta < 2 || s.n_phi < 2)
    throw ConfigError("invalid quadrature block");
  if (s.n_phi % 2 != 0) throw ConfigError("quadrature.n_phi must be even");
  return s;
}

inline MeasurementFn parse_measurement(const nlohmann::json& j,
                                       const std::string& name) {
  MeasurementFn mf;
  auto tau = j.find("tau");
  if (tau == j.end())
    throw ConfigError("measurement '" + name + "' lacks a tau block");
  mf.t0 = detail::get_num(*tau, "center", 0.0);
  mf.half_duration = detail::get_num(*tau, "half_duration", 0.0, true);
  auto box = j.find("plateau_box");
  if (box == j.end())
    throw ConfigError("measurement '" + name + "' lacks a plateau_box");
  auto center = box->value("center", std::vector<double>{0.0, 0.0, 0.0});
  auto inner = box->find("inner_half");
  if (inner == box->end() || !inner->is_array() || inner->size() != 3)
    throw ConfigError("measurement '" + name +
                      "': plateau_box.inner_half must have 3 entries");
  if (center.size() != 3)
    throw ConfigError("measurement '" + name +
                      "': plateau_box.center must have 3 entries");
  for (int i = 0; i < 3; ++i) {
    mf.center[i] = center[i];
    mf.inner_half[i] = (*inner)[i].get<double>();
  }
  mf.margin = detail::get_num(j, "margin", 0.0, true);
  if (mf.half_duration <= 0.0 || mf.margin <= 0.0 ||
      mf.inner_half[0] <= 0.0 || mf.inner_half[1] <= 0.0 ||
      mf.inner_half[2] <= 0.0)
    throw ConfigError("measurement '" + name + "': extents must be positive");
  return mf;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();

  RunConfig cfg;
  cfg.raw_text = ss.str();
  auto slash = path.find_last_of('/');
  cfg.dir = (slash == std::string::npos) ? "." : path.substr(0, slash);
  try {
    cfg.raw = nlohmann::json::parse(cfg.raw_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!cfg.raw.is_object()) throw ConfigError("config root must be an object");

  cfg.quadrature = parse_quadrature(cfg.raw.value("quadrature",
                                                  nlohmann::json::object()));

  auto fns = cfg.raw.find("functions");
  if (fns != cfg.raw.end()) {
    if (!fns->is_object())
      throw ConfigError("'functions' must be an object of named functions");
    for (auto it = fns->begin(); it != fns->end(); ++it) {
      try {
        cfg.functions.emplace(it.key(), testfn_from_json(it.value()));
      } catch (const std::exception& e) {
        throw ConfigError("function '" + it.key() + "': " + e.what());
      }
    }
  }
  if (cfg.functions.empty())
    throw ConfigError("no objects: the config defines no functions");

  auto chg = cfg.raw.find("charges");
  if (chg != cfg.raw.end())
    for (auto it = chg->begin(); it != chg->end(); ++it) {
      const auto& j = it.value();
      TestFn theta = detail::resolve_fn(cfg, j.at("theta"),
                                        "charge '" + it.key() + "' theta");
      TestFn sigma = detail::resolve_fn(cfg, j.at("sigma"),
                                        "charge '" + it.key() + "' sigma");
      double r = detail::get_num(j, "r", 1.0);
      if (r <= 0.0)
        throw ConfigError("charge '" + it.key() + "': r must be positive");
      try {
        cfg.charges.emplace(it.key(), Dipole(theta, sigma, r));
      } catch (const std::exception& e) {
        throw ConfigError("charge '" + it.key() + "': " + e.what());
      }
    }

  auto ms = cfg.raw.find("measurements");
  if (ms != cfg.raw.end())
    for (auto it = ms->begin(); it != ms->end(); ++it)
      cfg.measurements.emplace(it.key(),
                               parse_measurement(it.value(), it.key()));

  return cfg;
}

// Strictly increasing positive grid (r or t grids).
inline std::vector<double> parse_grid(const nlohmann::json& j,
                                      const std::string& name) {
  if (!j.is_array() || j.empty())
    throw ConfigError("'" + name + "' must be a non-empty array");
  std::vector<double> g;
  for (const auto& v : j) {
    if (!v.is_number())
      throw ConfigError("'" + name + "' entries must be numbers");
    g.push_back(v.get<double>());
    if (g.size() > 1 && g[g.size() - 1] <= g[g.size() - 2])
      throw ConfigError("'" + name + "' must be strictly increasing");
  }
  return g;
}

}  // namespace weylcharge
