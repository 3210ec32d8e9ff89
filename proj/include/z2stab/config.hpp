// Copyright 2026 The z2stab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Scenario configuration: sectioned key-value text format with line-numbered
// errors, typed access, override handling, and assembly into the per-scenario
// parameter structs.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "z2stab/lindblad.hpp"
#include "z2stab/trotter.hpp"

namespace z2stab {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

struct IniEntry {
  std::string key;
  std::string value;
  int line = 0;
  mutable bool consumed = false;
};

/// Parsed sectioned key-value file. Sections keep file order; duplicate keys
/// within a section are rejected at parse time.
class IniDoc {
 public:
  static IniDoc parse(const std::string& text) {
    IniDoc doc;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = raw;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section header");
        section = detail::trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
        doc.section_order_.push_back(section);
        doc.sections_.try_emplace(section);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
      if (section.empty())
        throw ConfigError("config line " + std::to_string(line_no) + ": key before any [section]");
      IniEntry e;
      e.key = detail::trim(line.substr(0, eq));
      e.value = detail::trim(line.substr(eq + 1));
      e.line = line_no;
      if (e.key.empty())
        throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
      auto& entries = doc.sections_[section];
      for (const auto& prev : entries)
        if (prev.key == e.key)
          throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + e.key +
                            "' in [" + section + "]");
      entries.push_back(std::move(e));
    }
    return doc;
  }

  /// Inserts or replaces section.key, as used by command-line overrides.
  void set(const std::string& section, const std::string& key, const std::string& value) {
    if (sections_.find(section) == sections_.end()) section_order_.push_back(section);
    auto& entries = sections_[section];
    for (auto& e : entries)
      if (e.key == key) {
        e.value = value;
        return;
      }
    entries.push_back({key, value, 0, false});
  }

  /// Parses "section.key=value" and applies it.
  void apply_override(const std::string& spec) {
    const auto eq = spec.find('=');
    const auto dot = spec.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + spec + "' is not of the form section.key=value");
    set(detail::trim(spec.substr(0, dot)), detail::trim(spec.substr(dot + 1, eq - dot - 1)),
        detail::trim(spec.substr(eq + 1)));
  }

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return std::nullopt;
    for (const auto& e : it->second)
      if (e.key == key) {
        e.consumed = true;
        return e.value;
      }
    return std::nullopt;
  }

  double get_double(const std::string& section, const std::string& key, double fallback) const {
    const auto v = get(section, key);
    return v ? parse_double(section, key, *v) : fallback;
  }

  int get_int(const std::string& section, const std::string& key, int fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    try {
      size_t pos = 0;
      const int out = std::stoi(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("");
      return out;
    } catch (const std::exception&) {
      throw ConfigError(where(section, key) + ": '" + *v + "' is not an integer");
    }
  }

  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    try {
      size_t pos = 0;
      const std::uint64_t out = std::stoull(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("");
      return out;
    } catch (const std::exception&) {
      throw ConfigError(where(section, key) + ": '" + *v + "' is not a non-negative integer");
    }
  }

  bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigError(where(section, key) + ": '" + *v + "' is not a boolean");
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    const auto v = get(section, key);
    return v ? *v : fallback;
  }

  std::vector<double> get_double_list(const std::string& section, const std::string& key) const {
    const auto v = get(section, key);
    std::vector<double> out;
    if (!v) return out;
    for (const std::string& tok : split_list(*v)) out.push_back(parse_double(section, key, tok));
    return out;
  }

  std::vector<std::string> get_string_list(const std::string& section,
                                           const std::string& key) const {
    const auto v = get(section, key);
    return v ? split_list(*v) : std::vector<std::string>{};
  }

  bool has_section(const std::string& section) const {
    return sections_.find(section) != sections_.end();
  }

  /// Fails on the first key no reader asked for, to catch typos early.
  void reject_unconsumed() const {
    for (const auto& name : section_order_) {
      const auto it = sections_.find(name);
      if (it == sections_.end()) continue;
      for (const auto& e : it->second)
        if (!e.consumed)
          throw ConfigError("config line " + std::to_string(e.line) + ": unknown key '" + e.key +
                            "' in [" + name + "]");
    }
  }

 private:
  static std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
      if (c == ',') {
        cur = detail::trim(cur);
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    cur = detail::trim(cur);
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

  static std::string where(const std::string& section, const std::string& key) {
    return "config [" + section + "] " + key;
  }

  double parse_double(const std::string& section, const std::string& key,
                      const std::string& v) const {
    try {
      size_t pos = 0;
      const double out = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("");
      return out;
    } catch (const std::exception&) {
      throw ConfigError(where(section, key) + ": '" + v + "' is not a number");
    }
  }

  std::vector<std::string> section_order_;
  std::map<std::string, std::vector<IniEntry>> sections_;
};

enum class ScenarioKind { Evolve, Steady, Sweep, Trotter, Spectrum };

inline std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Evolve: return "evolve";
    case ScenarioKind::Steady: return "steady";
    case ScenarioKind::Sweep: return "sweep";
    case ScenarioKind::Trotter: return "trotter";
    case ScenarioKind::Spectrum: return "spectrum";
  }
  return "?";
}

inline ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "evolve") return ScenarioKind::Evolve;
  if (s == "steady") return ScenarioKind::Steady;
  if (s == "sweep") return ScenarioKind::Sweep;
  if (s == "trotter") return ScenarioKind::Trotter;
  if (s == "spectrum") return ScenarioKind::Spectrum;
  throw ConfigError("unknown scenario kind '" + s + "'");
}

/// Named list of values for one swept or varied model parameter.
struct VaryAxis {
  std::string param;
  std::vector<double> values;
};

/// The numeric model parameters addressable by sweeps and overrides.
inline const std::map<std::string, double ModelConfig::*>& numeric_model_params() {
  static const std::map<std::string, double ModelConfig::*> m = {
      {"j_a", &ModelConfig::j_a},       {"j_f", &ModelConfig::j_f},
      {"c1", &ModelConfig::c1},         {"c2", &ModelConfig::c2},
      {"c3", &ModelConfig::c3},         {"c4", &ModelConfig::c4},
      {"lambda", &ModelConfig::lambda}, {"g", &ModelConfig::g},
      {"gamma", &ModelConfig::gamma},   {"gamma_c", &ModelConfig::gamma_c},
  };
  return m;
}

inline void set_model_param(ModelConfig& model, const std::string& name, double value) {
  const auto& params = numeric_model_params();
  const auto it = params.find(name);
  if (it == params.end()) throw ConfigError("unknown model parameter '" + name + "'");
  model.*(it->second) = value;
}

struct EvolveSection {
  double t_final = 10.0;
  double sample_interval = 1.0;
  EvolveMethod method = EvolveMethod::Auto;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double smoothing_window = 0.0;  // > 0 adds trailing-average columns
  VaryAxis vary;                  // empty param means a single run
  // Multiplies gamma for vary values with gamma_c > 0, modeling the extra
  // noisy CNOTs of the measurement layers in the continuous picture.
  double gamma_overhead_when_corrected = 1.0;
};

struct SteadySection {
  bool force_iterative = false;
};

struct SweepSection {
  std::vector<VaryAxis> axes;          // one or two
  std::vector<NoiseKind> noise_kinds;  // empty: use the model's noise kind
  bool transitions_sidecar = false;
};

struct TrotterSection {
  CircuitRunConfig circuit;
  bool p_explicit = false;  // false: derive p from model gamma and dt
};

/// Everything one run needs; built from a parsed config document.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Evolve;
  ModelConfig model;
  EvolveSection evolve;
  SteadySection steady;
  SweepSection sweep;
  TrotterSection trotter;
  std::string output_path = "out.csv";
  std::uint64_t seed = 1;
  std::string raw_text;  // config echo for the metadata sidecar
};

inline ScenarioConfig build_scenario(const IniDoc& doc, const std::string& raw_text,
                                     std::optional<ScenarioKind> expected = std::nullopt) {
  ScenarioConfig cfg;
  cfg.raw_text = raw_text;

  const auto kind_str = doc.get("scenario", "kind");
  if (kind_str) {
    cfg.kind = scenario_kind_from_string(*kind_str);
    if (expected && *expected != cfg.kind)
      throw ConfigError("config declares scenario '" + to_string(cfg.kind) +
                        "' but the subcommand asked for '" + to_string(*expected) + "'");
  } else if (expected) {
    cfg.kind = *expected;
  } else {
    throw ConfigError("missing [scenario] kind");
  }
  cfg.seed = doc.get_u64("scenario", "seed", 1);

  ModelConfig& m = cfg.model;
  m.n = doc.get_int("model", "n", m.n);
  for (const auto& [name, member] : numeric_model_params())
    m.*member = doc.get_double("model", name, m.*member);
  if (const auto v = doc.get("model", "noise")) m.noise = noise_kind_from_string(*v);
  if (const auto v = doc.get("model", "initial")) m.initial = initial_state_from_string(*v);
  m.validate();

  EvolveSection& ev = cfg.evolve;
  ev.t_final = doc.get_double("evolve", "t_final", ev.t_final);
  ev.sample_interval = doc.get_double("evolve", "sample_interval", ev.sample_interval);
  if (const auto v = doc.get("evolve", "method")) ev.method = evolve_method_from_string(*v);
  ev.rel_tol = doc.get_double("evolve", "rel_tol", ev.rel_tol);
  ev.abs_tol = doc.get_double("evolve", "abs_tol", ev.abs_tol);
  ev.smoothing_window = doc.get_double("evolve", "smoothing_window", ev.smoothing_window);
  ev.vary.param = doc.get_string("evolve", "vary", "");
  ev.vary.values = doc.get_double_list("evolve", "values");
  ev.gamma_overhead_when_corrected =
      doc.get_double("evolve", "gamma_overhead_when_corrected", 1.0);
  if (!(ev.t_final > 0) || !(ev.sample_interval > 0))
    throw ConfigError("config [evolve]: t_final and sample_interval must be positive");
  if (ev.smoothing_window < 0) throw ConfigError("config [evolve]: smoothing_window must be >= 0");
  if (!ev.vary.param.empty()) {
    if (numeric_model_params().find(ev.vary.param) == numeric_model_params().end())
      throw ConfigError("config [evolve]: vary names unknown parameter '" + ev.vary.param + "'");
    if (ev.vary.values.empty())
      throw ConfigError("config [evolve]: vary set but values list is empty");
  } else if (!ev.vary.values.empty()) {
    throw ConfigError("config [evolve]: values given without a vary parameter");
  }

  cfg.steady.force_iterative = doc.get_bool("steady", "force_iterative", false);

  SweepSection& sw = cfg.sweep;
  for (int axis = 1; axis <= 2; ++axis) {
    const std::string suffix = std::to_string(axis);
    const std::string param = doc.get_string("sweep", "axis" + suffix, "");
    std::vector<double> values = doc.get_double_list("sweep", "values" + suffix);
    if (param.empty() && values.empty()) continue;
    if (param.empty() || values.empty())
      throw ConfigError("config [sweep]: axis" + suffix + " and values" + suffix +
                        " must be given together and non-empty");
    if (numeric_model_params().find(param) == numeric_model_params().end())
      throw ConfigError("config [sweep]: axis" + suffix + " names unknown parameter '" + param + "'");
    sw.axes.push_back({param, std::move(values)});
  }
  for (const std::string& s : doc.get_string_list("sweep", "noise_kinds"))
    sw.noise_kinds.push_back(noise_kind_from_string(s));
  sw.transitions_sidecar = doc.get_bool("sweep", "transitions_sidecar", false);
  if (cfg.kind == ScenarioKind::Sweep && sw.axes.empty())
    throw ConfigError("config [sweep]: a sweep scenario needs at least one axis");

  TrotterSection& tr = cfg.trotter;
  CircuitRunConfig& cc = tr.circuit;
  cc.dt = doc.get_double("trotter", "dt", cc.dt);
  if (const auto v = doc.get("trotter", "p")) {
    cc.p = doc.get_double("trotter", "p", cc.p);  // value re-read for uniform error text
    tr.p_explicit = true;
  }
  cc.n_between = doc.get_int("trotter", "n_between", cc.n_between);
  cc.n_traj = doc.get_int("trotter", "n_traj", cc.n_traj);
  cc.t_final = doc.get_double("trotter", "t_final", cc.t_final);
  cc.sample_interval = doc.get_double("trotter", "sample_interval", cc.sample_interval);
  cc.seed = cfg.seed;
  if (cfg.kind == ScenarioKind::Trotter) {
    if (!tr.p_explicit) cc.p = cnot_error_probability(cfg.model.gamma, cc.dt);
    cc.validate();
    if (cfg.model.lambda != 0)
      throw ConfigError("config: the trotter scenario supports lambda = 0 only");
  }

  cfg.output_path = doc.get_string("output", "path", cfg.output_path);

  doc.reject_unconsumed();
  return cfg;
}

inline ScenarioConfig load_scenario_text(const std::string& text,
                                         std::optional<ScenarioKind> expected = std::nullopt,
                                         const std::vector<std::string>& overrides = {}) {
  IniDoc doc = IniDoc::parse(text);
  for (const std::string& o : overrides) doc.apply_override(o);
  return build_scenario(doc, text, expected);
}

}  // namespace z2stab
