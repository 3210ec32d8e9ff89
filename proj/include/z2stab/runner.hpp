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
// Scenario execution: dispatches a ScenarioConfig to the evolution, steady
// state, sweep, circuit, or spectrum engine and writes CSV output plus a
// JSON metadata sidecar. Output bytes depend only on the config and seed.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "z2stab/config.hpp"
#include "z2stab/observables.hpp"
#include "z2stab/trotter.hpp"

namespace z2stab {

namespace detail {

inline std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

/// Compact label for column suffixes and file names, e.g. "gamma_c=0.1".
inline std::string format_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

/// Runs fn(i) for i in [0, count) on the given number of threads. Work items
/// must write to disjoint slots; the first exception is rethrown.
inline void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> cursor{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto body = [&] {
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

/// Column-oriented CSV assembly with fixed formatting, so identical inputs
/// produce identical bytes.
class CsvTable {
 public:
  void add_column(std::string name, const std::vector<double>& values) {
    if (!columns_.empty() && values.size() != columns_.front().second.size())
      throw std::invalid_argument("CsvTable: column '" + name + "' has mismatched length");
    columns_.emplace_back(std::move(name), values);
  }

  size_t n_rows() const { return columns_.empty() ? 0 : columns_.front().second.size(); }

  std::string to_string(const std::vector<std::vector<std::string>>* text_cells = nullptr) const {
    std::string out;
    for (size_t c = 0; c < columns_.size(); ++c) {
      if (c) out += ',';
      out += columns_[c].first;
    }
    if (text_cells)
      for (const auto& col : *text_cells) {
        out += ',';
        out += col[0];  // header stored in row 0
      }
    out += '\n';
    for (size_t r = 0; r < n_rows(); ++r) {
      for (size_t c = 0; c < columns_.size(); ++c) {
        if (c) out += ',';
        out += detail::format_value(columns_[c].second[r]);
      }
      if (text_cells)
        for (const auto& col : *text_cells) {
          out += ',';
          out += col[r + 1];
        }
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::vector<double>>> columns_;
};

inline void write_text_file(const std::string& path, const std::string& body) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// <stem>_<tag><ext> next to the main output file.
inline std::string sibling_path(const std::string& path, const std::string& tag) {
  const std::filesystem::path p(path);
  const std::filesystem::path name = p.stem().string() + "_" + tag + p.extension().string();
  return (p.has_parent_path() ? p.parent_path() / name : name).string();
}

struct RunResult {
  std::vector<std::string> outputs;  // CSV files, in the order written
  double wall_seconds = 0;
};

namespace detail {

inline const std::vector<std::string>& density_observable_names() {
  static const std::vector<std::string> names = {"eps",    "sector_energy", "link_link",
                                                "matter_matter", "energy", "sector_weight"};
  return names;
}

/// The standard observable set on a density matrix. Sector energy reports nan
/// when the sector weight is at the numerical floor instead of failing.
inline std::vector<double> density_observables(const Observables& obs, const DMat& rho) {
  std::vector<double> v;
  v.push_back(obs.gauge_violation(rho));
  try {
    v.push_back(obs.gauge_sector_energy(rho));
  } catch (const std::domain_error&) {
    v.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  v.push_back(obs.link_link_correlator(rho));
  v.push_back(obs.matter_matter_correlator(rho));
  v.push_back(obs.h0_energy(rho));
  v.push_back(obs.sector_weight(rho));
  return v;
}

inline JumpOperatorSet all_jumps(const ModelConfig& model) {
  JumpOperatorSet jumps = build_noise_jumps(model);
  for (auto& c : build_correction_jumps(model)) jumps.push_back(std::move(c));
  return jumps;
}

struct EvolveRunData {
  std::vector<double> times;
  std::vector<std::vector<double>> series;  // one vector per observable name
};

inline EvolveRunData run_single_evolution(const ModelConfig& model, const EvolveSection& ev) {
  EvolutionProblem prob(build_full_hamiltonian(model), all_jumps(model), initial_state(model));
  prob.t_final = ev.t_final;
  prob.sample_interval = ev.sample_interval;
  prob.method = ev.method;
  prob.rel_tol = ev.rel_tol;
  prob.abs_tol = ev.abs_tol;
  const Observables obs(model);
  EvolveRunData data;
  data.series.resize(density_observable_names().size());
  evolve(prob, [&](double t, const DMat& rho) {
    data.times.push_back(t);
    const std::vector<double> row = density_observables(obs, rho);
    for (size_t k = 0; k < row.size(); ++k) data.series[k].push_back(row[k]);
  });
  return data;
}

inline ModelConfig model_for_vary_value(const ScenarioConfig& cfg, double value) {
  ModelConfig model = cfg.model;
  set_model_param(model, cfg.evolve.vary.param, value);
  if (cfg.evolve.vary.param == "gamma_c" && value > 0)
    model.gamma *= cfg.evolve.gamma_overhead_when_corrected;
  model.validate();
  return model;
}

}  // namespace detail

/// Time evolution of the master equation; with a vary axis, one labeled
/// column group per parameter value, all on the shared sample grid.
inline std::vector<std::string> run_evolve_scenario(const ScenarioConfig& cfg, int workers) {
  const auto& names = detail::density_observable_names();
  std::vector<double> values = cfg.evolve.vary.values;
  const bool varied = !cfg.evolve.vary.param.empty();
  if (!varied) values = {0.0};

  std::vector<detail::EvolveRunData> runs(values.size());
  detail::parallel_for(static_cast<int>(values.size()), workers, [&](int i) {
    const ModelConfig model =
        varied ? detail::model_for_vary_value(cfg, values[i]) : cfg.model;
    runs[i] = detail::run_single_evolution(model, cfg.evolve);
  });

  CsvTable table;
  table.add_column("t", runs.front().times);
  for (size_t i = 0; i < values.size(); ++i) {
    if (runs[i].times != runs.front().times)
      throw std::logic_error("run_evolve_scenario: sample grids diverged across runs");
    const std::string suffix =
        varied ? "[" + cfg.evolve.vary.param + "=" + detail::format_label(values[i]) + "]" : "";
    for (size_t k = 0; k < names.size(); ++k)
      table.add_column(names[k] + suffix, runs[i].series[k]);
  }
  if (cfg.evolve.smoothing_window > 0) {
    for (size_t i = 0; i < values.size(); ++i) {
      const std::string suffix =
          varied ? "[" + cfg.evolve.vary.param + "=" + detail::format_label(values[i]) + "]" : "";
      for (size_t k = 0; k < names.size(); ++k) {
        const SmoothedSeries sm =
            running_average(runs[i].times, runs[i].series[k], cfg.evolve.smoothing_window);
        table.add_column(names[k] + "_avg" + suffix, sm.values);
      }
    }
  }
  write_text_file(cfg.output_path, table.to_string());
  return {cfg.output_path};
}

/// Liouvillian steady state of the configured model; a single CSV row.
inline std::vector<std::string> run_steady_scenario(const ScenarioConfig& cfg, int /*workers*/) {
  SteadyStateOptions opt;
  opt.force_iterative = cfg.steady.force_iterative;
  const SteadyStateResult res =
      steady_state(build_full_hamiltonian(cfg.model), detail::all_jumps(cfg.model), opt);
  const Observables obs(cfg.model);
  const std::vector<double> row = detail::density_observables(obs, res.rho.matrix());

  CsvTable table;
  const auto& names = detail::density_observable_names();
  for (size_t k = 0; k < names.size(); ++k) table.add_column(names[k], {row[k]});
  table.add_column("residual", {res.residual});
  table.add_column("multiplicity", {static_cast<double>(res.multiplicity)});
  std::vector<std::vector<std::string>> text = {{"method", res.method}};
  write_text_file(cfg.output_path, table.to_string(&text));
  return {cfg.output_path};
}

namespace detail {

struct SweepPoint {
  std::vector<double> axis_values;
  std::vector<double> observables;  // density set + residual + multiplicity
  std::string method;
  std::string status = "ok";
};

inline std::string sanitize_status(std::string msg) {
  for (char& c : msg)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return msg.empty() ? "error" : msg;
}

inline SweepPoint evaluate_sweep_point(const ScenarioConfig& cfg, NoiseKind noise,
                                       const std::vector<double>& axis_values) {
  SweepPoint pt;
  pt.axis_values = axis_values;
  try {
    ModelConfig model = cfg.model;
    model.noise = noise;
    for (size_t a = 0; a < axis_values.size(); ++a)
      set_model_param(model, cfg.sweep.axes[a].param, axis_values[a]);
    model.validate();
    SteadyStateOptions opt;
    opt.force_iterative = cfg.steady.force_iterative;
    const SteadyStateResult res =
        steady_state(build_full_hamiltonian(model), all_jumps(model), opt);
    pt.observables = density_observables(Observables(model), res.rho.matrix());
    pt.observables.push_back(res.residual);
    pt.observables.push_back(static_cast<double>(res.multiplicity));
    pt.method = res.method;
  } catch (const std::exception& e) {
    pt.observables.assign(density_observable_names().size() + 2,
                          std::numeric_limits<double>::quiet_NaN());
    pt.method = "none";
    pt.status = sanitize_status(e.what());
  }
  return pt;
}

}  // namespace detail

/// Steady-state observables over a one- or two-axis parameter grid, one file
/// per requested noise kind. Point failures land in the status column.
inline std::vector<std::string> run_sweep_scenario(const ScenarioConfig& cfg, int workers) {
  std::vector<NoiseKind> kinds = cfg.sweep.noise_kinds;
  const bool per_kind_files = !kinds.empty();
  if (kinds.empty()) kinds = {cfg.model.noise};

  // Grid rows sorted by axis values, independent of the listed order.
  std::vector<std::vector<double>> grid;
  std::vector<double> a1 = cfg.sweep.axes[0].values;
  std::sort(a1.begin(), a1.end());
  if (cfg.sweep.axes.size() == 1) {
    for (double v : a1) grid.push_back({v});
  } else {
    std::vector<double> a2 = cfg.sweep.axes[1].values;
    std::sort(a2.begin(), a2.end());
    for (double v1 : a1)
      for (double v2 : a2) grid.push_back({v1, v2});
  }

  std::vector<std::string> outputs;
  for (const NoiseKind kind : kinds) {
    std::vector<detail::SweepPoint> points(grid.size());
    detail::parallel_for(static_cast<int>(grid.size()), workers,
                         [&](int i) { points[i] = detail::evaluate_sweep_point(cfg, kind, grid[i]); });

    CsvTable table;
    for (size_t a = 0; a < cfg.sweep.axes.size(); ++a) {
      std::vector<double> col;
      for (const auto& pt : points) col.push_back(pt.axis_values[a]);
      table.add_column(cfg.sweep.axes[a].param, col);
    }
    std::vector<std::string> obs_names = detail::density_observable_names();
    obs_names.push_back("residual");
    obs_names.push_back("multiplicity");
    for (size_t k = 0; k < obs_names.size(); ++k) {
      std::vector<double> col;
      for (const auto& pt : points) col.push_back(pt.observables[k]);
      table.add_column(obs_names[k], col);
    }
    std::vector<std::vector<std::string>> text(2);
    text[0].push_back("method");
    text[1].push_back("status");
    for (const auto& pt : points) {
      text[0].push_back(pt.method);
      text[1].push_back(pt.status);
    }
    const std::string path =
        per_kind_files ? sibling_path(cfg.output_path, to_string(kind)) : cfg.output_path;
    write_text_file(path, table.to_string(&text));
    outputs.push_back(path);
  }

  if (cfg.sweep.transitions_sidecar) {
    const std::vector<double> diffs = h0_transition_energies(cfg.model);
    CsvTable table;
    table.add_column("delta_e", diffs);
    const std::string path = sibling_path(cfg.output_path, "transitions");
    write_text_file(path, table.to_string());
    outputs.push_back(path);
  }
  return outputs;
}

/// Stochastic circuit trajectories with mid-run correction layers.
inline std::vector<std::string> run_trotter_scenario(const ScenarioConfig& cfg, int workers) {
  CircuitRunConfig cc = cfg.trotter.circuit;
  cc.seed = cfg.seed;
  const TrajectoryRecord rec = run_trajectories(cfg.model, cc, workers);
  CsvTable table;
  table.add_column("t", rec.times);
  for (const std::string& name : rec.names()) table.add_column(name, rec.series(name));
  write_text_file(cfg.output_path, table.to_string());
  return {cfg.output_path};
}

/// Gauge-sector eigenvalues of the coherent part, plus transition energies.
inline std::vector<std::string> run_spectrum_scenario(const ScenarioConfig& cfg, int /*workers*/) {
  const Eigen::VectorXd e = physical_sector_spectrum(cfg.model);
  CsvTable table;
  std::vector<double> idx(e.size()), energy(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    idx[i] = static_cast<double>(i);
    energy[i] = e(i);
  }
  table.add_column("index", idx);
  table.add_column("energy", energy);
  write_text_file(cfg.output_path, table.to_string());

  CsvTable trans;
  trans.add_column("delta_e", h0_transition_energies(cfg.model));
  const std::string tpath = sibling_path(cfg.output_path, "transitions");
  write_text_file(tpath, trans.to_string());
  return {cfg.output_path, tpath};
}

/// Runs the configured scenario, writes its CSV file(s) and the metadata
/// sidecar <output>.meta.json, and reports what was written.
inline RunResult run_scenario(const ScenarioConfig& cfg, int workers = 1) {
  if (workers < 1) throw std::invalid_argument("run_scenario: workers must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  switch (cfg.kind) {
    case ScenarioKind::Evolve: result.outputs = run_evolve_scenario(cfg, workers); break;
    case ScenarioKind::Steady: result.outputs = run_steady_scenario(cfg, workers); break;
    case ScenarioKind::Sweep: result.outputs = run_sweep_scenario(cfg, workers); break;
    case ScenarioKind::Trotter: result.outputs = run_trotter_scenario(cfg, workers); break;
    case ScenarioKind::Spectrum: result.outputs = run_spectrum_scenario(cfg, workers); break;
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["scenario"] = to_string(cfg.kind);
  meta["seed"] = cfg.seed;
  meta["workers"] = workers;
  meta["outputs"] = result.outputs;
  meta["wall_seconds"] = result.wall_seconds;
  meta["config_hash"] = fnv1a(cfg.raw_text);
  meta["config"] = cfg.raw_text;
  write_text_file(cfg.output_path + ".meta.json", meta.dump(2) + "\n");
  return result;
}

/// Locates <name>.cfg in, in order: $Z2STAB_PRESETS_DIR, ./presets, and the
/// preset directory recorded at build time.
inline std::string resolve_preset_path(const std::string& name) {
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("Z2STAB_PRESETS_DIR")) dirs.push_back(env);
  dirs.push_back("presets");
#ifdef Z2STAB_SOURCE_PRESET_DIR
  dirs.push_back(Z2STAB_SOURCE_PRESET_DIR);
#endif
  std::string tried;
  for (const std::string& dir : dirs) {
    const std::filesystem::path p = std::filesystem::path(dir) / (name + ".cfg");
    if (std::filesystem::exists(p)) return p.string();
    if (!tried.empty()) tried += ", ";
    tried += p.string();
  }
  throw ConfigError("preset '" + name + "' not found (tried: " + tried + ")");
}

}  // namespace z2stab
