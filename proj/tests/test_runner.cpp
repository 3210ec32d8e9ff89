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

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "z2stab/runner.hpp"

using namespace z2stab;

namespace {

std::string out_path(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "z2stab_runner_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Minimal CSV reader for assertions: header plus string cells per row.
struct ReadCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  explicit ReadCsv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    REQUIRE(std::getline(in, line));
    header = split_line(line);
    while (std::getline(in, line)) rows.push_back(split_line(line));
  }

  int col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    FAIL("column not found: " + name);
    return -1;
  }

  double num(size_t row, const std::string& name) const {
    return std::stod(rows.at(row).at(col(name)));
  }
};

const char* kEvolveConfig = R"(
[scenario]
kind = evolve
seed = 7

[model]
n = 2
lambda = 0.05
gamma = 0.02
gamma_c = 0.5
noise = bitflip_phaseflip_all
initial = staggered_product

[evolve]
t_final = 2
sample_interval = 0.5
smoothing_window = 1

[output]
path = unused.csv
)";

}  // namespace

TEST_CASE("config parser round-trips values and rejects malformed input") {
  SECTION("values, comments, and lists") {
    const IniDoc doc = IniDoc::parse(
        "[model]\n"
        "n = 3  # trailing comment\n"
        "# full-line comment\n"
        "gamma = 1e-3\n"
        "[sweep]\n"
        "values1 = 1, 2.5, 3e-1\n"
        "flag = yes\n");
    REQUIRE(doc.get_int("model", "n", 0) == 3);
    REQUIRE(doc.get_double("model", "gamma", 0) == 1e-3);
    REQUIRE(doc.get_double("model", "missing", 4.5) == 4.5);
    REQUIRE(doc.get_double_list("sweep", "values1") == std::vector<double>{1.0, 2.5, 0.3});
    REQUIRE(doc.get_bool("sweep", "flag", false));
  }
  SECTION("parse errors carry line numbers") {
    REQUIRE_THROWS_WITH(IniDoc::parse("[model]\nbroken line\n"),
                        Catch::Matchers::ContainsSubstring("line 2"));
    REQUIRE_THROWS_WITH(IniDoc::parse("n = 2\n"),
                        Catch::Matchers::ContainsSubstring("before any [section]"));
    REQUIRE_THROWS_WITH(IniDoc::parse("[model\nn = 2\n"),
                        Catch::Matchers::ContainsSubstring("unterminated"));
    REQUIRE_THROWS_WITH(IniDoc::parse("[model]\nn = 2\nn = 3\n"),
                        Catch::Matchers::ContainsSubstring("duplicate key"));
  }
  SECTION("typed getters reject junk") {
    const IniDoc doc = IniDoc::parse("[model]\nn = two\ngamma = abc\nflag = maybe\n");
    REQUIRE_THROWS_AS(doc.get_int("model", "n", 0), ConfigError);
    REQUIRE_THROWS_AS(doc.get_double("model", "gamma", 0), ConfigError);
    REQUIRE_THROWS_AS(doc.get_bool("model", "flag", false), ConfigError);
  }
  SECTION("overrides replace or insert") {
    IniDoc doc = IniDoc::parse("[model]\nn = 2\n");
    doc.apply_override("model.n=4");
    doc.apply_override("evolve.t_final=9");
    REQUIRE(doc.get_int("model", "n", 0) == 4);
    REQUIRE(doc.get_double("evolve", "t_final", 0) == 9.0);
    REQUIRE_THROWS_AS(doc.apply_override("not-a-spec"), ConfigError);
  }
}

TEST_CASE("scenario assembly validates the whole document") {
  SECTION("a full evolve config lands in the right fields") {
    const ScenarioConfig cfg = load_scenario_text(kEvolveConfig);
    REQUIRE(cfg.kind == ScenarioKind::Evolve);
    REQUIRE(cfg.seed == 7);
    REQUIRE(cfg.model.n == 2);
    REQUIRE(cfg.model.lambda == 0.05);
    REQUIRE(cfg.model.noise == NoiseKind::BitflipPhaseflipAll);
    REQUIRE(cfg.model.initial == InitialStateKind::StaggeredProduct);
    REQUIRE(cfg.evolve.t_final == 2.0);
    REQUIRE(cfg.evolve.smoothing_window == 1.0);
    REQUIRE(cfg.output_path == "unused.csv");
  }
  SECTION("unknown keys are rejected with their line number") {
    REQUIRE_THROWS_WITH(load_scenario_text("[scenario]\nkind = steady\n[model]\nn = 2\ntypo = 1\n"),
                        Catch::Matchers::ContainsSubstring("unknown key 'typo'"));
  }
  SECTION("subcommand and config kind must agree") {
    REQUIRE_THROWS_AS(load_scenario_text(kEvolveConfig, ScenarioKind::Steady), ConfigError);
    REQUIRE_NOTHROW(load_scenario_text(kEvolveConfig, ScenarioKind::Evolve));
  }
  SECTION("sweep needs complete axes with known parameters") {
    const std::string base = "[scenario]\nkind = sweep\n[model]\nn = 2\ngamma = 0.01\n";
    REQUIRE_THROWS_AS(load_scenario_text(base), ConfigError);
    REQUIRE_THROWS_AS(load_scenario_text(base + "[sweep]\naxis1 = gamma\n"), ConfigError);
    REQUIRE_THROWS_AS(load_scenario_text(base + "[sweep]\naxis1 = bogus\nvalues1 = 1\n"),
                      ConfigError);
    REQUIRE_NOTHROW(load_scenario_text(base + "[sweep]\naxis1 = gamma_c\nvalues1 = 0.1, 1\n"));
  }
  SECTION("the trotter scenario rejects coherent errors") {
    REQUIRE_THROWS_WITH(
        load_scenario_text("[scenario]\nkind = trotter\n[model]\nn = 2\nlambda = 0.1\n"),
        Catch::Matchers::ContainsSubstring("lambda = 0"));
  }
  SECTION("command-line overrides reach the model") {
    const ScenarioConfig cfg =
        load_scenario_text(kEvolveConfig, std::nullopt, {"model.gamma=0.5", "evolve.t_final=1"});
    REQUIRE(cfg.model.gamma == 0.5);
    REQUIRE(cfg.evolve.t_final == 1.0);
  }
}

TEST_CASE("csv formatting is stable and explicit about bad input") {
  REQUIRE(detail::format_value(0.1) == "0.1");
  REQUIRE(detail::format_value(std::numeric_limits<double>::quiet_NaN()) == "nan");
  REQUIRE(detail::format_value(-2.5e-7) == "-2.5e-07");
  CsvTable t;
  t.add_column("a", {1, 2});
  REQUIRE_THROWS_AS(t.add_column("b", {1}), std::invalid_argument);
}

TEST_CASE("evolve scenario writes the sample grid and labeled vary columns") {
  ScenarioConfig cfg = load_scenario_text(kEvolveConfig);
  cfg.output_path = out_path("evolve.csv");
  const RunResult res = run_scenario(cfg);
  REQUIRE(res.outputs == std::vector<std::string>{cfg.output_path});

  const ReadCsv csv(cfg.output_path);
  REQUIRE(csv.header.front() == "t");
  REQUIRE(csv.col("eps") == 1);
  REQUIRE(csv.col("eps_avg") >= 0);
  REQUIRE(csv.rows.size() == 5);  // t = 0, 0.5, 1, 1.5, 2
  REQUIRE(csv.num(0, "t") == 0.0);
  REQUIRE(csv.num(4, "t") == 2.0);
  // The staggered start is in the physical sector and noise pushes it out.
  REQUIRE(csv.num(0, "eps") < 1e-10);
  REQUIRE(csv.num(4, "eps") > 1e-4);
  REQUIRE(csv.num(0, "sector_weight") == Catch::Approx(1.0).margin(1e-9));

  SECTION("rerun with the same seed is byte-identical") {
    const std::string first = read_text_file(cfg.output_path);
    run_scenario(cfg);
    REQUIRE(read_text_file(cfg.output_path) == first);
  }
  SECTION("metadata sidecar echoes the config") {
    const nlohmann::json meta = nlohmann::json::parse(read_text_file(cfg.output_path + ".meta.json"));
    REQUIRE(meta.at("scenario") == "evolve");
    REQUIRE(meta.at("seed") == 7);
    REQUIRE(meta.at("config") == std::string(kEvolveConfig));
    REQUIRE(meta.at("outputs").size() == 1);
  }
}

TEST_CASE("evolve vary axis produces one labeled column group per value") {
  ScenarioConfig cfg = load_scenario_text(kEvolveConfig, std::nullopt,
                                          {"evolve.vary=gamma_c", "evolve.values=0, 1",
                                           "evolve.smoothing_window=0"});
  cfg.output_path = out_path("evolve_vary.csv");
  run_scenario(cfg);
  const ReadCsv csv(cfg.output_path);
  REQUIRE(csv.col("eps[gamma_c=0]") >= 0);
  REQUIRE(csv.col("eps[gamma_c=1]") >= 0);
  // More correction pumping keeps the violation lower at the end.
  const size_t last = csv.rows.size() - 1;
  REQUIRE(csv.num(last, "eps[gamma_c=1]") < csv.num(last, "eps[gamma_c=0]"));
}

TEST_CASE("steady scenario emits one row matching a degenerate sweep") {
  const std::string base =
      "[scenario]\nkind = steady\n"
      "[model]\nn = 2\nlambda = 0.05\ngamma = 0.02\ngamma_c = 0.5\n"
      "noise = bitflip_phaseflip_all\n";
  ScenarioConfig steady_cfg = load_scenario_text(base);
  steady_cfg.output_path = out_path("steady.csv");
  run_scenario(steady_cfg);
  const ReadCsv steady_csv(steady_cfg.output_path);
  REQUIRE(steady_csv.rows.size() == 1);
  REQUIRE(steady_csv.num(0, "residual") < 1e-8);
  REQUIRE(steady_csv.rows[0][steady_csv.col("method")] == "dense_shift_invert");

  ScenarioConfig sweep_cfg = load_scenario_text(
      base + "[sweep]\naxis1 = gamma_c\nvalues1 = 0.5\n", ScenarioKind::Sweep,
      {"scenario.kind=sweep"});
  sweep_cfg.output_path = out_path("sweep_single.csv");
  run_scenario(sweep_cfg);
  const ReadCsv sweep_csv(sweep_cfg.output_path);
  REQUIRE(sweep_csv.rows.size() == 1);
  REQUIRE(sweep_csv.rows[0][sweep_csv.col("status")] == "ok");
  for (const std::string& name : {"eps", "sector_energy", "link_link", "energy"})
    REQUIRE(sweep_csv.num(0, name) == Catch::Approx(steady_csv.num(0, name)).margin(1e-9));
}

TEST_CASE("sweep scenario sorts the grid and tolerates point failures") {
  const std::string text =
      "[scenario]\nkind = sweep\n"
      "[model]\nn = 2\nlambda = 0.05\nnoise = spontaneous_all\ngamma_c = 0.2\n"
      "[sweep]\naxis1 = gamma\nvalues1 = 0.05, -1, 0.01\n";
  ScenarioConfig cfg = load_scenario_text(text);
  cfg.output_path = out_path("sweep_fail.csv");
  run_scenario(cfg);
  const ReadCsv csv(cfg.output_path);
  REQUIRE(csv.rows.size() == 3);
  // Sorted ascending, so the invalid negative rate lands in row 0.
  REQUIRE(csv.num(0, "gamma") == -1.0);
  REQUIRE(csv.rows[0][csv.col("status")] != "ok");
  REQUIRE(csv.rows[0][csv.col("eps")] == "nan");
  REQUIRE(csv.rows[1][csv.col("status")] == "ok");
  REQUIRE(csv.num(1, "gamma") == 0.01);
  REQUIRE(csv.num(2, "gamma") == 0.05);
  REQUIRE(csv.num(2, "eps") > csv.num(1, "eps"));

  SECTION("worker count does not change the bytes") {
    const std::string serial = read_text_file(cfg.output_path);
    run_scenario(cfg, 3);
    REQUIRE(read_text_file(cfg.output_path) == serial);
  }
}

TEST_CASE("sweep scenario fans out over noise kinds into sibling files") {
  const std::string text =
      "[scenario]\nkind = sweep\n"
      "[model]\nn = 2\nlambda = 0.05\ngamma_c = 0.2\n"
      "[sweep]\naxis1 = gamma\nvalues1 = 0.01, 0.05\n"
      "noise_kinds = bitflip_phaseflip_all, spontaneous_all\n"
      "transitions_sidecar = true\n";
  ScenarioConfig cfg = load_scenario_text(text);
  cfg.output_path = out_path("sweep_kinds.csv");
  const RunResult res = run_scenario(cfg);
  REQUIRE(res.outputs.size() == 3);
  REQUIRE(res.outputs[0] == out_path("sweep_kinds_bitflip_phaseflip_all.csv"));
  REQUIRE(res.outputs[1] == out_path("sweep_kinds_spontaneous_all.csv"));
  REQUIRE(res.outputs[2] == out_path("sweep_kinds_transitions.csv"));
  for (const std::string& p : res.outputs) REQUIRE(std::filesystem::exists(p));
  const ReadCsv trans(res.outputs[2]);
  REQUIRE(trans.header == std::vector<std::string>{"delta_e"});
  REQUIRE(trans.rows.size() >= 2);
  REQUIRE(std::stod(trans.rows[0][0]) > 0.0);
}

TEST_CASE("spectrum scenario writes sector energies and transition energies") {
  ScenarioConfig cfg = load_scenario_text("[scenario]\nkind = spectrum\n[model]\nn = 2\n");
  cfg.output_path = out_path("spectrum.csv");
  const RunResult res = run_scenario(cfg);
  REQUIRE(res.outputs.size() == 2);
  const ReadCsv csv(cfg.output_path);
  REQUIRE(csv.header == std::vector<std::string>{"index", "energy"});
  REQUIRE(csv.rows.size() == 4);  // physical sector dimension 2^n
  for (size_t r = 1; r < csv.rows.size(); ++r)
    REQUIRE(csv.num(r, "energy") >= csv.num(r - 1, "energy"));
}

TEST_CASE("trotter scenario runs trajectories from a config") {
  const std::string text =
      "[scenario]\nkind = trotter\nseed = 3\n"
      "[model]\nn = 2\ngamma = 0.05\ninitial = staggered_product\n"
      "[trotter]\ndt = 0.05\nn_between = 4\nn_traj = 4\nt_final = 0.5\nsample_interval = 0.25\n";
  ScenarioConfig cfg = load_scenario_text(text);
  REQUIRE(cfg.trotter.circuit.p == Catch::Approx(0.05 * 0.05 / 8).epsilon(1e-12));
  cfg.output_path = out_path("trotter.csv");
  run_scenario(cfg);
  const ReadCsv csv(cfg.output_path);
  REQUIRE(csv.header.front() == "t");
  REQUIRE(csv.col("eps") >= 0);
  REQUIRE(csv.col("eps_se") >= 0);
  REQUIRE(csv.rows.size() == 3);  // t = 0, 0.25, 0.5
}

TEST_CASE("shipped presets parse and build") {
  for (const std::string name : {"fig2", "fig3", "fig4", "fig5", "fig7", "fig8", "fig9"}) {
    INFO("preset " << name);
    const std::string path = resolve_preset_path(name);
    REQUIRE(std::filesystem::exists(path));
    const ScenarioConfig cfg = load_scenario_text(read_text_file(path));
    REQUIRE(cfg.output_path != "out.csv");
  }
  REQUIRE_THROWS_AS(resolve_preset_path("no_such_preset"), ConfigError);
}
