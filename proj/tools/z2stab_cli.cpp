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
// Command-line front end: one subcommand per scenario kind, config from a
// file or a named preset, with key-value overrides.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "z2stab/runner.hpp"

namespace {

struct CliState {
  std::string config_path;
  std::string preset;
  std::string out;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  int workers = 1;
};

void add_common_options(CLI::App* sub, CliState& st) {
  sub->add_option("--config", st.config_path, "Scenario config file");
  sub->add_option("--preset", st.preset, "Named preset, resolved from the preset directories");
  sub->add_option("--out", st.out, "Output CSV path, overrides [output] path");
  sub->add_option("--seed", st.seed, "Random seed, overrides [scenario] seed");
  sub->add_option("--workers", st.workers, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--set", st.sets, "Override as section.key=value, repeatable");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipative stabilization of a Z2 lattice gauge theory"};
  app.require_subcommand(1);
  CliState st;

  const std::vector<std::pair<std::string, std::string>> kinds = {
      {"evolve", "Integrate the master equation and record observables over time"},
      {"steady", "Solve for the Liouvillian steady state of the configured model"},
      {"sweep", "Steady-state observables over a one- or two-axis parameter grid"},
      {"trotter", "Stochastic circuit trajectories with measurement-based correction"},
      {"spectrum", "Gauge-sector eigenvalues and transition energies"},
  };
  for (const auto& [name, desc] : kinds) add_common_options(app.add_subcommand(name, desc), st);

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    const z2stab::ScenarioKind kind = z2stab::scenario_kind_from_string(sub->get_name());

    if (st.config_path.empty() == st.preset.empty())
      throw z2stab::ConfigError("give exactly one of --config or --preset");
    const std::string path =
        st.preset.empty() ? st.config_path : z2stab::resolve_preset_path(st.preset);
    const std::string text = z2stab::read_text_file(path);

    z2stab::ScenarioConfig cfg = z2stab::load_scenario_text(text, kind, st.sets);
    if (!st.out.empty()) cfg.output_path = st.out;
    if (sub->count("--seed") > 0) cfg.seed = st.seed;

    const z2stab::RunResult result = z2stab::run_scenario(cfg, st.workers);
    for (const std::string& out : result.outputs) std::cout << "wrote " << out << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
