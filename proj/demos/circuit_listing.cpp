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
// Prints the compiled gate sequences for one evolution step and one syndrome
// measurement, plus the CNOT accounting behind the noise-overhead ratio.

#include <cstdio>

#include "z2stab/trotter.hpp"

using namespace z2stab;

int main() {
  ModelConfig cfg;
  cfg.n = 2;
  CircuitRunConfig run;
  run.dt = 0.05;

  const GateSequence step = trotter_step_circuit(cfg, run);
  std::printf("--- evolution step (n = %d, dt = %g), %d CNOTs ---\n%s", cfg.n, run.dt,
              step.cnot_count(), step.to_text().c_str());

  const GateSequence syndrome = syndrome_measurement_circuit(cfg, 0);
  std::printf("--- syndrome measurement for constraint 0 ---\n%s", syndrome.to_text().c_str());

  const CnotBudget budget = cnot_budget(cfg, 1);
  std::printf("--- CNOT budget ---\nper step: %d\nper measurement layer: %d\noverhead: %g\n",
              budget.per_step, budget.per_measurement_layer, budget.overhead_ratio);

  const std::vector<int> syndromes = {2, 0};  // one violated constraint
  const FeedbackResult fb = correction_feedback(cfg, syndromes);
  std::printf("--- feedback for syndromes (2, 0) ---\n%sfully corrected: %s\n",
              fb.gates.to_text().c_str(), fb.fully_corrected ? "yes" : "no");
  return 0;
}
