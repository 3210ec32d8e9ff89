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
// Gate-level stochastic simulator: first-order Trotter step compiled to
// CNOT + single-qubit gates, ancilla-assisted stabilizer measurement,
// per-CNOT flip noise, greedy syndrome feedback, and Monte Carlo trajectory
// averaging with standard errors.

#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "z2stab/observables.hpp"
#include "z2stab/statevector.hpp"
#include "z2stab/z2_model.hpp"

namespace z2stab {

namespace detail {

/// Per-trajectory generator derived from (master seed, trajectory index) so
/// results are independent of worker scheduling.
inline std::mt19937_64 trajectory_rng(std::uint64_t master_seed, std::uint64_t traj) {
  std::seed_seq ss{static_cast<std::uint32_t>(master_seed & 0xffffffffULL),
                   static_cast<std::uint32_t>(master_seed >> 32),
                   static_cast<std::uint32_t>(traj & 0xffffffffULL),
                   static_cast<std::uint32_t>(traj >> 32)};
  return std::mt19937_64(ss);
}

/// Uniform double in [0,1) built from the top 53 bits, identical across
/// platforms for a given generator state.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

enum class GateKind { Cnot, H, S, Sdg, Rz, Rx, X, Z, Measure, Reset };

struct Gate {
  GateKind kind;
  int q0 = 0;
  int q1 = -1;       // CNOT target
  double angle = 0;  // Rz / Rx rotation angle
};

/// Ordered gate list over a fixed register: 2N system qubits plus one
/// reusable ancilla at index 2N.
struct GateSequence {
  int n_qubits = 0;
  std::vector<Gate> gates;

  void append(const Gate& g) { gates.push_back(g); }

  void extend(const GateSequence& other) {
    if (other.n_qubits != n_qubits)
      throw std::invalid_argument("GateSequence: register size mismatch");
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
  }

  int cnot_count() const {
    int c = 0;
    for (const Gate& g : gates) c += g.kind == GateKind::Cnot ? 1 : 0;
    return c;
  }

  /// Checks qubit budget and that every measured qubit is reset before any
  /// further gate touches it.
  void validate() const {
    std::vector<char> pending(n_qubits, 0);
    for (const Gate& g : gates) {
      const bool two = g.kind == GateKind::Cnot;
      if (g.q0 < 0 || g.q0 >= n_qubits || (two && (g.q1 < 0 || g.q1 >= n_qubits || g.q1 == g.q0)))
        throw std::logic_error("GateSequence: qubit index outside register");
      for (int q : {g.q0, two ? g.q1 : g.q0}) {
        if (pending[q] && g.kind != GateKind::Reset)
          throw std::logic_error("GateSequence: measured qubit reused before reset");
      }
      if (g.kind == GateKind::Measure) pending[g.q0] = 1;
      if (g.kind == GateKind::Reset) pending[g.q0] = 0;
    }
  }

  /// One gate per line: NAME q0 [q1] [angle].
  std::string to_text() const {
    static const char* names[] = {"CNOT", "H", "S", "SDG", "RZ", "RX", "X", "Z", "MEASURE", "RESET"};
    std::string out;
    char buf[64];
    for (const Gate& g : gates) {
      out += names[static_cast<int>(g.kind)];
      std::snprintf(buf, sizeof(buf), " %d", g.q0);
      out += buf;
      if (g.kind == GateKind::Cnot) {
        std::snprintf(buf, sizeof(buf), " %d", g.q1);
        out += buf;
      }
      if (g.kind == GateKind::Rz || g.kind == GateKind::Rx) {
        std::snprintf(buf, sizeof(buf), " %.17g", g.angle);
        out += buf;
      }
      out += '\n';
    }
    return out;
  }
};

/// Knobs for the gate-level run. Corrections happen every n_between Trotter
/// steps (n_between <= 0 disables them), realizing a correction rate
/// 1 / (n_between * dt).
struct CircuitRunConfig {
  double dt = 0.05;
  double p = 0.0;
  int n_between = 4;
  int n_traj = 400;
  std::uint64_t seed = 1;
  double t_final = 50.0;
  double sample_interval = 2.0;

  void validate() const {
    if (!(dt > 0)) throw ConfigError("CircuitRunConfig: dt must be positive");
    if (!(p >= 0 && p <= 1)) throw ConfigError("CircuitRunConfig: p must lie in [0,1]");
    if (!(t_final > 0)) throw ConfigError("CircuitRunConfig: t_final must be positive");
    if (!(sample_interval > 0))
      throw ConfigError("CircuitRunConfig: sample_interval must be positive");
  }
};

/// Per-CNOT error probability reproducing a continuous error rate gamma per
/// site: gamma = p * 8 / dt, since each site contributes eight CNOTs per step.
inline double cnot_error_probability(double gamma, double dt) {
  if (gamma < 0 || !(dt > 0))
    throw std::invalid_argument("cnot_error_probability: need gamma >= 0 and dt > 0");
  return gamma * dt / 8.0;
}

namespace detail {

/// exp(-i theta/2 Z_a Z_b Z_c) with the parity folded onto b.
inline void append_zzz(GateSequence& seq, int a, int b, int c, double theta) {
  seq.append({GateKind::Cnot, a, b});
  seq.append({GateKind::Cnot, c, b});
  seq.append({GateKind::Rz, b, -1, theta});
  seq.append({GateKind::Cnot, c, b});
  seq.append({GateKind::Cnot, a, b});
}

}  // namespace detail

/// First-order step for the gauge-invariant Hamiltonian: per site the hopping
/// term splits into commuting XZX and YZY rotations, each compiled to a
/// 4-CNOT parity ladder (8 CNOTs per site total), plus Rx rotations on the
/// links for the field term. Exactly the identity at dt = 0.
inline GateSequence trotter_step_circuit(const ModelConfig& model, const CircuitRunConfig& cfg) {
  model.validate();
  cfg.validate();
  const RegisterLayout lay = model.layout();
  GateSequence seq;
  seq.n_qubits = lay.n_qubits() + 1;
  const double theta = model.j_a * cfg.dt;
  for (int j = 0; j < model.n; ++j) {
    const int a = lay.matter_qubit(j);
    const int b = lay.link_qubit(j);
    const int c = lay.matter_qubit(j + 1);
    // X Z X: conjugate the matter qubits into the Z basis with H.
    seq.append({GateKind::H, a});
    seq.append({GateKind::H, c});
    detail::append_zzz(seq, a, b, c, theta);
    seq.append({GateKind::H, a});
    seq.append({GateKind::H, c});
    // Y Z Y: conjugate with V = S H, so V Z V' = Y.
    seq.append({GateKind::Sdg, a});
    seq.append({GateKind::H, a});
    seq.append({GateKind::Sdg, c});
    seq.append({GateKind::H, c});
    detail::append_zzz(seq, a, b, c, theta);
    seq.append({GateKind::H, a});
    seq.append({GateKind::S, a});
    seq.append({GateKind::H, c});
    seq.append({GateKind::S, c});
  }
  for (int j = 0; j < model.n; ++j)
    seq.append({GateKind::Rx, lay.link_qubit(j), -1, -2.0 * model.j_f * cfg.dt});
  return seq;
}

/// Ancilla-assisted measurement of gauge operator j: rotate the two flanking
/// links into the Z basis, accumulate the three-qubit parity on the ancilla
/// with 3 CNOTs, undo the rotation, and measure. The outcome bit 0/1 maps to
/// the G_j eigenvalue 0/2; the sign convention of G_j at even j needs one
/// extra ancilla flip. Requires the ancilla in |0>; leaves it reset.
inline GateSequence syndrome_measurement_circuit(const ModelConfig& model, int j) {
  model.validate();
  if (j < 0 || j >= model.n)
    throw std::out_of_range("syndrome_measurement_circuit: site index out of range");
  const RegisterLayout lay = model.layout();
  const int la = lay.link_qubit(j - 1);
  const int m = lay.matter_qubit(j);
  const int lb = lay.link_qubit(j);
  const int anc = lay.n_qubits();
  GateSequence seq;
  seq.n_qubits = anc + 1;
  seq.append({GateKind::H, la});
  seq.append({GateKind::H, lb});
  seq.append({GateKind::Cnot, la, anc});
  seq.append({GateKind::Cnot, m, anc});
  seq.append({GateKind::Cnot, lb, anc});
  seq.append({GateKind::H, la});
  seq.append({GateKind::H, lb});
  if (j % 2 == 0) seq.append({GateKind::X, anc});
  seq.append({GateKind::Measure, anc});
  seq.append({GateKind::Reset, anc});
  return seq;
}

/// CNOT with the flip channel: probability 1-p ideal, probability p one of
/// eight equiprobable variants (bit or phase flip, on control or target,
/// before or after the ideal gate).
inline void apply_cnot_noise(Statevector& psi, int control, int target, double p,
                             std::mt19937_64& rng) {
  if (p <= 0) {
    psi.apply_cnot(control, target);
    return;
  }
  if (detail::uniform01(rng) >= p) {
    psi.apply_cnot(control, target);
    return;
  }
  const int v = std::min(7, static_cast<int>(detail::uniform01(rng) * 8.0));
  const bool phase = (v & 1) != 0;
  const int q = (v & 2) ? target : control;
  const bool after = (v & 4) != 0;
  const auto flip = [&] { phase ? psi.apply_z(q) : psi.apply_x(q); };
  if (!after) flip();
  psi.apply_cnot(control, target);
  if (after) flip();
}

/// Applies a gate list to a statevector, routing CNOTs through the noise
/// channel and recording measurement outcomes in order.
class CircuitExecutor {
 public:
  CircuitExecutor(Statevector& psi, double p, std::mt19937_64& rng)
      : psi_(psi), p_(p), rng_(rng) {}

  void run(const GateSequence& seq) {
    if (seq.n_qubits != psi_.n_qubits())
      throw std::invalid_argument("CircuitExecutor: register size mismatch");
    for (const Gate& g : seq.gates) apply(g);
  }

  const std::vector<int>& outcomes() const { return outcomes_; }
  void clear_outcomes() { outcomes_.clear(); }

 private:
  void apply(const Gate& g) {
    switch (g.kind) {
      case GateKind::Cnot:
        apply_cnot_noise(psi_, g.q0, g.q1, p_, rng_);
        break;
      case GateKind::H:
        psi_.apply_h(g.q0);
        break;
      case GateKind::S:
        psi_.apply_s(g.q0);
        break;
      case GateKind::Sdg:
        psi_.apply_sdg(g.q0);
        break;
      case GateKind::Rz:
        psi_.apply_rz(g.q0, g.angle);
        break;
      case GateKind::Rx:
        psi_.apply_rx(g.q0, g.angle);
        break;
      case GateKind::X:
        psi_.apply_x(g.q0);
        break;
      case GateKind::Z:
        psi_.apply_z(g.q0);
        break;
      case GateKind::Measure:
        outcomes_.push_back(psi_.measure(g.q0, detail::uniform01(rng_)));
        break;
      case GateKind::Reset:
        psi_.reset(g.q0, detail::uniform01(rng_));
        break;
    }
  }

  Statevector& psi_;
  double p_;
  std::mt19937_64& rng_;
  std::vector<int> outcomes_;
};

/// Decoded correction round. residual holds the syndrome pattern predicted
/// after the emitted gates are applied; nonzero entries were left for the
/// next round.
struct FeedbackResult {
  GateSequence gates;
  std::vector<int> residual;
  bool fully_corrected = true;
};

/// Greedy decode of one syndrome vector (entries are G_j eigenvalues 0/2).
/// Pass 1 scans sites in order and treats each unconsumed adjacent violated
/// pair as a link phase error (Z on the shared link). Pass 2 treats each
/// remaining violation whose measured neighbors are clean as a matter bit
/// error (X on the site). Anything else is left uncorrected and reported.
inline FeedbackResult correction_feedback(const ModelConfig& model,
                                          const std::vector<int>& syndromes) {
  model.validate();
  const int n = model.n;
  if (static_cast<int>(syndromes.size()) != n)
    throw std::invalid_argument("correction_feedback: one syndrome value per site");
  for (int s : syndromes)
    if (s != 0 && s != 2) throw std::invalid_argument("correction_feedback: syndromes are 0 or 2");
  const RegisterLayout lay = model.layout();

  FeedbackResult out;
  out.gates.n_qubits = lay.n_qubits() + 1;
  std::vector<char> consumed(n, 0), flip(n, 0);
  for (int j = 0; j < n; ++j) {
    const int jn = lay.wrap(j + 1);
    if (consumed[j] || consumed[jn]) continue;
    if (syndromes[j] == 2 && syndromes[jn] == 2) {
      out.gates.append({GateKind::Z, lay.link_qubit(j)});
      consumed[j] = consumed[jn] = 1;
      flip[j] ^= 1;
      flip[jn] ^= 1;
    }
  }
  for (int j = 0; j < n; ++j) {
    if (consumed[j] || syndromes[j] != 2) continue;
    if (syndromes[lay.wrap(j - 1)] == 0 && syndromes[lay.wrap(j + 1)] == 0) {
      out.gates.append({GateKind::X, lay.matter_qubit(j)});
      consumed[j] = 1;
      flip[j] ^= 1;
    }
  }
  out.residual.resize(n);
  for (int j = 0; j < n; ++j) {
    out.residual[j] = flip[j] ? 2 - syndromes[j] : syndromes[j];
    if (out.residual[j] != 0) out.fully_corrected = false;
  }
  return out;
}

/// CNOT counts behind the error-rate bookkeeping.
struct CnotBudget {
  int per_step;
  int per_measurement_layer;
  double overhead_ratio;
};

/// per_step = 8N, per_measurement_layer = 3N; the ratio assumes a measurement
/// layer every steps_between_corrections Trotter steps, giving (8n+3)/(8n)
/// and the worst case 11/8 at n = 1.
inline CnotBudget cnot_budget(const ModelConfig& model, int steps_between_corrections = 1) {
  model.validate();
  if (steps_between_corrections < 1)
    throw std::invalid_argument("cnot_budget: steps_between_corrections must be >= 1");
  CnotBudget b;
  b.per_step = 8 * model.n;
  b.per_measurement_layer = 3 * model.n;
  const double s = steps_between_corrections;
  b.overhead_ratio = (8.0 * s + 3.0) / (8.0 * s);
  return b;
}

/// Continuous-time image of the gate noise, for comparing against the
/// lindblad engine. Each per-CNOT flip variant, conjugated through the
/// Clifford remainder of its layer, lands on a fixed Pauli string; collecting
/// variants gives one jump operator sqrt(rate) * string per site and string.
/// Trotter-layer weights convert to rates at 1/dt (total gamma per site);
/// measurement-layer weights at 1/(n_between * dt), depositing
/// 17 gamma / (64 n_between) per site. Ancilla-outcome flips
/// (9 gamma / (64 n_between) per site) misdirect the feedback instead of
/// corrupting the state and have no jump image; they are the one omission.
inline JumpOperatorSet circuit_noise_jumps(const ModelConfig& model, const CircuitRunConfig& cfg) {
  model.validate();
  cfg.validate();
  const RegisterLayout lay = model.layout();
  JumpOperatorSet out;
  if (model.gamma == 0.0) return out;
  const auto pauli = [&](int q, Pauli p) { return embed_pauli(lay, q, p); };
  const auto add = [&](double rate, const Operator& op, const std::string& tag, int j) {
    out.push_back((std::sqrt(rate) * op).relabel(tag + std::to_string(j)));
  };
  // One CNOT worth of flip weight per unit time.
  const double step = model.gamma / 8.0;
  for (int j = 0; j < model.n; ++j) {
    const int mq = lay.matter_qubit(j);
    const int lq = lay.link_qubit(j);
    add(step, pauli(mq, Pauli::X), "mX_", j);
    add(step, pauli(mq, Pauli::Y), "mY_", j);
    add(step, pauli(mq, Pauli::Z), "mZ_", j);
    add(2 * step, pauli(lq, Pauli::X), "lX_", j);
    add(step / 2, pauli(lq, Pauli::Z), "lZ_", j);
  }
  for (int j = 0; j < model.n; ++j) {
    const int a = lay.matter_qubit(j);
    const int b = lay.link_qubit(j);
    const int c = lay.matter_qubit(j + 1);
    add(step / 2, pauli(a, Pauli::Z) * pauli(b, Pauli::X), "ZxX_", j);
    add(step / 2, pauli(c, Pauli::Z) * pauli(b, Pauli::X), "xZX_", j);
    add(step / 2, pauli(a, Pauli::X) * pauli(b, Pauli::Z), "XxZ_", j);
    add(step / 2, pauli(a, Pauli::Y) * pauli(b, Pauli::Z), "YxZ_", j);
    add(step / 4, pauli(a, Pauli::X) * pauli(c, Pauli::X) * pauli(b, Pauli::Z), "XXZ_", j);
    add(step / 4, pauli(a, Pauli::Y) * pauli(c, Pauli::Y) * pauli(b, Pauli::Z), "YYZ_", j);
  }
  if (cfg.n_between > 0) {
    const double layer = model.gamma / (8.0 * cfg.n_between);
    for (int j = 0; j < model.n; ++j) {
      const int la = lay.link_qubit(j - 1);
      const int mq = lay.matter_qubit(j);
      const int lb = lay.link_qubit(j);
      add(layer / 4, pauli(la, Pauli::Z), "sZa_", j);
      add(layer / 4, pauli(la, Pauli::X), "sXa_", j);
      add(layer / 4, pauli(mq, Pauli::X), "sXm_", j);
      add(layer / 4, pauli(mq, Pauli::Z), "sZm_", j);
      add(layer / 2, pauli(lb, Pauli::X), "sXb_", j);
      add(layer / 4, pauli(lb, Pauli::Z), "sZb_", j);
      add(layer / 4, pauli(mq, Pauli::Z) * pauli(lb, Pauli::X), "sZX_", j);
      add(layer / 8, pauli(la, Pauli::X) * pauli(mq, Pauli::Z) * pauli(lb, Pauli::X), "sXZX_", j);
    }
  }
  return out;
}

namespace detail {

struct SampleSchedule {
  int n_steps = 0;
  std::vector<int> steps;     // strictly increasing, starts at 0
  std::vector<double> times;  // steps * dt
};

inline SampleSchedule build_schedule(const CircuitRunConfig& cfg) {
  SampleSchedule s;
  s.n_steps = static_cast<int>(std::llround(std::ceil(cfg.t_final / cfg.dt - 1e-9)));
  if (s.n_steps < 1) s.n_steps = 1;
  for (int k = 0;; ++k) {
    const double t = k * cfg.sample_interval;
    if (t > s.n_steps * cfg.dt + 1e-9) break;
    int step = static_cast<int>(std::llround(t / cfg.dt));
    if (step > s.n_steps) step = s.n_steps;
    if (!s.steps.empty() && step <= s.steps.back()) continue;
    s.steps.push_back(step);
    s.times.push_back(step * cfg.dt);
  }
  if (s.steps.empty() || s.steps.front() != 0) {
    s.steps.insert(s.steps.begin(), 0);
    s.times.insert(s.times.begin(), 0.0);
  }
  return s;
}

}  // namespace detail

/// Monte Carlo average over noisy gate-level trajectories. Requires lambda=0
/// (only the gauge-invariant Hamiltonian is compiled to gates) and at least
/// two trajectories for standard errors. Emits one column per observable
/// followed by one _se column each; residual_rounds counts correction rounds
/// per trajectory that left a nonzero syndrome. With corrections enabled the
/// measurement-layer CNOTs pass through the same noise channel, so the
/// (8n+3)/(8n) budget overhead shows up organically.
inline TrajectoryRecord run_trajectories(const ModelConfig& model, const CircuitRunConfig& cfg,
                                         int n_workers = 1) {
  model.validate();
  cfg.validate();
  if (model.lambda != 0)
    throw std::invalid_argument("run_trajectories: gate path supports lambda = 0 only");
  if (cfg.n_traj < 2)
    throw std::invalid_argument("run_trajectories: need at least two trajectories for error bars");

  const RegisterLayout lay = model.layout();
  const int nq = lay.n_qubits() + 1;
  const Eigen::Index d_sys = lay.dim();

  DVec sys0 = model.initial == InitialStateKind::StaggeredProduct
                  ? staggered_product_vector(model)
                  : physical_ground_state(model).psi;
  DVec full0 = DVec::Zero(Eigen::Index(1) << nq);
  for (Eigen::Index i = 0; i < d_sys; ++i) full0(2 * i) = sys0(i);

  const Observables obs(model);
  const GateSequence step_seq = trotter_step_circuit(model, cfg);
  std::vector<GateSequence> synd_seqs;
  if (cfg.n_between > 0)
    for (int j = 0; j < model.n; ++j) synd_seqs.push_back(syndrome_measurement_circuit(model, j));

  const detail::SampleSchedule sched = detail::build_schedule(cfg);
  const size_t n_samples = sched.steps.size();
  constexpr size_t kObs = 5;  // eps, link_link, matter_matter, energy, residual_rounds
  std::vector<double> slab(static_cast<size_t>(cfg.n_traj) * n_samples * kObs);

  const auto run_one = [&](int traj) {
    std::mt19937_64 rng = detail::trajectory_rng(cfg.seed, static_cast<std::uint64_t>(traj));
    Statevector psi(nq, full0);
    CircuitExecutor exec(psi, cfg.p, rng);
    int residual_rounds = 0;
    size_t next = 0;
    DVec sys(d_sys);

    const auto sample = [&](int step_index) {
      while (next < n_samples && sched.steps[next] == step_index) {
        if (psi.norm_error() > 1e-10)
          throw EvolveError("run_trajectories: statevector norm drifted beyond 1e-10");
        for (Eigen::Index i = 0; i < d_sys; ++i) sys(i) = psi.amplitudes()(2 * i);
        double* row = slab.data() + (static_cast<size_t>(traj) * n_samples + next) * kObs;
        row[0] = std::abs(expectation(obs.gauge_sum(), sys).real()) / model.n;
        row[1] = expectation(obs.link_corr_op(), sys).real();
        row[2] = expectation(obs.matter_corr_op(), sys).real();
        row[3] = expectation(obs.h0_op(), sys).real();
        row[4] = residual_rounds;
        ++next;
      }
    };

    sample(0);
    for (int step = 1; step <= sched.n_steps; ++step) {
      exec.run(step_seq);
      if (cfg.n_between > 0 && step % cfg.n_between == 0) {
        exec.clear_outcomes();
        for (const GateSequence& seq : synd_seqs) exec.run(seq);
        std::vector<int> syndromes;
        for (int m : exec.outcomes()) syndromes.push_back(2 * m);
        FeedbackResult fb = correction_feedback(model, syndromes);
        exec.run(fb.gates);
        if (!fb.fully_corrected) ++residual_rounds;
      }
      sample(step);
    }
  };

  if (n_workers <= 1) {
    for (int traj = 0; traj < cfg.n_traj; ++traj) run_one(traj);
  } else {
    std::atomic<int> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const int traj = cursor.fetch_add(1);
          if (traj >= cfg.n_traj) return;
          try {
            run_one(traj);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  TrajectoryRecord rec;
  rec.times = sched.times;
  rec.seed = cfg.seed;
  {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "trotter n=%d dt=%g p=%g n_between=%d n_traj=%d", model.n,
                  cfg.dt, cfg.p, cfg.n_between, cfg.n_traj);
    rec.config_snapshot = buf;
  }

  static const char* col_names[kObs] = {"eps", "link_link", "matter_matter", "energy",
                                        "residual_rounds"};
  std::vector<std::vector<double>> means(kObs, std::vector<double>(n_samples)),
      ses(kObs, std::vector<double>(n_samples));
  for (size_t c = 0; c < kObs; ++c)
    for (size_t k = 0; k < n_samples; ++k) {
      double sum = 0;
      for (int traj = 0; traj < cfg.n_traj; ++traj)
        sum += slab[(static_cast<size_t>(traj) * n_samples + k) * kObs + c];
      const double mean = sum / cfg.n_traj;
      double var = 0;
      for (int traj = 0; traj < cfg.n_traj; ++traj) {
        const double dlt = slab[(static_cast<size_t>(traj) * n_samples + k) * kObs + c] - mean;
        var += dlt * dlt;
      }
      means[c][k] = mean;
      ses[c][k] = std::sqrt(var / (static_cast<double>(cfg.n_traj) * (cfg.n_traj - 1)));
    }
  for (size_t c = 0; c < kObs; ++c) rec.add_series(col_names[c], std::move(means[c]));
  for (size_t c = 0; c < kObs; ++c) rec.add_series(std::string(col_names[c]) + "_se", std::move(ses[c]));
  return rec;
}

}  // namespace z2stab
