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
// Operator content of the Z2 gauge chain: the gauge-invariant Hamiltonian,
// the gauge-variant perturbation, gauge operators and their projectors,
// noise and correction jump operators, and reference initial states.

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "z2stab/pauli_algebra.hpp"

namespace z2stab {

enum class NoiseKind { BitflipPhaseflipAll, SpontaneousAll, GaugeVariantOnly, None };
enum class InitialStateKind { Ground, StaggeredProduct };

inline std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::BitflipPhaseflipAll: return "bitflip_phaseflip_all";
    case NoiseKind::SpontaneousAll: return "spontaneous_all";
    case NoiseKind::GaugeVariantOnly: return "gauge_variant_only";
    case NoiseKind::None: return "none";
  }
  return "?";
}

inline NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "bitflip_phaseflip_all") return NoiseKind::BitflipPhaseflipAll;
  if (s == "spontaneous_all") return NoiseKind::SpontaneousAll;
  if (s == "gauge_variant_only") return NoiseKind::GaugeVariantOnly;
  if (s == "none") return NoiseKind::None;
  throw std::invalid_argument("unknown noise kind: " + s);
}

inline std::string to_string(InitialStateKind k) {
  return k == InitialStateKind::Ground ? "ground" : "staggered_product";
}

inline InitialStateKind initial_state_from_string(const std::string& s) {
  if (s == "ground") return InitialStateKind::Ground;
  if (s == "staggered_product") return InitialStateKind::StaggeredProduct;
  throw std::invalid_argument("unknown initial state kind: " + s);
}

/// All model parameters. Couplings default to the reference values used
/// throughout; rates default to zero (closed, unperturbed chain).
struct ModelConfig {
  int n = 2;             // matter sites (and links)
  double j_a = 1.0;      // matter-field coupling
  double j_f = 0.54;     // electric field energy
  double c1 = 0.51, c2 = -0.49, c3 = 0.77, c4 = 0.21;  // perturbation couplings
  double lambda = 0.0;   // coherent error strength
  double g = 1.0;        // gauge penalty strength
  double gamma = 0.0;    // incoherent error rate
  double gamma_c = 0.0;  // correction rate
  NoiseKind noise = NoiseKind::None;
  InitialStateKind initial = InitialStateKind::Ground;

  void validate() const {
    if (n < 2) throw std::invalid_argument("ModelConfig: need at least two sites");
    if (gamma < 0 || gamma_c < 0) throw std::invalid_argument("ModelConfig: rates must be nonnegative");
  }

  RegisterLayout layout() const { return RegisterLayout(n); }
};

using JumpOperatorSet = std::vector<Operator>;

namespace detail {

/// Ladder operators in the X eigenbasis: tau_pm = (Z -+ iY)/2 maps the
/// X = -+1 state to the X = +-1 state.
inline Eigen::Matrix2cd tau_ladder_matrix(int sign) {
  return 0.5 * (pauli_matrix(Pauli::Z) - double(sign) * kImag * pauli_matrix(Pauli::Y));
}

}  // namespace detail

/// Hopping term plus electric field energy; commutes with every gauge
/// operator.
inline Operator build_h0(const ModelConfig& cfg) {
  cfg.validate();
  const RegisterLayout lay = cfg.layout();
  std::vector<Term> terms;
  for (int j = 0; j < cfg.n; ++j) {
    Operator hop = embed_string(lay, {{lay.matter_qubit(j), Pauli::Plus},
                                      {lay.link_qubit(j), Pauli::Z},
                                      {lay.matter_qubit(j + 1), Pauli::Minus}});
    terms.push_back({cfg.j_a, {hop}});
    terms.push_back({cfg.j_a, {hop.dagger()}});
    terms.push_back({-cfg.j_f, {embed_pauli(lay, lay.link_qubit(j), Pauli::X)}});
  }
  return combine(terms).relabel("H0");
}

/// Gauge generator at site j (0-based). The staggering sign absorbs the shift
/// from 1-based site labels, so internally G_j = 1 + (-1)^j X Z X on the
/// link/matter/link triple around site j. Spectrum is {0, 2}.
inline Operator build_gauge_operator(const ModelConfig& cfg, int j) {
  cfg.validate();
  if (j < 0 || j >= cfg.n) throw std::out_of_range("build_gauge_operator: site index out of range");
  const RegisterLayout lay = cfg.layout();
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  Operator s = embed_string(lay, {{lay.link_qubit(j - 1), Pauli::X},
                                  {lay.matter_qubit(j), Pauli::Z},
                                  {lay.link_qubit(j), Pauli::X}});
  return (identity_op(lay) + sign * s).relabel("G" + std::to_string(j));
}

/// Projector onto the violated (eigenvalue 2) subspace of G_j.
inline Operator gauge_p2(const ModelConfig& cfg, int j) {
  return (0.5 * build_gauge_operator(cfg, j)).relabel("P2_" + std::to_string(j));
}

/// Projector onto the gauge-satisfying (eigenvalue 0) subspace of G_j.
inline Operator gauge_p0(const ModelConfig& cfg, int j) {
  const RegisterLayout lay = cfg.layout();
  return (identity_op(lay) - gauge_p2(cfg, j)).relabel("P0_" + std::to_string(j));
}

/// Projector onto the physical sector, the joint kernel of all G_j.
inline Operator physical_projector(const ModelConfig& cfg) {
  Operator p = gauge_p0(cfg, 0);
  for (int j = 1; j < cfg.n; ++j) p = p * gauge_p0(cfg, j);
  return p.relabel("P_phys");
}

/// Gauge-variant perturbation: field-flipping hopping plus occupation-field
/// couplings. Hermitian but does not commute with the gauge operators.
inline Operator build_h1(const ModelConfig& cfg) {
  cfg.validate();
  const RegisterLayout lay = cfg.layout();
  const Eigen::Matrix2cd n_occ = pauli_matrix(Pauli::Plus) * pauli_matrix(Pauli::Minus);
  std::vector<Term> terms;
  for (int j = 0; j < cfg.n; ++j) {
    Operator sp = embed_pauli(lay, lay.matter_qubit(j), Pauli::Plus);
    Operator sm = embed_pauli(lay, lay.matter_qubit(j + 1), Pauli::Minus);
    Operator tm = embed_matrix(lay, lay.link_qubit(j), detail::tau_ladder_matrix(-1));
    Operator tp = embed_matrix(lay, lay.link_qubit(j), detail::tau_ladder_matrix(+1));
    Operator hop = combine({{cfg.c1, {sp, tm, sm}}, {cfg.c2, {sp, tp, sm}}});
    terms.push_back({1.0, {hop}});
    terms.push_back({1.0, {hop.dagger()}});

    Operator occ = embed_matrix(lay, lay.matter_qubit(j), n_occ);
    terms.push_back({cfg.c3, {occ, embed_pauli(lay, lay.link_qubit(j), Pauli::Z)}});
    terms.push_back({cfg.c4, {occ, embed_pauli(lay, lay.link_qubit(j - 1), Pauli::Z)}});
  }
  return combine(terms).relabel("H1");
}

/// H0 plus the scaled perturbation plus, when g is nonzero, the gauge penalty
/// g (1/N) sum_j G_j.
inline Operator build_full_hamiltonian(const ModelConfig& cfg) {
  cfg.validate();
  Operator h = build_h0(cfg);
  if (cfg.lambda != 0.0) h = h + cfg.lambda * build_h1(cfg);
  if (cfg.g != 0.0) {
    Operator gsum = build_gauge_operator(cfg, 0);
    for (int j = 1; j < cfg.n; ++j) gsum = gsum + build_gauge_operator(cfg, j);
    h = h + (cfg.g / cfg.n) * gsum;
  }
  return h.relabel("H");
}

/// Environmental jump operators, each scaled by sqrt(rate). A zero rate (or
/// kind none) yields the empty set.
inline JumpOperatorSet build_noise_jumps(const ModelConfig& cfg) {
  cfg.validate();
  const RegisterLayout lay = cfg.layout();
  JumpOperatorSet out;
  if (cfg.noise == NoiseKind::None || cfg.gamma == 0.0) return out;
  const double s = std::sqrt(cfg.gamma);
  auto add = [&](int q, Pauli p, const std::string& tag) {
    out.push_back((s * embed_pauli(lay, q, p)).relabel(tag + std::to_string(q)));
  };
  switch (cfg.noise) {
    case NoiseKind::BitflipPhaseflipAll:
      for (int q = 0; q < lay.n_qubits(); ++q) {
        add(q, Pauli::X, "X_q");
        add(q, Pauli::Z, "Z_q");
      }
      break;
    case NoiseKind::SpontaneousAll:
      for (int q = 0; q < lay.n_qubits(); ++q) add(q, Pauli::Minus, "minus_q");
      break;
    case NoiseKind::GaugeVariantOnly:
      for (int j = 0; j < cfg.n; ++j) {
        add(lay.matter_qubit(j), Pauli::X, "X_q");
        add(lay.link_qubit(j), Pauli::Z, "Z_q");
      }
      break;
    case NoiseKind::None:
      break;
  }
  return out;
}

/// Engineered correction jumps: a syndrome-conditioned bit-flip per matter
/// site and phase-flip per link, each scaled by sqrt(gamma_c). Empty when the
/// correction rate is zero.
inline JumpOperatorSet build_correction_jumps(const ModelConfig& cfg) {
  cfg.validate();
  const RegisterLayout lay = cfg.layout();
  JumpOperatorSet out;
  if (cfg.gamma_c == 0.0) return out;
  const double s = std::sqrt(cfg.gamma_c);
  for (int j = 0; j < cfg.n; ++j) {
    Operator cx = s * embed_pauli(lay, lay.matter_qubit(j), Pauli::X) * gauge_p0(cfg, lay.wrap(j - 1)) *
                  gauge_p2(cfg, j) * gauge_p0(cfg, lay.wrap(j + 1));
    out.push_back(cx.relabel("Cx_" + std::to_string(j)));
  }
  for (int j = 0; j < cfg.n; ++j) {
    Operator cz = s * embed_pauli(lay, lay.link_qubit(j), Pauli::Z) * gauge_p2(cfg, j) *
                  gauge_p2(cfg, lay.wrap(j + 1));
    out.push_back(cz.relabel("Cz_" + std::to_string(j)));
  }
  return out;
}

/// Product state with every link polarized along X = -1 and matter
/// occupations staggered so that all gauge constraints hold. Sits at the top
/// of the field term, +J_f*N, which makes it the high-energy reference state
/// for cooling runs; an eigenstate once the hopping is switched off.
inline DVec staggered_product_vector(const ModelConfig& cfg) {
  cfg.validate();
  const RegisterLayout lay = cfg.layout();
  const double r = 1.0 / std::sqrt(2.0);
  DVec psi = DVec::Ones(1);
  for (int q = 0; q < lay.n_qubits(); ++q) {
    Eigen::Vector2cd f;
    if (q % 2 == 1) {
      f << r, -r;  // link: X = -1
    } else {
      // Matter site j = q/2 sits in the Z eigenstate with sign (-1)^(j+1).
      // G_j applies X on both adjacent links, so with a uniform link
      // orientation the constraint fixes the same matter pattern either way.
      int j = q / 2;
      if (j % 2 == 0) {
        f << 0, 1;  // Z = -1
      } else {
        f << 1, 0;  // Z = +1
      }
    }
    DVec next(psi.size() * 2);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      next(2 * i) = psi(i) * f(0);
      next(2 * i + 1) = psi(i) * f(1);
    }
    psi.swap(next);
  }
  return psi;
}

struct GroundStateInfo {
  DVec psi;          // deterministic representative
  double energy;     // physical-sector ground energy of H0
  int multiplicity;  // degeneracy of that level within the sector
};

/// Lowest eigenstate of H0 restricted to the physical sector. Degenerate
/// levels are resolved deterministically: project the staggered product state
/// onto the degenerate subspace (falling back to the first basis vector with
/// support there).
inline GroundStateInfo physical_ground_state(const ModelConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = cfg.layout().dim();
  const DMat p = physical_projector(cfg).dense();
  // Shift the unphysical sectors far above the spectrum so the sector ground
  // state is the global minimum of the shifted operator.
  const double shift = 1e3;
  DMat h = build_h0(cfg).dense() + shift * (DMat::Identity(d, d) - p);
  Eigen::SelfAdjointEigenSolver<DMat> es(0.5 * (h + h.adjoint()));
  const Eigen::VectorXd evals = es.eigenvalues();
  const double e0 = evals(0);
  if (e0 > 0.5 * shift) throw std::runtime_error("physical_ground_state: empty physical sector");

  const double tol = 1e-9 * std::max(1.0, std::abs(e0));
  int mult = 0;
  while (mult < evals.size() && evals(mult) - e0 < tol) ++mult;

  DMat basis = es.eigenvectors().leftCols(mult);
  DVec ref = basis.adjoint() * staggered_product_vector(cfg);
  if (ref.norm() < 1e-8) {
    for (Eigen::Index k = 0; k < d && ref.norm() < 1e-8; ++k) ref = basis.adjoint() * DVec::Unit(d, k);
  }
  DVec psi = basis * ref;
  psi /= psi.norm();
  // Fix the global phase: make the largest component real positive.
  Eigen::Index imax;
  psi.cwiseAbs().maxCoeff(&imax);
  psi *= std::conj(psi(imax)) / std::abs(psi(imax));
  return {std::move(psi), e0, mult};
}

/// Reference initial states; both satisfy every gauge constraint exactly.
inline DensityMatrix initial_state(const ModelConfig& cfg) {
  cfg.validate();
  if (cfg.initial == InitialStateKind::StaggeredProduct)
    return DensityMatrix::pure(staggered_product_vector(cfg));
  return DensityMatrix::pure(physical_ground_state(cfg).psi);
}

enum class SingleQubitError { MatterBitflip, MatterPhaseflip, LinkBitflip, LinkPhaseflip };

inline std::string to_string(SingleQubitError e) {
  switch (e) {
    case SingleQubitError::MatterBitflip: return "matter_bitflip";
    case SingleQubitError::MatterPhaseflip: return "matter_phaseflip";
    case SingleQubitError::LinkBitflip: return "link_bitflip";
    case SingleQubitError::LinkPhaseflip: return "link_phaseflip";
  }
  return "?";
}

/// Gauge eigenvalues (G_{j-1}, G_j, G_{j+1}) after one single-qubit error on
/// site or link j of a gauge-satisfying reference state. Computed by applying
/// the error and measuring; the triple must come out the same at every j.
inline std::map<SingleQubitError, std::array<double, 3>> gauge_syndrome_table(const ModelConfig& cfg) {
  cfg.validate();
  if (cfg.n < 3)
    throw std::invalid_argument("gauge_syndrome_table: needs three sites for a distinct neighborhood triple");
  const RegisterLayout lay = cfg.layout();
  const DVec ref = staggered_product_vector(cfg);
  std::vector<Operator> gauge;
  for (int j = 0; j < cfg.n; ++j) gauge.push_back(build_gauge_operator(cfg, j));

  auto probe = [&](SingleQubitError kind, int j) {
    int qubit = 0;
    Pauli p = Pauli::I;
    switch (kind) {
      case SingleQubitError::MatterBitflip: qubit = lay.matter_qubit(j); p = Pauli::X; break;
      case SingleQubitError::MatterPhaseflip: qubit = lay.matter_qubit(j); p = Pauli::Z; break;
      case SingleQubitError::LinkBitflip: qubit = lay.link_qubit(j); p = Pauli::X; break;
      case SingleQubitError::LinkPhaseflip: qubit = lay.link_qubit(j); p = Pauli::Z; break;
      default: throw std::logic_error("unreachable");
    }
    DVec err = embed_pauli(lay, qubit, p).matrix() * ref;
    err /= err.norm();
    std::array<double, 3> out{};
    for (int o = -1; o <= 1; ++o) out[o + 1] = expectation(gauge[lay.wrap(j + o)], err).real();
    return out;
  };

  std::map<SingleQubitError, std::array<double, 3>> table;
  for (SingleQubitError kind : {SingleQubitError::MatterBitflip, SingleQubitError::MatterPhaseflip,
                                SingleQubitError::LinkBitflip, SingleQubitError::LinkPhaseflip}) {
    std::array<double, 3> first = probe(kind, 0);
    for (int j = 1; j < cfg.n; ++j) {
      std::array<double, 3> other = probe(kind, j);
      for (int k = 0; k < 3; ++k)
        if (std::abs(other[k] - first[k]) > 1e-10)
          throw std::logic_error("gauge_syndrome_table: syndrome not site-independent");
    }
    table[kind] = first;
  }
  return table;
}

}  // namespace z2stab
