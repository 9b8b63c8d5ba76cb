// Copyright 2026 the qmesh authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qmesh/circuit_plan.hpp"
#include "qmesh/rng.hpp"

namespace qmesh {

/// Systematic offsets for one gate position. For beam splitters theta/phi
/// apply directly; for a phase diagonal, `phases` carries per-mode offsets
/// (a scalar `phi` is broadcast to every entry when `phases` is empty).
struct GateOffset {
  double theta = 0.0;
  double phi = 0.0;
  std::vector<double> phases;
};

/// Fabrication and detection error model. Angles pick up a fixed systematic
/// offset plus zero-mean Gaussian jitter truncated at 4 sigma. Loss is
/// collapsed to a single per-trial survival probability (single photons,
/// uniform couplings), so the unitary part of a circuit stays exactly
/// unitary and only the scalar survival is non-unitary.
struct ErrorModel {
  std::map<std::size_t, GateOffset> systematic;  // keyed by gate position
  double jitter_sigma_theta = 0.0;
  double jitter_sigma_phi = 0.0;
  double transmission = 1.0;                 // per-trial photon survival
  std::vector<double> detector_efficiency;   // per mode; empty or size 1 = broadcast
  double herald_efficiency = 1.0;

  void validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(transmission)) throw std::invalid_argument("ErrorModel: transmission not in [0,1]");
    if (!prob(herald_efficiency))
      throw std::invalid_argument("ErrorModel: herald_efficiency not in [0,1]");
    for (double e : detector_efficiency)
      if (!prob(e)) throw std::invalid_argument("ErrorModel: detector_efficiency not in [0,1]");
    if (jitter_sigma_theta < 0.0 || jitter_sigma_phi < 0.0)
      throw std::invalid_argument("ErrorModel: jitter sigma must be >= 0");
  }
};

/// A circuit with concrete (imperfect) parameters. The plan holds the
/// realized angles; everything lossy lives in the scalars.
struct RealizedCircuit {
  CircuitPlan plan;
  double survival = 1.0;
  std::vector<double> detector_efficiency;  // size = modes
  double herald_efficiency = 1.0;

  std::size_t modes() const noexcept { return plan.modes; }
  ComplexMatrix unitary() const { return reconstruct(plan); }
};

inline std::vector<double> broadcast_efficiency(const std::vector<double>& eff, std::size_t n) {
  if (eff.empty()) return std::vector<double>(n, 1.0);
  if (eff.size() == 1) return std::vector<double>(n, eff[0]);
  if (eff.size() != n)
    throw std::invalid_argument("detector_efficiency: need 1 or mode-count entries");
  return eff;
}

/// Draws a realized circuit: nominal + systematic + jitter, deterministic in
/// (plan, model, seed). Jitter is consumed in gate order (theta before phi,
/// diagonal phases in mode order) so a fixed seed pins every angle.
inline RealizedCircuit perturb(const CircuitPlan& plan, const ErrorModel& model,
                               std::uint64_t seed) {
  validate(plan);
  model.validate();
  Rng rng(seed);

  RealizedCircuit rc;
  rc.plan.modes = plan.modes;
  rc.plan.gates.reserve(plan.gates.size());
  for (std::size_t i = 0; i < plan.gates.size(); ++i) {
    const GateOffset* off = nullptr;
    if (auto it = model.systematic.find(i); it != model.systematic.end()) off = &it->second;
    if (const auto* bs = std::get_if<BeamSplitter>(&plan.gates[i])) {
      BeamSplitter g = *bs;
      g.theta += (off ? off->theta : 0.0) + rng.truncated_gaussian(model.jitter_sigma_theta);
      g.phi += (off ? off->phi : 0.0) + rng.truncated_gaussian(model.jitter_sigma_phi);
      rc.plan.gates.push_back(g);
    } else {
      const auto& pd = std::get<PhaseDiagonal>(plan.gates[i]);
      PhaseDiagonal g = pd;
      for (std::size_t k = 0; k < g.phases.size(); ++k) {
        double sys = 0.0;
        if (off) {
          if (!off->phases.empty()) {
            if (off->phases.size() != g.phases.size())
              throw std::invalid_argument("ErrorModel: phase offset length != modes");
            sys = off->phases[k];
          } else {
            sys = off->phi;
          }
        }
        g.phases[k] += sys + rng.truncated_gaussian(model.jitter_sigma_phi);
      }
      rc.plan.gates.push_back(std::move(g));
    }
  }
  rc.survival = model.transmission;
  rc.detector_efficiency = broadcast_efficiency(model.detector_efficiency, plan.modes);
  rc.herald_efficiency = model.herald_efficiency;
  return rc;
}

/// Mirror built from the realized angles: matching but opposite parameters,
/// the back-to-back configuration where systematic errors cancel exactly.
/// Loss and detection parameters carry over unchanged. A separately
/// fabricated mirror is modeled instead by perturbing invert_plan(nominal)
/// with its own seed.
inline RealizedCircuit mirror_circuit(const RealizedCircuit& rc) {
  RealizedCircuit out;
  out.plan = invert_plan(rc.plan);
  out.survival = rc.survival;
  out.detector_efficiency = rc.detector_efficiency;
  out.herald_efficiency = rc.herald_efficiency;
  return out;
}

enum class ArrangementStyle {
  kMirrorsAtBack,    // U_1 ... U_n then the mirrors in reverse order
  kAlternating,      // U_1 M_1 U_2 M_2 ...
  kEvenSelfAdjoint,  // an even number of forward copies, no mirrors
  kExplicitPermutation,
};

struct ArrangementSlot {
  std::size_t copy = 0;  // 0-based forward-copy index
  bool mirrored = false;
};

struct ArrangementSpec {
  std::size_t copies = 1;
  ArrangementStyle style = ArrangementStyle::kMirrorsAtBack;
  bool independent_errors = false;  // fresh jitter per copy and per mirror
  std::vector<ArrangementSlot> permutation;  // only for kExplicitPermutation
};

inline std::vector<ArrangementSlot> arrangement_order(const ArrangementSpec& spec) {
  std::vector<ArrangementSlot> order;
  switch (spec.style) {
    case ArrangementStyle::kMirrorsAtBack:
      for (std::size_t j = 0; j < spec.copies; ++j) order.push_back({j, false});
      for (std::size_t j = spec.copies; j-- > 0;) order.push_back({j, true});
      break;
    case ArrangementStyle::kAlternating:
      for (std::size_t j = 0; j < spec.copies; ++j) {
        order.push_back({j, false});
        order.push_back({j, true});
      }
      break;
    case ArrangementStyle::kEvenSelfAdjoint:
      if (spec.copies % 2 != 0)
        throw std::invalid_argument("EvenSelfAdjoint arrangement needs an even copy count");
      for (std::size_t j = 0; j < spec.copies; ++j) order.push_back({j, false});
      break;
    case ArrangementStyle::kExplicitPermutation: {
      std::vector<bool> fwd(spec.copies, false), mir(spec.copies, false);
      for (const auto& slot : spec.permutation) {
        if (slot.copy >= spec.copies)
          throw std::invalid_argument("permutation: copy index out of range");
        auto& seen = slot.mirrored ? mir : fwd;
        if (seen[slot.copy])
          throw std::invalid_argument("permutation: duplicate slot");
        seen[slot.copy] = true;
      }
      for (std::size_t j = 0; j < spec.copies; ++j)
        if (!fwd[j] || !mir[j])
          throw std::invalid_argument("permutation: every copy and mirror must appear once");
      order = spec.permutation;
      break;
    }
  }
  return order;
}

/// Serial concatenation of device copies (and mirrors, where the style uses
/// them). When no explicit mirror list is given the mirrors are derived from
/// the forward copies with mirror_circuit, i.e. anti-correlated errors.
/// Survival probabilities multiply; heralding comes from the first slot and
/// detection from the last.
inline RealizedCircuit compose_arrangement(
    std::span<const RealizedCircuit> fwd_copies, const ArrangementSpec& spec,
    std::span<const RealizedCircuit> mirror_copies = {}) {
  if (fwd_copies.size() != spec.copies)
    throw std::invalid_argument("compose_arrangement: copy count does not match spec");
  if (spec.copies == 0) throw std::invalid_argument("compose_arrangement: need >= 1 copy");
  const bool uses_mirrors = spec.style != ArrangementStyle::kEvenSelfAdjoint;
  if (!mirror_copies.empty()) {
    if (!uses_mirrors)
      throw std::invalid_argument("compose_arrangement: style takes no mirrors");
    if (mirror_copies.size() != spec.copies)
      throw std::invalid_argument("compose_arrangement: mirror count does not match spec");
  }

  std::vector<RealizedCircuit> derived;
  if (uses_mirrors && mirror_copies.empty()) {
    derived.reserve(spec.copies);
    for (const auto& f : fwd_copies) derived.push_back(mirror_circuit(f));
    mirror_copies = derived;
  }

  const auto order = arrangement_order(spec);
  RealizedCircuit out;
  out.plan.modes = fwd_copies[0].modes();
  out.survival = 1.0;
  for (const auto& slot : order) {
    const RealizedCircuit& rc = slot.mirrored ? mirror_copies[slot.copy] : fwd_copies[slot.copy];
    if (rc.modes() != out.plan.modes)
      throw std::invalid_argument("compose_arrangement: mode counts differ between copies");
    out.plan.gates.insert(out.plan.gates.end(), rc.plan.gates.begin(), rc.plan.gates.end());
    out.survival *= rc.survival;
  }
  const RealizedCircuit& first =
      order.front().mirrored ? mirror_copies[order.front().copy] : fwd_copies[order.front().copy];
  const RealizedCircuit& last =
      order.back().mirrored ? mirror_copies[order.back().copy] : fwd_copies[order.back().copy];
  out.herald_efficiency = first.herald_efficiency;
  out.detector_efficiency = last.detector_efficiency;
  return out;
}

}  // namespace qmesh
