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

#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "qmesh/complex_matrix.hpp"
#include "qmesh/errors.hpp"

namespace qmesh {

/// Beam splitter coupling adjacent modes (mode, mode+1); mode is 0-based.
struct BeamSplitter {
  std::size_t mode = 0;
  double theta = 0.0;
  double phi = 0.0;
};

/// diag(e^{i phi_0}, ..., e^{i phi_{N-1}}).
struct PhaseDiagonal {
  std::vector<double> phases;
};

using GateSpec = std::variant<BeamSplitter, PhaseDiagonal>;

/// Ordered netlist of gates. Gates are stored in physical application order:
/// gates.front() acts on the photon first. The matrix of the plan therefore
/// has the LAST gate as the leftmost factor.
struct CircuitPlan {
  std::size_t modes = 0;
  std::vector<GateSpec> gates;

  std::size_t beam_splitter_count() const {
    std::size_t c = 0;
    for (const auto& g : gates)
      if (std::holds_alternative<BeamSplitter>(g)) ++c;
    return c;
  }
};

inline void validate(const CircuitPlan& plan) {
  if (plan.modes < 1) throw std::invalid_argument("CircuitPlan: modes must be >= 1");
  for (const auto& g : plan.gates) {
    if (const auto* bs = std::get_if<BeamSplitter>(&g)) {
      if (bs->mode + 1 >= plan.modes)
        throw std::invalid_argument("CircuitPlan: beam splitter mode out of range");
      if (!std::isfinite(bs->theta) || !std::isfinite(bs->phi))
        throw std::invalid_argument("CircuitPlan: non-finite beam splitter angle");
    } else {
      const auto& pd = std::get<PhaseDiagonal>(g);
      if (pd.phases.size() != plan.modes)
        throw std::invalid_argument("CircuitPlan: phase diagonal length != modes");
      for (double p : pd.phases)
        if (!std::isfinite(p)) throw std::invalid_argument("CircuitPlan: non-finite phase");
    }
  }
}

inline ComplexMatrix gate_matrix(const GateSpec& g, std::size_t n) {
  if (const auto* bs = std::get_if<BeamSplitter>(&g))
    return embed_t(n, bs->mode, bs->theta, bs->phi);
  return ComplexMatrix::diagonal_phases(std::get<PhaseDiagonal>(g).phases);
}

/// Product of the embedded gate matrices, last-applied gate leftmost.
inline ComplexMatrix reconstruct(const CircuitPlan& plan) {
  validate(plan);
  ComplexMatrix m = ComplexMatrix::identity(plan.modes);
  for (const auto& g : plan.gates) m = gate_matrix(g, plan.modes) * m;
  return m;
}

/// Mirror netlist implementing the adjoint transformation: gate order is
/// reversed and each block is inverted. A beam splitter expands via
/// T(theta,phi)^dag = T(0,-phi) T(-theta,0); the phase part is applied after
/// the angle part so the reconstructed product matches the adjoint. Pure
/// rotations (phi = 0) and pure phases (theta = 0) invert as single gates.
inline CircuitPlan invert_plan(const CircuitPlan& plan) {
  validate(plan);
  CircuitPlan out;
  out.modes = plan.modes;
  for (auto it = plan.gates.rbegin(); it != plan.gates.rend(); ++it) {
    if (const auto* bs = std::get_if<BeamSplitter>(&*it)) {
      if (bs->phi == 0.0) {
        out.gates.push_back(BeamSplitter{bs->mode, -bs->theta, 0.0});
      } else if (bs->theta == 0.0) {
        out.gates.push_back(BeamSplitter{bs->mode, 0.0, -bs->phi});
      } else {
        out.gates.push_back(BeamSplitter{bs->mode, -bs->theta, 0.0});
        out.gates.push_back(BeamSplitter{bs->mode, 0.0, -bs->phi});
      }
    } else {
      const auto& pd = std::get<PhaseDiagonal>(*it);
      PhaseDiagonal neg;
      neg.phases.reserve(pd.phases.size());
      for (double p : pd.phases) neg.phases.push_back(-p);
      out.gates.push_back(std::move(neg));
    }
  }
  return out;
}

/// Concatenation in application order; rhs runs after lhs.
inline CircuitPlan concat(const CircuitPlan& lhs, const CircuitPlan& rhs) {
  if (lhs.modes != rhs.modes) throw std::invalid_argument("concat: mode counts differ");
  CircuitPlan out = lhs;
  out.gates.insert(out.gates.end(), rhs.gates.begin(), rhs.gates.end());
  return out;
}

}  // namespace qmesh
