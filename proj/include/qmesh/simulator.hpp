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
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmesh/complex_matrix.hpp"
#include "qmesh/error_model.hpp"
#include "qmesh/errors.hpp"
#include "qmesh/rng.hpp"

namespace qmesh {

/// One heralded sampling attempt. detected_mode is empty when the photon was
/// lost or the detector missed it; it is only ever set on heralded trials.
struct TrialOutcome {
  bool herald_fired = false;
  std::optional<std::size_t> detected_mode;
};

struct CountsTable {
  std::uint64_t trials = 0;
  std::uint64_t herald_count = 0;
  std::vector<std::uint64_t> mode_counts;
  std::uint64_t loss_count = 0;

  std::uint64_t detected_total() const {
    std::uint64_t acc = 0;
    for (auto c : mode_counts) acc += c;
    return acc;
  }

  void check() const {
    if (herald_count != detected_total() + loss_count)
      throw DataError("CountsTable: herald != detected + lost");
    if (herald_count > trials) throw DataError("CountsTable: herald > trials");
  }
};

inline void require_input(const RealizedCircuit& rc, const StateVector& input) {
  if (input.size() != rc.modes())
    throw std::invalid_argument("input dimension " + std::to_string(input.size()) +
                                " does not match circuit modes " + std::to_string(rc.modes()));
  if (std::abs(input.squared_norm() - 1.0) > 1e-10)
    throw std::invalid_argument("input state is not normalized");
}

/// Output amplitudes: (unitary part) * input, scaled by sqrt(survival).
inline StateVector propagate(const RealizedCircuit& rc, const StateVector& input) {
  require_input(rc, input);
  StateVector out = apply(rc.unitary(), input);
  const double scale = std::sqrt(rc.survival);
  for (auto& a : out.amplitudes) a *= scale;
  return out;
}

struct OutcomeProbs {
  std::vector<double> per_mode;
  double loss = 0.0;
};

/// Per-mode click probability = survival * |amplitude|^2 * detector
/// efficiency; whatever remains is the loss bucket. Sums to one.
inline OutcomeProbs outcome_probs(const RealizedCircuit& rc, const StateVector& input) {
  require_input(rc, input);
  const StateVector out = apply(rc.unitary(), input);
  OutcomeProbs p;
  p.per_mode.resize(rc.modes());
  double sum = 0.0;
  for (std::size_t k = 0; k < rc.modes(); ++k) {
    const double eff = rc.detector_efficiency.empty() ? 1.0 : rc.detector_efficiency[k];
    p.per_mode[k] = rc.survival * std::norm(out.amplitudes[k]) * eff;
    sum += p.per_mode[k];
  }
  p.loss = std::max(0.0, 1.0 - sum);
  return p;
}

/// One trial with its own counter-derived stream: herald Bernoulli, then a
/// categorical draw over (modes..., loss). Deterministic in (seed, index)
/// regardless of how trials are scheduled.
inline TrialOutcome run_trial(const OutcomeProbs& probs, double herald_efficiency,
                              std::uint64_t seed, std::uint64_t index) {
  Rng rng(derive_seed(seed, index));
  TrialOutcome t;
  if (rng.uniform() >= herald_efficiency) return t;
  t.herald_fired = true;
  double u = rng.uniform();
  for (std::size_t k = 0; k < probs.per_mode.size(); ++k) {
    if (u < probs.per_mode[k]) {
      t.detected_mode = k;
      return t;
    }
    u -= probs.per_mode[k];
  }
  return t;  // loss bucket
}

inline CountsTable sample_trials(const RealizedCircuit& rc, const StateVector& input,
                                 std::uint64_t n, std::uint64_t seed) {
  const OutcomeProbs probs = outcome_probs(rc, input);
  CountsTable counts;
  counts.trials = n;
  counts.mode_counts.assign(rc.modes(), 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    const TrialOutcome t = run_trial(probs, rc.herald_efficiency, seed, i);
    if (!t.herald_fired) continue;
    ++counts.herald_count;
    if (t.detected_mode)
      ++counts.mode_counts[*t.detected_mode];
    else
      ++counts.loss_count;
  }
  return counts;
}

/// Ordered per-trial outcomes; same trial math as sample_trials, kept for
/// digit extraction where event order matters.
inline std::vector<TrialOutcome> sample_outcomes(const RealizedCircuit& rc,
                                                 const StateVector& input, std::uint64_t n,
                                                 std::uint64_t seed) {
  const OutcomeProbs probs = outcome_probs(rc, input);
  std::vector<TrialOutcome> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i)
    out.push_back(run_trial(probs, rc.herald_efficiency, seed, i));
  return out;
}

struct Visibility {
  /// |<input| M |input>| with M the full transfer matrix including loss.
  double raw_overlap = 0.0;
  /// Fringe contrast 2|<in|M in>| / (1 + ||M in||^2): what a two-arm scan
  /// of the path phase actually shows once loss rebalances the arms.
  double normalized_contrast = 0.0;
};

/// Two-arm interference diagnostic for a composed undo device sitting in
/// one arm; the prepared input mode carries the split photon.
inline Visibility interference_visibility(const RealizedCircuit& rc, const StateVector& input) {
  require_input(rc, input);
  StateVector out = apply(rc.unitary(), input);
  const double scale = std::sqrt(rc.survival);
  for (auto& a : out.amplitudes) a *= scale;
  Visibility v;
  v.raw_overlap = std::abs(inner_product(input, out));
  v.normalized_contrast = 2.0 * v.raw_overlap / (1.0 + out.squared_norm());
  return v;
}

// -- CSV form: trial_total, herald, mode_0..mode_{N-1}, lost ---------------

inline std::string counts_to_csv(const CountsTable& c) {
  std::ostringstream os;
  os << "trial_total,herald";
  for (std::size_t k = 0; k < c.mode_counts.size(); ++k) os << ",mode_" << k;
  os << ",lost\n" << c.trials << ',' << c.herald_count;
  for (auto m : c.mode_counts) os << ',' << m;
  os << ',' << c.loss_count << '\n';
  return os.str();
}

inline CountsTable counts_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string header, row;
  if (!std::getline(is, header) || !std::getline(is, row))
    throw DataError("counts CSV: expected a header and one data row");
  std::vector<std::uint64_t> vals;
  std::istringstream rs(row);
  std::string cell;
  while (std::getline(rs, cell, ','))
    try {
      vals.push_back(std::stoull(cell));
    } catch (const std::exception&) {
      throw DataError("counts CSV: non-numeric cell '" + cell + "'");
    }
  if (vals.size() < 4) throw DataError("counts CSV: too few columns");
  CountsTable c;
  c.trials = vals[0];
  c.herald_count = vals[1];
  c.mode_counts.assign(vals.begin() + 2, vals.end() - 1);
  c.loss_count = vals.back();
  c.check();
  return c;
}

}  // namespace qmesh
