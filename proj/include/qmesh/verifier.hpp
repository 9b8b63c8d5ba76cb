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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmesh/clements.hpp"
#include "qmesh/complex_matrix.hpp"
#include "qmesh/error_model.hpp"
#include "qmesh/simulator.hpp"
#include "qmesh/stats.hpp"

namespace qmesh {

/// Pass thresholds for the certification battery. Every verdict records the
/// threshold that produced it, so reports stay reproducible from config.
struct Thresholds {
  double identity_deviation = 1e-3;
  double unitarity_deviation = 1e-8;
  double recovery_fidelity = 0.999;
  double visibility_raw = 0.999;
  double self_adjoint_deviation = 1e-3;
  double sharpness_offdiag = 1e-8;
  std::uint64_t min_clicks_per_mode = 10;
  double max_offmode_rate = 1e-3;  // tolerated true off-mode click rate
  double significance = 1e-3;
  bool statistical_checks = true;
};

struct Verdict {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct SharpnessResult {
  double gram_offdiag_max = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct CoverageResult {
  std::vector<bool> fired;
  std::vector<std::uint64_t> clicks;
  std::uint64_t min_clicks_required = 0;
  bool pass = false;
};

struct SelfAdjointResult {
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct AmplificationRow {
  ArrangementStyle style;
  std::size_t copies = 0;
  double identity_deviation = 0.0;
};

struct CertificationReport {
  double unitarity_deviation = 0.0;
  double identity_deviation = 0.0;
  double recovery_fidelity = 0.0;
  double survival = 1.0;
  double visibility_raw = 0.0;
  double visibility_normalized = 0.0;
  double offmode_rate = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<Verdict> verdicts;

  std::optional<SharpnessResult> sharpness;
  std::optional<CoverageResult> coverage;
  std::optional<SelfAdjointResult> self_adjoint;
  std::vector<AmplificationRow> amplification;

  bool passed() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    if (sharpness && !sharpness->pass) return false;
    if (coverage && !coverage->pass) return false;
    if (self_adjoint && !self_adjoint->pass) return false;
    return true;
  }
};

/// Index of the mode the prepared state occupies (largest amplitude); the
/// undo test expects recovered photons on this detector.
inline std::size_t dominant_mode(const StateVector& input) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t k = 0; k < input.size(); ++k)
    if (std::norm(input.amplitudes[k]) > best_mag) {
      best_mag = std::norm(input.amplitudes[k]);
      best = k;
    }
  return best;
}

/// Undo test: runs the device back-to-back with its mirror and checks that
/// the composition is the identity in every way we can observe it --
/// matrix metrics, recovered-state fidelity, interference contrast, and the
/// sampled click distribution concentrating on the input mode.
inline CertificationReport inversion_test(const RealizedCircuit& fwd,
                                          const RealizedCircuit& mirror,
                                          const StateVector& input, std::uint64_t n,
                                          std::uint64_t seed, const Thresholds& th = {}) {
  if (fwd.modes() != mirror.modes())
    throw std::invalid_argument("inversion_test: forward and mirror mode counts differ");
  require_input(fwd, input);
  if (n == 0 && th.statistical_checks)
    throw ConfigError("inversion_test: n = 0 with statistical checks enabled");

  RealizedCircuit composed;
  composed.plan = concat(fwd.plan, mirror.plan);
  composed.survival = fwd.survival * mirror.survival;
  composed.detector_efficiency = mirror.detector_efficiency;
  composed.herald_efficiency = fwd.herald_efficiency;

  const ComplexMatrix m = composed.unitary();
  CertificationReport rep;
  rep.seed = seed;
  rep.trials = n;
  rep.survival = composed.survival;
  rep.unitarity_deviation = unitarity_deviation(m);
  rep.identity_deviation = identity_deviation(m);

  const StateVector out = apply(m, input);
  rep.recovery_fidelity = std::norm(inner_product(input, out)) / out.squared_norm();

  const Visibility vis = interference_visibility(composed, input);
  rep.visibility_raw = vis.raw_overlap;
  rep.visibility_normalized = vis.normalized_contrast;

  rep.verdicts.push_back({"identity_deviation", rep.identity_deviation, th.identity_deviation,
                          rep.identity_deviation <= th.identity_deviation});
  rep.verdicts.push_back({"unitarity_deviation", rep.unitarity_deviation, th.unitarity_deviation,
                          rep.unitarity_deviation <= th.unitarity_deviation});
  rep.verdicts.push_back({"recovery_fidelity", rep.recovery_fidelity, th.recovery_fidelity,
                          rep.recovery_fidelity >= th.recovery_fidelity});
  rep.verdicts.push_back({"visibility_raw", rep.visibility_raw, th.visibility_raw,
                          rep.visibility_raw >= th.visibility_raw});

  if (th.statistical_checks) {
    const CountsTable counts = sample_trials(composed, input, n, seed);
    const std::uint64_t detected = counts.detected_total();
    const std::uint64_t off = detected - counts.mode_counts[dominant_mode(input)];
    rep.offmode_rate = detected ? static_cast<double>(off) / static_cast<double>(detected) : 0.0;
    // Off-mode clicks must not significantly exceed the tolerated rate.
    const double p = detected ? binomial_upper_pvalue(off, detected, th.max_offmode_rate) : 1.0;
    rep.verdicts.push_back({"offmode_clicks", rep.offmode_rate, th.max_offmode_rate,
                            p >= th.significance});
  }
  return rep;
}

/// Largest off-diagonal modulus of the Gram matrix of basis images, i.e. of
/// M^dag M. Zero for a sharp (orthogonality-preserving) device.
inline double gram_offdiag_max(const ComplexMatrix& m) {
  const ComplexMatrix g = dagger(m) * m;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      if (i != j) worst = std::max(worst, std::abs(g(i, j)));
  return worst;
}

inline SharpnessResult sharpness_test(const RealizedCircuit& rc, const Thresholds& th = {}) {
  SharpnessResult r;
  r.gram_offdiag_max = gram_offdiag_max(rc.unitary());
  r.threshold = th.sharpness_offdiag;
  r.pass = r.gram_offdiag_max < th.sharpness_offdiag;
  return r;
}

/// Operational check that every outcome has probability strictly between 0
/// and 1: each mode must fire at least min_clicks times, and no mode may
/// soak up (nearly) all clicks.
inline CoverageResult detector_coverage_test(const RealizedCircuit& rc, const StateVector& input,
                                             std::uint64_t n, std::uint64_t seed,
                                             const Thresholds& th = {}) {
  if (n < 1) throw std::invalid_argument("detector_coverage_test: need n >= 1");
  const CountsTable counts = sample_trials(rc, input, n, seed);
  const std::uint64_t detected = counts.detected_total();
  CoverageResult r;
  r.min_clicks_required = th.min_clicks_per_mode;
  r.clicks = counts.mode_counts;
  r.pass = true;
  for (auto c : counts.mode_counts) {
    r.fired.push_back(c >= 1);
    if (c < th.min_clicks_per_mode) r.pass = false;
    if (detected - c < th.min_clicks_per_mode) r.pass = false;  // mode captured ~everything
  }
  return r;
}

/// Identity deviation of the squared device; small only when the realized
/// unitary is (up to a global phase) an involution, i.e. self-adjoint.
inline SelfAdjointResult self_adjoint_test(const RealizedCircuit& rc, double tolerance = 1e-3) {
  const ComplexMatrix u = rc.unitary();
  SelfAdjointResult r;
  r.deviation = identity_deviation(u * u);
  r.tolerance = tolerance;
  r.pass = r.deviation <= tolerance;
  return r;
}

/// Builds each requested arrangement from the nominal plan and the error
/// model, and records how far the composition sits from the identity.
/// Shared errors reuse one realization for every copy (mirrors derived from
/// it); independent errors draw fresh jitter per copy, and the mirrors are
/// separately fabricated perturbations of the inverted nominal plan.
inline std::vector<AmplificationRow> amplification_scan(const CircuitPlan& nominal,
                                                        const ErrorModel& model,
                                                        std::span<const ArrangementSpec> specs,
                                                        std::uint64_t seed) {
  std::vector<AmplificationRow> rows;
  for (const auto& spec : specs) {
    std::vector<RealizedCircuit> fwd, mirrors;
    if (spec.independent_errors) {
      const CircuitPlan inverted = invert_plan(nominal);
      for (std::size_t j = 0; j < spec.copies; ++j) {
        fwd.push_back(perturb(nominal, model, derive_seed(seed, 2 * j)));
        if (spec.style != ArrangementStyle::kEvenSelfAdjoint)
          mirrors.push_back(perturb(inverted, model, derive_seed(seed, 2 * j + 1)));
      }
    } else {
      const RealizedCircuit rc = perturb(nominal, model, seed);
      fwd.assign(spec.copies, rc);
    }
    const RealizedCircuit composed = compose_arrangement(fwd, spec, mirrors);
    rows.push_back({spec.style, spec.copies, identity_deviation(composed.unitary())});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const AmplificationRow& a, const AmplificationRow& b) {
                     return a.copies < b.copies;
                   });
  return rows;
}

inline const char* style_name(ArrangementStyle s) {
  switch (s) {
    case ArrangementStyle::kMirrorsAtBack: return "mirrors_at_back";
    case ArrangementStyle::kAlternating: return "alternating";
    case ArrangementStyle::kEvenSelfAdjoint: return "even_self_adjoint";
    case ArrangementStyle::kExplicitPermutation: return "permutation";
  }
  return "?";
}

inline std::string amplification_to_csv(std::span<const AmplificationRow> rows) {
  std::ostringstream os;
  os << "arrangement,copies,identity_deviation\n";
  os.precision(17);
  for (const auto& r : rows)
    os << style_name(r.style) << ',' << r.copies << ',' << r.identity_deviation << '\n';
  return os.str();
}

}  // namespace qmesh
