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
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qmesh/error_model.hpp"
#include "qmesh/optim.hpp"
#include "qmesh/simulator.hpp"

namespace qmesh {

/// One fittable parameter: an angle of a specific gate position.
struct ParamRef {
  enum class Which { kTheta, kPhi, kPhase };
  std::size_t gate = 0;
  Which which = Which::kTheta;
  std::size_t phase_index = 0;  // used when which == kPhase
};

/// One observed experiment: counts for a prepared input sent through either
/// the bare device or an arrangement of copies (shared errors, mirrors
/// anti-correlated -- the configuration the fit is meant to diagnose).
struct CalibrationDataset {
  StateVector input;
  std::optional<ArrangementSpec> arrangement;
  CountsTable counts;
};

struct CalibrationProblem {
  CircuitPlan nominal;
  std::vector<CalibrationDataset> datasets;
  std::vector<ParamRef> free_parameters;
  std::vector<std::pair<double, double>> bounds;  // per-parameter offset range, radians
  /// Loss/detection context of the forward model. Jitter fields are ignored:
  /// the fit estimates systematic offsets only.
  ErrorModel base_model;

  void validate() const {
    if (free_parameters.size() != bounds.size())
      throw std::invalid_argument("CalibrationProblem: bounds size != parameter count");
    for (const auto& p : free_parameters) {
      if (p.gate >= nominal.gates.size())
        throw std::invalid_argument("CalibrationProblem: parameter gate out of range");
      const bool is_bs = std::holds_alternative<BeamSplitter>(nominal.gates[p.gate]);
      if (p.which == ParamRef::Which::kPhase) {
        if (is_bs)
          throw std::invalid_argument("CalibrationProblem: phase-index parameter on a splitter");
        if (p.phase_index >= nominal.modes)
          throw std::invalid_argument("CalibrationProblem: phase index out of range");
      } else if (!is_bs) {
        throw std::invalid_argument("CalibrationProblem: theta/phi parameter on a diagonal");
      }
    }
    for (const auto& d : datasets) {
      if (d.counts.mode_counts.size() != nominal.modes)
        throw std::invalid_argument("CalibrationProblem: dataset mode count != nominal modes");
      if (d.input.size() != nominal.modes)
        throw std::invalid_argument("CalibrationProblem: dataset input dimension != modes");
    }
  }
};

struct CalibrationResult {
  std::vector<ParamRef> parameters;
  std::vector<double> estimates;  // offsets from nominal, radians
  double objective_value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> confidence_half_width;  // 1.96 sigma from local curvature
  std::vector<bool> unbounded;                // flat directions the data cannot determine
  double probability_floor = 1e-12;
  double curvature_floor = 1e-8;
};

inline CircuitPlan apply_offsets(const CircuitPlan& nominal, std::span<const ParamRef> params,
                                 std::span<const double> values) {
  if (params.size() != values.size())
    throw std::invalid_argument("apply_offsets: parameter/value count mismatch");
  CircuitPlan plan = nominal;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (p.gate >= plan.gates.size())
      throw std::invalid_argument("apply_offsets: gate index out of range");
    if (auto* bs = std::get_if<BeamSplitter>(&plan.gates[p.gate])) {
      if (p.which == ParamRef::Which::kTheta)
        bs->theta += values[i];
      else if (p.which == ParamRef::Which::kPhi)
        bs->phi += values[i];
      else
        throw std::invalid_argument("apply_offsets: phase parameter on a splitter");
    } else {
      auto& pd = std::get<PhaseDiagonal>(plan.gates[p.gate]);
      if (p.which != ParamRef::Which::kPhase)
        throw std::invalid_argument("apply_offsets: theta/phi parameter on a diagonal");
      pd.phases.at(p.phase_index) += values[i];
    }
  }
  return plan;
}

namespace detail {

inline RealizedCircuit candidate_circuit(const CalibrationProblem& problem,
                                         std::span<const double> values) {
  RealizedCircuit rc;
  rc.plan = apply_offsets(problem.nominal, problem.free_parameters, values);
  rc.survival = problem.base_model.transmission;
  rc.detector_efficiency =
      broadcast_efficiency(problem.base_model.detector_efficiency, problem.nominal.modes);
  rc.herald_efficiency = problem.base_model.herald_efficiency;
  return rc;
}

inline OutcomeProbs dataset_probs(const CalibrationProblem& problem,
                                  const CalibrationDataset& ds, const RealizedCircuit& rc) {
  if (!ds.arrangement) return outcome_probs(rc, ds.input);
  const std::vector<RealizedCircuit> copies(ds.arrangement->copies, rc);
  return outcome_probs(compose_arrangement(copies, *ds.arrangement), ds.input);
}

}  // namespace detail

/// Multinomial negative log-likelihood of every dataset's counts under the
/// forward model at the candidate offsets. The loss bucket is one of the
/// categories. Model probabilities are floored at 1e-12 so boundary
/// parameters stay finite.
inline double negative_log_likelihood(const CalibrationProblem& problem,
                                      std::span<const double> candidate,
                                      double probability_floor = 1e-12) {
  problem.validate();
  const RealizedCircuit rc = detail::candidate_circuit(problem, candidate);
  double nll = 0.0;
  for (const auto& ds : problem.datasets) {
    const OutcomeProbs p = detail::dataset_probs(problem, ds, rc);
    for (std::size_t k = 0; k < ds.counts.mode_counts.size(); ++k)
      if (ds.counts.mode_counts[k] > 0)
        nll -= static_cast<double>(ds.counts.mode_counts[k]) *
               std::log(std::max(p.per_mode[k], probability_floor));
    if (ds.counts.loss_count > 0)
      nll -= static_cast<double>(ds.counts.loss_count) *
             std::log(std::max(p.loss, probability_floor));
  }
  return nll;
}

namespace detail {

// Gauss-Jordan inverse for the (small) curvature matrix. Returns false on a
// vanishing pivot, which callers treat as a flat direction.
inline bool invert_inplace(std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) return false;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double m = a[r][col];
      if (m == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] -= m * a[col][c];
        inv[r][c] -= m * inv[col][c];
      }
    }
  }
  a = std::move(inv);
  return true;
}

}  // namespace detail

/// Maximum-likelihood fit of the systematic offsets by multi-start
/// Nelder-Mead: one start at the nominal (zero offsets) plus seeded
/// bound-scaled starts. Deterministic in (problem, seed); ties between
/// starts break on start index. Confidence half-widths come from the
/// finite-difference curvature at the optimum; directions with curvature
/// below the floor are flagged unbounded rather than silently regularized.
inline CalibrationResult fit_systematic(const CalibrationProblem& problem, std::uint64_t seed,
                                        std::size_t n_starts = 4) {
  problem.validate();
  if (problem.datasets.empty())
    throw std::invalid_argument("fit_systematic: need at least one dataset");
  const std::size_t dim = problem.free_parameters.size();
  if (dim == 0) throw std::invalid_argument("fit_systematic: need at least one free parameter");

  CalibrationResult result;
  result.parameters = problem.free_parameters;

  auto objective = [&](const std::vector<double>& x) {
    return negative_log_likelihood(problem, x, result.probability_floor);
  };

  std::vector<double> step(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double range = problem.bounds[i].second - problem.bounds[i].first;
    if (range <= 0.0) throw std::invalid_argument("fit_systematic: empty bound interval");
    step[i] = std::min(0.05, range / 4.0);
  }

  Rng rng(seed);
  NelderMeadResult best;
  best.fval = std::numeric_limits<double>::infinity();
  bool have_best = false;
  std::size_t total_iters = 0;
  for (std::size_t s = 0; s < n_starts; ++s) {
    std::vector<double> x0(dim, 0.0);
    if (s > 0) {
      for (std::size_t i = 0; i < dim; ++i) {
        const double centre = 0.5 * (problem.bounds[i].first + problem.bounds[i].second);
        const double half = 0.5 * (problem.bounds[i].second - problem.bounds[i].first);
        x0[i] = centre + (2.0 * rng.uniform() - 1.0) * 0.5 * half;
      }
    }
    NelderMeadOptions opts;
    const NelderMeadResult run = nelder_mead(objective, x0, step, problem.bounds, opts);
    total_iters += run.iterations;
    if (!have_best || run.fval < best.fval) {
      best = run;
      have_best = true;
    }
  }

  result.estimates = best.x;
  result.objective_value = best.fval;
  result.iterations = total_iters;
  result.converged = best.converged;

  // Curvature via central differences; h well above the simplex tolerance.
  const double h = 1e-4;
  const double f0 = objective(best.x);
  std::vector<std::vector<double>> hess(dim, std::vector<double>(dim, 0.0));
  auto shifted = [&](std::size_t i, double di, std::size_t j, double dj) {
    std::vector<double> x = best.x;
    x[i] += di;
    if (i == j)
      x[i] += dj;
    else
      x[j] += dj;
    return objective(x);
  };
  for (std::size_t i = 0; i < dim; ++i)
    hess[i][i] = (shifted(i, h, i, 0.0) - 2.0 * f0 + shifted(i, -h, i, 0.0)) / (h * h);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double v = (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) +
                        shifted(i, -h, j, -h)) /
                       (4.0 * h * h);
      hess[i][j] = hess[j][i] = v;
    }

  result.unbounded.assign(dim, false);
  result.confidence_half_width.assign(dim, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < dim; ++i) {
    if (hess[i][i] < result.curvature_floor)
      result.unbounded[i] = true;
    else
      live.push_back(i);
  }
  if (!live.empty()) {
    std::vector<std::vector<double>> sub(live.size(), std::vector<double>(live.size()));
    for (std::size_t a = 0; a < live.size(); ++a)
      for (std::size_t b = 0; b < live.size(); ++b) sub[a][b] = hess[live[a]][live[b]];
    if (detail::invert_inplace(sub)) {
      for (std::size_t a = 0; a < live.size(); ++a) {
        const double var = sub[a][a];
        if (var > 0.0 && std::isfinite(var))
          result.confidence_half_width[live[a]] = 1.96 * std::sqrt(var);
        else
          result.unbounded[live[a]] = true;
      }
    } else {
      for (std::size_t a : live) result.unbounded[a] = true;
    }
  }
  return result;
}

/// The nominal plan with every fitted offset subtracted: the design to
/// fabricate so the realized device lands back on the nominal target.
inline CircuitPlan corrected_plan(const CircuitPlan& nominal, const CalibrationResult& result) {
  if (!result.converged)
    throw std::logic_error("corrected_plan: fit did not converge; refusing to emit a plan");
  std::vector<double> negated;
  negated.reserve(result.estimates.size());
  for (double e : result.estimates) negated.push_back(-e);
  return apply_offsets(nominal, result.parameters, negated);
}

}  // namespace qmesh
