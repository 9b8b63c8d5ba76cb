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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qmesh/clements.hpp"
#include "qmesh/simulator.hpp"
#include "qmesh/stats.hpp"
#include "test_helpers.hpp"

using namespace qmesh;

namespace {

RealizedCircuit ideal_reference() {
  return perturb(sx_reference().plan_output_phases, ErrorModel{}, 1);
}

RealizedCircuit identity_circuit(std::size_t n, double survival = 1.0) {
  RealizedCircuit rc;
  rc.plan.modes = n;
  rc.survival = survival;
  rc.detector_efficiency.assign(n, 1.0);
  return rc;
}

}  // namespace

TEST_CASE("propagate through the ideal reference device", "[simulator]") {
  const StateVector out = propagate(ideal_reference(), StateVector::basis(3, 0));
  CHECK(std::abs(out.amplitudes[0] - 0.5) < 1e-10);
  CHECK(std::abs(out.amplitudes[1] - std::sqrt(2.0) / 2) < 1e-10);
  CHECK(std::abs(out.amplitudes[2] - 0.5) < 1e-10);
  CHECK(out.squared_norm() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("propagate input checking", "[simulator]") {
  CHECK_THROWS_AS(propagate(ideal_reference(), StateVector::basis(4, 0)), std::invalid_argument);
  StateVector unnorm;
  unnorm.amplitudes = {0.5, 0.0, 0.0};
  CHECK_THROWS_AS(propagate(ideal_reference(), unnorm), std::invalid_argument);
}

TEST_CASE("identity circuit leaves states alone", "[simulator]") {
  StateVector in;
  in.amplitudes = {cdouble(0.6, 0.0), cdouble(0.0, 0.8)};
  const StateVector out = propagate(identity_circuit(2), in);
  CHECK(std::abs(out.amplitudes[0] - in.amplitudes[0]) < 1e-15);
  CHECK(std::abs(out.amplitudes[1] - in.amplitudes[1]) < 1e-15);
}

TEST_CASE("lossless propagation preserves the norm", "[simulator]") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    RealizedCircuit rc;
    rc.plan = clements_decompose(test::random_unitary(4, 500 + s));
    rc.detector_efficiency.assign(4, 1.0);
    const StateVector out = propagate(rc, StateVector::basis(4, s % 4));
    CHECK(out.squared_norm() == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("outcome probabilities of the reference device", "[simulator]") {
  const OutcomeProbs p = outcome_probs(ideal_reference(), StateVector::basis(3, 0));
  CHECK(p.per_mode[0] == Catch::Approx(0.25).margin(1e-12));
  CHECK(p.per_mode[1] == Catch::Approx(0.5).margin(1e-12));
  CHECK(p.per_mode[2] == Catch::Approx(0.25).margin(1e-12));
  CHECK(p.loss == Catch::Approx(0.0).margin(1e-12));

  const OutcomeProbs q = outcome_probs(ideal_reference(), StateVector::basis(3, 1));
  CHECK(q.per_mode[0] == Catch::Approx(0.5).margin(1e-12));
  CHECK(q.per_mode[1] == Catch::Approx(0.0).margin(1e-12));
  CHECK(q.per_mode[2] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("scalar loss shows up as the loss bucket", "[simulator]") {
  RealizedCircuit rc = ideal_reference();
  rc.survival = 0.8;
  const OutcomeProbs p = outcome_probs(rc, StateVector::basis(3, 0));
  CHECK(p.loss == Catch::Approx(0.2).margin(1e-12));
}

TEST_CASE("probabilities always sum to one", "[simulator]") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    RealizedCircuit rc;
    rc.plan = clements_decompose(test::random_unitary(3, 900 + s));
    rc.survival = 0.5 + 0.5 * (s % 5) / 5.0;
    rc.detector_efficiency = {0.9, 0.7, 1.0};
    rc.herald_efficiency = 0.8;
    const OutcomeProbs p = outcome_probs(rc, StateVector::basis(3, s % 3));
    double total = p.loss;
    for (double v : p.per_mode) total += v;
    CHECK(total == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("zero trials give an all-zero table", "[simulator]") {
  const CountsTable c = sample_trials(ideal_reference(), StateVector::basis(3, 0), 0, 7);
  CHECK(c.trials == 0);
  CHECK(c.herald_count == 0);
  CHECK(c.detected_total() == 0);
  CHECK(c.loss_count == 0);
}

TEST_CASE("sampled frequencies match the model at a million trials", "[simulator]") {
  const std::uint64_t n = 1'000'000;
  const CountsTable c = sample_trials(ideal_reference(), StateVector::basis(3, 0), n, 424242);
  c.check();
  CHECK(c.herald_count == n);
  const double expected[3] = {0.25, 0.5, 0.25};
  for (int k = 0; k < 3; ++k) {
    const double freq = static_cast<double>(c.mode_counts[k]) / static_cast<double>(n);
    const double sigma = std::sqrt(expected[k] * (1 - expected[k]) / static_cast<double>(n));
    CHECK(std::abs(freq - expected[k]) <= 3 * sigma);
  }
}

TEST_CASE("heralding is a fair Bernoulli gate", "[simulator]") {
  RealizedCircuit rc = ideal_reference();
  rc.herald_efficiency = 0.5;
  const std::uint64_t n = 1'000'000;
  const CountsTable c = sample_trials(rc, StateVector::basis(3, 0), n, 5);
  const double freq = static_cast<double>(c.herald_count) / static_cast<double>(n);
  const double sigma = std::sqrt(0.25 / static_cast<double>(n));
  CHECK(std::abs(freq - 0.5) <= 3 * sigma);
}

TEST_CASE("sampling is deterministic in the seed", "[simulator]") {
  const CountsTable a = sample_trials(ideal_reference(), StateVector::basis(3, 0), 10000, 11);
  const CountsTable b = sample_trials(ideal_reference(), StateVector::basis(3, 0), 10000, 11);
  CHECK(a.mode_counts == b.mode_counts);
  CHECK(a.herald_count == b.herald_count);

  // Per-trial substreams: outcome i is independent of how many trials ran.
  const auto long_run = sample_outcomes(ideal_reference(), StateVector::basis(3, 0), 100, 11);
  const auto short_run = sample_outcomes(ideal_reference(), StateVector::basis(3, 0), 10, 11);
  for (std::size_t i = 0; i < short_run.size(); ++i)
    CHECK(short_run[i].detected_mode == long_run[i].detected_mode);
}

TEST_CASE("empirical chi-square stays under the far tail", "[simulator]") {
  // 0.999 quantile of chi-squared with 2 dof.
  const double threshold = 13.8155;
  int exceed = 0;
  const RealizedCircuit rc = ideal_reference();
  const StateVector in = StateVector::basis(3, 0);
  const double expected[3] = {0.25, 0.5, 0.25};
  const std::uint64_t n = 1'000'000;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const CountsTable c = sample_trials(rc, in, n, 7000 + rep);
    double stat = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double e = static_cast<double>(n) * expected[k];
      const double d = static_cast<double>(c.mode_counts[k]) - e;
      stat += d * d / e;
    }
    if (stat > threshold) ++exceed;
  }
  CHECK(exceed < 1);
}

TEST_CASE("interference visibility diagnostics", "[simulator]") {
  StateVector in;
  in.amplitudes = {1.0, 0.0, 0.0};

  CHECK(interference_visibility(identity_circuit(3), in).raw_overlap ==
        Catch::Approx(1.0).margin(1e-12));

  RealizedCircuit phased = identity_circuit(3);
  phased.plan.gates = {PhaseDiagonal{{0.4, 0.4, 0.4}}};
  CHECK(interference_visibility(phased, in).raw_overlap == Catch::Approx(1.0).margin(1e-12));

  // 10% amplitude loss: raw overlap 0.9, contrast 1.8/1.81.
  const Visibility v = interference_visibility(identity_circuit(3, 0.81), in);
  CHECK(v.raw_overlap == Catch::Approx(0.9).margin(1e-12));
  CHECK(v.normalized_contrast == Catch::Approx(1.8 / 1.81).margin(1e-12));
}

TEST_CASE("counts tables round-trip through CSV", "[simulator]") {
  CountsTable c;
  c.trials = 1000;
  c.herald_count = 900;
  c.mode_counts = {200, 500, 150};
  c.loss_count = 50;
  const CountsTable back = counts_from_csv(counts_to_csv(c));
  CHECK(back.trials == c.trials);
  CHECK(back.herald_count == c.herald_count);
  CHECK(back.mode_counts == c.mode_counts);
  CHECK(back.loss_count == c.loss_count);

  CHECK_THROWS_AS(counts_from_csv("trial_total,herald,mode_0,lost\n10,20,5,1\n"), DataError);
  CHECK_THROWS_AS(counts_from_csv("garbage"), DataError);
}
