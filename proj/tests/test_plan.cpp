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

#include <numbers>

#include "qmesh/circuit_plan.hpp"
#include "qmesh/io.hpp"
#include "qmesh/rng.hpp"

using namespace qmesh;
using std::numbers::pi;

namespace {

CircuitPlan random_plan(Rng& rng, std::size_t modes, std::size_t n_gates) {
  CircuitPlan plan;
  plan.modes = modes;
  for (std::size_t i = 0; i < n_gates; ++i) {
    if (rng.uniform() < 0.75) {
      BeamSplitter bs;
      bs.mode = static_cast<std::size_t>(rng.uniform() * static_cast<double>(modes - 1));
      bs.theta = (rng.uniform() - 0.5) * 2 * pi;
      bs.phi = (rng.uniform() - 0.5) * 2 * pi;
      plan.gates.push_back(bs);
    } else {
      PhaseDiagonal pd;
      for (std::size_t k = 0; k < modes; ++k)
        pd.phases.push_back((rng.uniform() - 0.5) * 2 * pi);
      plan.gates.push_back(pd);
    }
  }
  return plan;
}

}  // namespace

TEST_CASE("reconstruct of the empty plan is the identity", "[plan]") {
  CircuitPlan plan;
  plan.modes = 3;
  CHECK(frobenius_distance(reconstruct(plan), ComplexMatrix::identity(3)) == 0.0);
}

TEST_CASE("single-gate plan reconstructs to its block", "[plan]") {
  CircuitPlan plan;
  plan.modes = 2;
  plan.gates = {BeamSplitter{0, 0.8, -0.4}};
  CHECK(frobenius_distance(reconstruct(plan), t_block(0.8, -0.4)) < kMatrixTol);
}

TEST_CASE("application order puts the last gate leftmost", "[plan]") {
  CircuitPlan plan;
  plan.modes = 3;
  plan.gates = {BeamSplitter{0, 0.3, 0.1}, BeamSplitter{1, 0.7, -0.9}};
  const ComplexMatrix expect = embed_t(3, 1, 0.7, -0.9) * embed_t(3, 0, 0.3, 0.1);
  CHECK(frobenius_distance(reconstruct(plan), expect) < kMatrixTol);
}

TEST_CASE("plan validation", "[plan]") {
  CircuitPlan plan;
  plan.modes = 3;
  plan.gates = {BeamSplitter{2, 0.1, 0.1}};  // couples modes 2,3 but n=3
  CHECK_THROWS_AS(validate(plan), std::invalid_argument);

  plan.gates = {PhaseDiagonal{{0.0, 0.0}}};
  CHECK_THROWS_AS(validate(plan), std::invalid_argument);
}

TEST_CASE("invert_plan on phase diagonals negates phases", "[plan]") {
  CircuitPlan plan;
  plan.modes = 2;
  plan.gates = {PhaseDiagonal{{0.0, 1.3}}};
  const CircuitPlan inv = invert_plan(plan);
  REQUIRE(inv.gates.size() == 1);
  const auto& pd = std::get<PhaseDiagonal>(inv.gates[0]);
  CHECK(pd.phases[0] == 0.0);
  CHECK(pd.phases[1] == -1.3);
}

TEST_CASE("invert_plan of the empty plan is empty", "[plan]") {
  CircuitPlan plan;
  plan.modes = 4;
  CHECK(invert_plan(plan).gates.empty());
}

TEST_CASE("invert_plan reconstructs the adjoint", "[plan]") {
  Rng rng(41);
  for (int i = 0; i < 40; ++i) {
    const std::size_t modes = 2 + static_cast<std::size_t>(rng.uniform() * 4);
    const CircuitPlan plan = random_plan(rng, modes, 1 + i % 7);
    const ComplexMatrix fwd = reconstruct(plan);
    const CircuitPlan inv = invert_plan(plan);
    CHECK(frobenius_distance(reconstruct(inv), dagger(fwd)) < 1e-10);
    // and the product undoes the evolution
    CHECK(frobenius_distance(reconstruct(concat(plan, inv)), ComplexMatrix::identity(modes)) <
          1e-10);
  }
}

TEST_CASE("plan files round-trip bit-exactly", "[plan]") {
  Rng rng(99);
  const CircuitPlan plan = random_plan(rng, 3, 6);
  const CircuitPlan back = plan_from_string(plan_to_string(plan));
  REQUIRE(back.gates.size() == plan.gates.size());
  CHECK(back.modes == plan.modes);
  for (std::size_t i = 0; i < plan.gates.size(); ++i) {
    if (const auto* bs = std::get_if<BeamSplitter>(&plan.gates[i])) {
      const auto& b = std::get<BeamSplitter>(back.gates[i]);
      CHECK(b.mode == bs->mode);
      CHECK(b.theta == bs->theta);  // exact: doubles survive the text form
      CHECK(b.phi == bs->phi);
    } else {
      const auto& pd = std::get<PhaseDiagonal>(plan.gates[i]);
      const auto& b = std::get<PhaseDiagonal>(back.gates[i]);
      CHECK(b.phases == pd.phases);
    }
  }
}

TEST_CASE("plan file uses 1-based splitter indices", "[plan]") {
  CircuitPlan plan;
  plan.modes = 3;
  plan.gates = {BeamSplitter{1, 0.5, 0.25}};
  const json j = plan_to_json(plan);
  CHECK(j["gates"][0]["j"] == 2);
  CHECK(plan_from_json(j).gates.size() == 1);
  CHECK(std::get<BeamSplitter>(plan_from_json(j).gates[0]).mode == 1);
}

TEST_CASE("malformed plan files are rejected", "[plan]") {
  CHECK_THROWS_AS(plan_from_string("not json"), DataError);
  CHECK_THROWS_AS(plan_from_string(R"({"n":3,"gates":[{"kind":"??"}]})"), DataError);
  CHECK_THROWS_AS(plan_from_string(R"({"n":3,"gates":[{"kind":"bs","j":0,"theta":0,"phi":0}]})"),
                  DataError);
  CHECK_THROWS_AS(plan_from_string(R"({"n":3,"gates":[{"kind":"bs","j":3,"theta":0,"phi":0}]})"),
                  DataError);
}
