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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "qmesh/complex_matrix.hpp"
#include "qmesh/rng.hpp"

using namespace qmesh;
using std::numbers::pi;

namespace {

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

}  // namespace

TEST_CASE("t_block basic values", "[matrix]") {
  const ComplexMatrix id = t_block(0.0, 0.0);
  CHECK(std::abs(id(0, 0) - 1.0) < kMatrixTol);
  CHECK(std::abs(id(0, 1)) < kMatrixTol);
  CHECK(std::abs(id(1, 0)) < kMatrixTol);
  CHECK(std::abs(id(1, 1) - 1.0) < kMatrixTol);

  const ComplexMatrix cross = t_block(pi / 2, 0.0);
  CHECK(std::abs(cross(0, 0)) < kMatrixTol);
  CHECK(std::abs(cross(0, 1) - cdouble(0, 1)) < kMatrixTol);
  CHECK(std::abs(cross(1, 0) - cdouble(0, 1)) < kMatrixTol);
  CHECK(std::abs(cross(1, 1)) < kMatrixTol);

  // Inner block of the first splitter of the reference device.
  const double s23 = std::sqrt(2.0 / 3.0), s13 = std::sqrt(1.0 / 3.0);
  const ComplexMatrix b = t_block(std::acos(s23), -pi / 2);
  CHECK(std::abs(b(0, 0) - s23) < kMatrixTol);
  CHECK(std::abs(b(0, 1) - s13) < kMatrixTol);
  CHECK(std::abs(b(1, 0) - cdouble(0, s13)) < kMatrixTol);
  CHECK(std::abs(b(1, 1) - cdouble(0, -s23)) < kMatrixTol);
}

TEST_CASE("t_block rejects non-finite input", "[matrix]") {
  CHECK_THROWS_AS(t_block(std::numeric_limits<double>::quiet_NaN(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(t_block(0.0, std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("t_block is unitary and satisfies the adjoint split", "[matrix]") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const double th = (rng.uniform() - 0.5) * 4 * pi;
    const double ph = (rng.uniform() - 0.5) * 4 * pi;
    const ComplexMatrix t = t_block(th, ph);
    CHECK(unitarity_deviation(t) < 1e-12);
    // T(theta,phi)^dag = T(0,-phi) T(-theta,0)
    const ComplexMatrix lhs = dagger(t);
    const ComplexMatrix rhs = t_block(0, -ph) * t_block(-th, 0);
    CHECK(frobenius_distance(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("embed_t places the block and keeps unitarity", "[matrix]") {
  const ComplexMatrix m = embed_t(3, 0, 0.7, 0.3);
  const ComplexMatrix t = t_block(0.7, 0.3);
  CHECK(std::abs(m(0, 0) - t(0, 0)) < kMatrixTol);
  CHECK(std::abs(m(1, 1) - t(1, 1)) < kMatrixTol);
  CHECK(std::abs(m(2, 2) - 1.0) < kMatrixTol);
  CHECK(std::abs(m(2, 0)) < kMatrixTol);
  CHECK(std::abs(m(0, 2)) < kMatrixTol);

  CHECK(frobenius_distance(embed_t(3, 1, 0, 0), ComplexMatrix::identity(3)) < kMatrixTol);

  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const double th = (rng.uniform() - 0.5) * 4 * pi;
    const double ph = (rng.uniform() - 0.5) * 4 * pi;
    CHECK(unitarity_deviation(embed_t(4, 1, th, ph)) < 1e-12);
  }
}

TEST_CASE("embed_t rejects out-of-range mode", "[matrix]") {
  CHECK_THROWS_AS(embed_t(3, 2, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(embed_t(1, 0, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("spin1_observable special points", "[matrix]") {
  const ComplexMatrix sz = spin1_observable(0, 0);
  CHECK(std::abs(sz(0, 0) - 1.0) < kMatrixTol);
  CHECK(std::abs(sz(1, 1)) < kMatrixTol);
  CHECK(std::abs(sz(2, 2) + 1.0) < kMatrixTol);
  CHECK(std::abs(sz(0, 1)) < kMatrixTol);

  const ComplexMatrix sx = spin1_observable(pi / 2, 0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(sx(0, 0)) < kMatrixTol);
  CHECK(std::abs(sx(0, 1) - inv_sqrt2) < kMatrixTol);
  CHECK(std::abs(sx(1, 0) - inv_sqrt2) < kMatrixTol);
  CHECK(std::abs(sx(1, 2) - inv_sqrt2) < kMatrixTol);
  CHECK(std::abs(sx(2, 1) - inv_sqrt2) < kMatrixTol);
}

TEST_CASE("spin1_observable spectrum is {1, 0, -1}", "[matrix]") {
  // Independent oracle: Eigen's self-adjoint eigensolver.
  Rng rng(23);
  for (int i = 0; i < 25; ++i) {
    const double th = (rng.uniform() - 0.5) * 4 * pi;
    const double ph = (rng.uniform() - 0.5) * 4 * pi;
    const ComplexMatrix s = spin1_observable(th, ph);
    CHECK(frobenius_distance(s, dagger(s)) < 1e-12);  // Hermitian
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(s));
    REQUIRE(solver.info() == Eigen::Success);
    CHECK(std::abs(solver.eigenvalues()(0) + 1.0) < 1e-10);
    CHECK(std::abs(solver.eigenvalues()(1)) < 1e-10);
    CHECK(std::abs(solver.eigenvalues()(2) - 1.0) < 1e-10);
  }
}

TEST_CASE("multiply_chain and dagger", "[matrix]") {
  CHECK(frobenius_distance(multiply_chain({}, 3), ComplexMatrix::identity(3)) == 0.0);

  const ComplexMatrix m(2, 3, {1.0, cdouble(0, 2), 3.0, 4.0, 5.0, cdouble(1, -1)});
  CHECK(frobenius_distance(dagger(dagger(m)), m) == 0.0);

  const ComplexMatrix a = t_block(0.3, 0.4);
  const ComplexMatrix b = t_block(1.1, -0.2);
  const std::vector<ComplexMatrix> chain{a, b};
  CHECK(frobenius_distance(multiply_chain(chain, 2), a * b) == 0.0);

  const ComplexMatrix bad(3, 3);
  CHECK_THROWS_AS(m * m, std::invalid_argument);
  CHECK_THROWS_AS(bad - m, std::invalid_argument);
}

TEST_CASE("unitarity and identity deviations", "[matrix]") {
  const ComplexMatrix id3 = ComplexMatrix::identity(3);
  CHECK(unitarity_deviation(id3) == 0.0);
  CHECK(identity_deviation(id3) == 0.0);

  // Global phases are unobservable.
  const ComplexMatrix phased = id3 * std::polar(1.0, pi / 7);
  CHECK(unitarity_deviation(phased) < 1e-15);
  CHECK(identity_deviation(phased) < 1e-7);

  const ComplexMatrix shrunk = id3 * cdouble(0.9, 0.0);
  CHECK(std::abs(unitarity_deviation(shrunk) - std::sqrt(3.0) * 0.19) < 1e-12);
  CHECK(std::abs(identity_deviation(shrunk) - std::sqrt(3.0) * 0.1) < 1e-12);
}

TEST_CASE("identity_deviation is phase invariant", "[matrix]") {
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    ComplexMatrix m(3, 3);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c)
        m(r, c) = cdouble(rng.uniform() - 0.5, rng.uniform() - 0.5);
    const double base = identity_deviation(m);
    const double alpha = (rng.uniform() - 0.5) * 4 * pi;
    CHECK(identity_deviation(m * std::polar(1.0, alpha)) == Catch::Approx(base).margin(1e-12));
  }
}

TEST_CASE("state vectors", "[matrix]") {
  const StateVector e0 = StateVector::basis(3, 0);
  CHECK(e0.squared_norm() == 1.0);
  CHECK_THROWS_AS(StateVector::basis(3, 3), std::invalid_argument);

  const ComplexMatrix u = embed_t(3, 0, 0.9, 1.2);
  const StateVector out = apply(u, e0);
  CHECK(out.squared_norm() == Catch::Approx(1.0).margin(1e-12));
  CHECK(std::abs(inner_product(out, out).real() - 1.0) < 1e-12);
}
