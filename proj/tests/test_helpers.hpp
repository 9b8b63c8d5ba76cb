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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "qmesh/circuit_plan.hpp"
#include "qmesh/complex_matrix.hpp"
#include "qmesh/rng.hpp"

namespace qmesh::test {

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

inline ComplexMatrix from_eigen(const Eigen::MatrixXcd& e) {
  ComplexMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index r = 0; r < e.rows(); ++r)
    for (Eigen::Index c = 0; c < e.cols(); ++c)
      m(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = e(r, c);
  return m;
}

/// Haar-ish random unitary: QR of a complex Gaussian matrix with the R
/// diagonal phases normalized. Independent of the library's matrix path.
inline ComplexMatrix random_unitary(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXcd z(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          std::complex<double>(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const std::complex<double> d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return from_eigen(q);
}

/// Oracle-side reconstruction: multiplies out a plan's gates with Eigen,
/// sharing nothing with the library's reconstruct().
inline Eigen::MatrixXcd eigen_reconstruct(const CircuitPlan& plan) {
  const Eigen::Index n = static_cast<Eigen::Index>(plan.modes);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(n, n);
  for (const auto& g : plan.gates) {
    Eigen::MatrixXcd gm = Eigen::MatrixXcd::Identity(n, n);
    if (const auto* bs = std::get_if<BeamSplitter>(&g)) {
      const std::complex<double> i(0, 1);
      const double c = std::cos(bs->theta), s = std::sin(bs->theta);
      const std::complex<double> eip = std::exp(i * bs->phi);
      const Eigen::Index m = static_cast<Eigen::Index>(bs->mode);
      gm(m, m) = c;
      gm(m, m + 1) = i * eip * s;
      gm(m + 1, m) = i * s;
      gm(m + 1, m + 1) = eip * c;
    } else {
      const auto& pd = std::get<PhaseDiagonal>(g);
      for (Eigen::Index k = 0; k < n; ++k)
        gm(k, k) = std::polar(1.0, pd.phases[static_cast<std::size_t>(k)]);
    }
    acc = gm * acc;  // application order: last gate leftmost
  }
  return acc;
}

}  // namespace qmesh::test
