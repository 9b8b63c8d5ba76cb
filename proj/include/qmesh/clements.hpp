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
#include <cstddef>
#include <numbers>
#include <vector>

#include "qmesh/circuit_plan.hpp"
#include "qmesh/complex_matrix.hpp"

namespace qmesh {

namespace detail {

// Nulling targets with modulus below this are treated as already zero and
// produce no gate; atan2/arg on exact zeros would otherwise emit noise.
inline constexpr double kNullTol = 1e-14;

struct NullingGate {
  std::size_t mode;
  double theta;
  double phi;
};

inline double wrap_angle(double a) {
  // remainder() maps into (-pi, pi]; keep gate files tidy.
  double w = std::remainder(a, 2.0 * std::numbers::pi);
  return w == -0.0 ? 0.0 : w;
}

}  // namespace detail

/// Rectangular-mesh decomposition: factors a unitary U into at most
/// N(N-1)/2 adjacent-mode beam splitter blocks followed by one output
/// phase layer, so that reconstruct(plan) == U.
///
/// Elimination alternates between right-multiplications by inverse blocks
/// (zeroing from the bottom-left along odd anti-diagonals, acting on column
/// pairs) and left-multiplications (even anti-diagonals, acting on row
/// pairs). What remains is diagonal; the left factors are then commuted
/// through that diagonal using
///   T(theta,phi)^dag diag(e^{ia}, e^{ib}) = diag(e^{ia}, e^{i(a-phi)}) T(-theta, b-a)
/// on the affected mode pair, leaving a single diagonal at the output side.
inline CircuitPlan clements_decompose(const ComplexMatrix& u) {
  if (!u.square()) throw std::invalid_argument("clements_decompose: matrix not square");
  const double udev = unitarity_deviation(u);
  if (udev > 1e-8)
    throw NonUnitaryError("clements_decompose: input is not unitary (deviation " +
                              std::to_string(udev) + ")",
                          udev);
  const std::size_t n = u.rows();

  ComplexMatrix work = u;
  std::vector<detail::NullingGate> right;  // order applied, innermost first
  std::vector<detail::NullingGate> left;   // order applied, outermost last

  auto apply_right = [&](std::size_t m, double th, double ph) {
    // work <- work * T(th, ph)^dag, touching columns m and m+1
    const ComplexMatrix t = t_block(th, ph);
    const cdouble d00 = std::conj(t(0, 0)), d01 = std::conj(t(1, 0));
    const cdouble d10 = std::conj(t(0, 1)), d11 = std::conj(t(1, 1));
    for (std::size_t r = 0; r < n; ++r) {
      const cdouble a = work(r, m), b = work(r, m + 1);
      work(r, m) = a * d00 + b * d10;
      work(r, m + 1) = a * d01 + b * d11;
    }
  };
  auto apply_left = [&](std::size_t m, double th, double ph) {
    // work <- T(th, ph) * work, touching rows m and m+1
    const ComplexMatrix t = t_block(th, ph);
    for (std::size_t c = 0; c < n; ++c) {
      const cdouble a = work(m, c), b = work(m + 1, c);
      work(m, c) = t(0, 0) * a + t(0, 1) * b;
      work(m + 1, c) = t(1, 0) * a + t(1, 1) * b;
    }
  };

  for (std::size_t diag = 1; diag < n; ++diag) {
    if (diag % 2 == 1) {
      for (std::size_t j = 0; j < diag; ++j) {
        // Null work[n-1-j][diag-1-j] with columns (m, m+1), m = diag-1-j.
        const std::size_t m = diag - 1 - j;
        const std::size_t r = n - 1 - j;
        const cdouble a = work(r, m), b = work(r, m + 1);
        if (std::abs(a) < detail::kNullTol) continue;
        const double th = std::atan2(std::abs(a), std::abs(b));
        const double bphase = std::abs(b) > 0.0 ? std::arg(b) : 0.0;
        const double ph = detail::wrap_angle(std::numbers::pi / 2 - std::arg(a) + bphase);
        apply_right(m, th, ph);
        right.push_back({m, th, ph});
      }
    } else {
      for (std::size_t j = 1; j <= diag; ++j) {
        // Null work[n+j-diag-1][j-1] with rows (m, m+1), m = n+j-diag-2.
        const std::size_t m = n + j - diag - 2;
        const std::size_t c = j - 1;
        const cdouble a = work(m + 1, c), b = work(m, c);
        if (std::abs(a) < detail::kNullTol) continue;
        const double th = std::atan2(std::abs(a), std::abs(b));
        const double bphase = std::abs(b) > 0.0 ? std::arg(b) : 0.0;
        const double ph = detail::wrap_angle(-std::numbers::pi / 2 + bphase - std::arg(a));
        apply_left(m, th, ph);
        left.push_back({m, th, ph});
      }
    }
  }

  // work is now diagonal with unit-modulus entries.
  std::vector<double> phases(n);
  for (std::size_t i = 0; i < n; ++i) phases[i] = std::arg(work(i, i));

  // Commute the diagonal through the accumulated left factors. The factor
  // applied last sits innermost next to the diagonal, so process in reverse.
  std::vector<detail::NullingGate> pushed;  // matrix order, leftmost first
  for (auto it = left.rbegin(); it != left.rend(); ++it) {
    const double a = phases[it->mode], b = phases[it->mode + 1];
    pushed.insert(pushed.begin(), {it->mode, -it->theta, detail::wrap_angle(b - a)});
    phases[it->mode + 1] = detail::wrap_angle(a - it->phi);
  }

  // Matrix order is D * pushed... * right(last)...right(first); application
  // order reverses that.
  CircuitPlan plan;
  plan.modes = n;
  for (const auto& g : right) plan.gates.push_back(BeamSplitter{g.mode, g.theta, g.phi});
  for (auto it = pushed.rbegin(); it != pushed.rend(); ++it)
    plan.gates.push_back(BeamSplitter{it->mode, it->theta, it->phi});
  plan.gates.push_back(PhaseDiagonal{std::move(phases)});
  return plan;
}

/// The canonical 3-mode reference device: the unitary that rotates the
/// S_x eigenbasis onto the detector basis, together with its two textbook
/// mesh factorizations. Both plans reconstruct the same (real, symmetric,
/// involutive) matrix:
///
///       1  [ 1   sqrt2   1    ]
///  U =  -  [ sqrt2  0  -sqrt2 ]
///       2  [ 1  -sqrt2   1    ]
struct SxReference {
  ComplexMatrix matrix;
  /// B^{-1} . B . D . B shape: the phase layer sits between the splitters.
  CircuitPlan plan_inner_phases;
  /// D' . B' . B . B shape: one trailing phase layer at the output.
  CircuitPlan plan_output_phases;
};

inline SxReference sx_reference() {
  using std::numbers::pi;
  const double s2 = std::sqrt(2.0);
  const double theta1 = std::acos(std::sqrt(2.0 / 3.0));

  SxReference ref;
  ref.matrix = ComplexMatrix(3, 3,
                             {0.5, s2 / 2, 0.5,
                              s2 / 2, 0.0, -s2 / 2,
                              0.5, -s2 / 2, 0.5});

  // Application order; see CircuitPlan ordering convention.
  ref.plan_inner_phases.modes = 3;
  ref.plan_inner_phases.gates = {
      BeamSplitter{0, theta1, -pi / 2},
      PhaseDiagonal{{0.0, pi, pi}},
      BeamSplitter{1, pi / 3, pi},
      BeamSplitter{0, -theta1, 0.0},   // together with the next gate this is
      BeamSplitter{0, 0.0, pi / 2},    // the adjoint of the first splitter
  };

  ref.plan_output_phases.modes = 3;
  ref.plan_output_phases.gates = {
      BeamSplitter{0, theta1, -pi / 2},
      BeamSplitter{1, pi / 3, pi},
      BeamSplitter{0, -theta1, pi},
      PhaseDiagonal{{0.0, pi / 2, pi}},
  };
  return ref;
}

}  // namespace qmesh
