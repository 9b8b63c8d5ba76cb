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
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qmesh {

struct NelderMeadOptions {
  double diameter_tol = 1e-6;   // max vertex distance to the best vertex
  std::size_t max_iterations = 20000;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fval = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Box-constrained Nelder-Mead simplex minimizer for small, cheap
/// objectives. Candidate points are clamped into the box before evaluation.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, const std::vector<double>& step,
                                    const std::vector<std::pair<double, double>>& bounds,
                                    const NelderMeadOptions& opts = {}) {
  const std::size_t dim = x0.size();
  if (dim == 0) throw std::invalid_argument("nelder_mead: empty parameter vector");
  if (step.size() != dim || bounds.size() != dim)
    throw std::invalid_argument("nelder_mead: step/bounds size mismatch");

  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < dim; ++i)
      x[i] = std::clamp(x[i], bounds[i].first, bounds[i].second);
  };

  clamp(x0);
  std::vector<std::vector<double>> verts(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) {
    verts[i + 1][i] += step[i];
    clamp(verts[i + 1]);
    // A clamped vertex can collide with x0 at the upper bound; flip it.
    if (verts[i + 1][i] == x0[i]) {
      verts[i + 1][i] -= step[i];
      clamp(verts[i + 1]);
    }
  }
  std::vector<double> fv(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) fv[i] = f(verts[i]);

  NelderMeadResult res;
  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    std::vector<std::size_t> idx(dim + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> v2(dim + 1);
      std::vector<double> f2(dim + 1);
      for (std::size_t i = 0; i <= dim; ++i) {
        v2[i] = verts[idx[i]];
        f2[i] = fv[idx[i]];
      }
      verts.swap(v2);
      fv.swap(f2);
    }

    double diameter = 0.0;
    for (std::size_t i = 1; i <= dim; ++i)
      for (std::size_t k = 0; k < dim; ++k)
        diameter = std::max(diameter, std::abs(verts[i][k] - verts[0][k]));
    if (diameter < opts.diameter_tol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += verts[i][k];
    }
    for (auto& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](const std::vector<double>& away, double coeff) {
      std::vector<double> p(dim);
      for (std::size_t k = 0; k < dim; ++k) p[k] = centroid[k] + coeff * (centroid[k] - away[k]);
      clamp(p);
      return p;
    };

    const std::vector<double> xr = blend(verts[dim], opts.reflection);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const std::vector<double> xe = blend(verts[dim], opts.reflection * opts.expansion);
      const double fe = f(xe);
      if (fe < fr) {
        verts[dim] = xe;
        fv[dim] = fe;
      } else {
        verts[dim] = xr;
        fv[dim] = fr;
      }
    } else if (fr < fv[dim - 1]) {
      verts[dim] = xr;
      fv[dim] = fr;
    } else {
      const bool outside = fr < fv[dim];
      const std::vector<double> xc =
          outside ? blend(verts[dim], opts.reflection * opts.contraction)
                  : blend(verts[dim], -opts.contraction);
      const double fc = f(xc);
      if (fc < (outside ? fr : fv[dim])) {
        verts[dim] = xc;
        fv[dim] = fc;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          for (std::size_t k = 0; k < dim; ++k)
            verts[i][k] = verts[0][k] + opts.shrink * (verts[i][k] - verts[0][k]);
          clamp(verts[i]);
          fv[i] = f(verts[i]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= dim; ++i)
    if (fv[i] < fv[best]) best = i;
  res.x = verts[best];
  res.fval = fv[best];
  return res;
}

}  // namespace qmesh
