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

#include <cstdint>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

namespace qmesh {

/// Upper tail P(X >= stat) for a chi-squared variable with dof degrees.
inline double chi_squared_pvalue(double stat, unsigned dof) {
  if (dof == 0) throw std::invalid_argument("chi_squared_pvalue: dof must be >= 1");
  if (stat <= 0.0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Upper tail P(X >= k) for X ~ Binomial(n, p).
inline double binomial_upper_pvalue(std::uint64_t k, std::uint64_t n, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial_upper_pvalue: p not in [0,1]");
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  boost::math::binomial dist(static_cast<double>(n), p);
  return boost::math::cdf(boost::math::complement(dist, static_cast<double>(k) - 1.0));
}

}  // namespace qmesh
