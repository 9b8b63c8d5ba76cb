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
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmesh/errors.hpp"

namespace qmesh {

using cdouble = std::complex<double>;

/// Absolute tolerance used for "equals" assertions on matrices built from
/// closed-form constants. Perturbed-circuit checks pass their own tolerance.
inline constexpr double kMatrixTol = 1e-10;

/// Small dense row-major complex matrix. Meshes are small (N <= 64), so
/// there is no sparse path and no attempt at cache blocking.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("ComplexMatrix: dimensions must be >= 1");
  }

  /// Row-major construction from a flat list.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<cdouble> vals)
      : ComplexMatrix(rows, cols) {
    if (vals.size() != entries_.size())
      throw std::invalid_argument("ComplexMatrix: entry count does not match shape");
    std::size_t i = 0;
    for (const auto& v : vals) entries_[i++] = v;
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal_phases(std::span<const double> phases) {
    ComplexMatrix m(phases.size(), phases.size());
    for (std::size_t i = 0; i < phases.size(); ++i)
      m(i, i) = std::polar(1.0, phases[i]);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  cdouble& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const cdouble& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const cdouble> entries() const noexcept { return entries_; }

  ComplexMatrix operator*(const ComplexMatrix& rhs) const {
    if (cols_ != rhs.rows_)
      throw std::invalid_argument("matrix product: inner dimensions differ (" +
                                  std::to_string(cols_) + " vs " + std::to_string(rhs.rows_) + ")");
    ComplexMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const cdouble a = (*this)(i, k);
        if (a == cdouble{}) continue;
        for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
      }
    return out;
  }

  ComplexMatrix operator-(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
      throw std::invalid_argument("matrix difference: shapes differ");
    ComplexMatrix out = *this;
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] -= rhs.entries_[i];
    return out;
  }

  ComplexMatrix operator*(cdouble s) const {
    ComplexMatrix out = *this;
    for (auto& e : out.entries_) e *= s;
    return out;
  }

  double frobenius_norm() const {
    double acc = 0.0;
    for (const auto& e : entries_) acc += std::norm(e);
    return std::sqrt(acc);
  }

  cdouble trace() const {
    if (!square()) throw std::invalid_argument("trace: matrix not square");
    cdouble t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  bool all_finite() const noexcept {
    for (const auto& e : entries_)
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cdouble> entries_;
};

/// Conjugate transpose.
inline ComplexMatrix dagger(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
  return out;
}

/// Left-to-right product of a chain; an empty chain of declared dimension n
/// yields the n x n identity.
inline ComplexMatrix multiply_chain(std::span<const ComplexMatrix> ms, std::size_t n_if_empty) {
  if (ms.empty()) return ComplexMatrix::identity(n_if_empty);
  ComplexMatrix acc = ms[0];
  for (std::size_t i = 1; i < ms.size(); ++i) acc = acc * ms[i];
  return acc;
}

inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

/// Frobenius norm of (M^dag M - I); zero iff M is unitary.
inline double unitarity_deviation(const ComplexMatrix& m) {
  if (!m.square()) throw std::invalid_argument("unitarity_deviation: matrix not square");
  return frobenius_distance(dagger(m) * m, ComplexMatrix::identity(m.rows()));
}

/// min over alpha of ||M - e^{i alpha} I||_F. Photon detection cannot see a
/// global phase, so closeness to the identity is measured modulo one. The
/// minimizing phase is alpha = arg(tr M) in closed form; the norm is then
/// evaluated by explicit subtraction, which stays exact near zero where the
/// expanded form ||M||^2 + N - 2|tr M| cancels catastrophically.
inline double identity_deviation(const ComplexMatrix& m) {
  if (!m.square()) throw std::invalid_argument("identity_deviation: matrix not square");
  const cdouble tr = m.trace();
  const cdouble phase = std::abs(tr) > 0.0 ? tr / std::abs(tr) : cdouble(1.0, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      acc += std::norm(m(i, j) - (i == j ? phase : cdouble{}));
  return std::sqrt(acc);
}

namespace detail {
inline void require_finite(double v, const char* name) {
  if (!std::isfinite(v))
    throw std::invalid_argument(std::string(name) + " must be finite");
}
}  // namespace detail

/// 2x2 beam-splitter block. theta sets reflectivity (cos) vs transmittance
/// (sin); phi is the phase shifter on the second input port:
///
///   [ cos t          i e^{i p} sin t ]
///   [ i sin t        e^{i p} cos t   ]
inline ComplexMatrix t_block(double theta, double phi) {
  detail::require_finite(theta, "theta");
  detail::require_finite(phi, "phi");
  const double c = std::cos(theta), s = std::sin(theta);
  const cdouble eip = std::polar(1.0, phi);
  const cdouble i{0.0, 1.0};
  return ComplexMatrix(2, 2, {c, i * eip * s, i * s, eip * c});
}

/// n x n embedding of t_block acting on adjacent modes (mode, mode+1),
/// identity elsewhere. mode is 0-based; mode <= n-2.
inline ComplexMatrix embed_t(std::size_t n, std::size_t mode, double theta, double phi) {
  if (n < 2) throw std::invalid_argument("embed_t: need at least two modes");
  if (mode + 1 >= n)
    throw std::invalid_argument("embed_t: mode " + std::to_string(mode) +
                                " out of range for n=" + std::to_string(n));
  ComplexMatrix m = ComplexMatrix::identity(n);
  const ComplexMatrix t = t_block(theta, phi);
  m(mode, mode) = t(0, 0);
  m(mode, mode + 1) = t(0, 1);
  m(mode + 1, mode) = t(1, 0);
  m(mode + 1, mode + 1) = t(1, 1);
  return m;
}

/// General spin-1 observable S(theta, phi); Hermitian with spectrum
/// {1, 0, -1} for every parameter choice. S_z = S(0,0), S_x = S(pi/2,0).
inline ComplexMatrix spin1_observable(double theta, double phi) {
  detail::require_finite(theta, "theta");
  detail::require_finite(phi, "phi");
  const double c = std::cos(theta);
  const double s = std::sin(theta) / std::sqrt(2.0);
  const cdouble up = std::polar(s, -phi);   // e^{-i phi} sin(theta)/sqrt 2
  const cdouble dn = std::polar(s, phi);
  return ComplexMatrix(3, 3, {c, up, 0.0, dn, 0.0, up, 0.0, dn, -c});
}

/// Complex amplitude vector over the mesh modes.
struct StateVector {
  std::vector<cdouble> amplitudes;

  StateVector() = default;
  explicit StateVector(std::vector<cdouble> amps) : amplitudes(std::move(amps)) {}

  static StateVector basis(std::size_t n, std::size_t mode) {
    if (mode >= n) throw std::invalid_argument("StateVector::basis: mode out of range");
    StateVector v;
    v.amplitudes.assign(n, cdouble{});
    v.amplitudes[mode] = 1.0;
    return v;
  }

  std::size_t size() const noexcept { return amplitudes.size(); }

  double squared_norm() const {
    double acc = 0.0;
    for (const auto& a : amplitudes) acc += std::norm(a);
    return acc;
  }
};

inline StateVector apply(const ComplexMatrix& m, const StateVector& v) {
  if (m.cols() != v.size())
    throw std::invalid_argument("apply: matrix columns do not match state dimension");
  StateVector out;
  out.amplitudes.assign(m.rows(), cdouble{});
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out.amplitudes[i] += m(i, j) * v.amplitudes[j];
  return out;
}

inline cdouble inner_product(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner_product: dimension mismatch");
  cdouble acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return acc;
}

}  // namespace qmesh
