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
#include <span>
#include <string>
#include <vector>

#include "qmesh/errors.hpp"
#include "qmesh/simulator.hpp"
#include "qmesh/stats.hpp"

namespace qmesh {

struct DigitSequence {
  int base = 3;
  std::vector<std::uint8_t> digits;

  std::size_t size() const noexcept { return digits.size(); }

  void check() const {
    if (base != 2 && base != 3) throw DataError("DigitSequence: base must be 2 or 3");
    for (auto d : digits)
      if (d >= base) throw DataError("DigitSequence: digit out of range");
  }
};

/// Maps heralded, detected trials to ternary digits; lost and unheralded
/// trials are dropped. mapping[k] is the digit emitted for mode k (default
/// identity).
inline DigitSequence digits_from_trials(std::span<const TrialOutcome> trials,
                                        std::span<const int> mapping = {}) {
  DigitSequence seq;
  seq.base = 3;
  for (const auto& t : trials) {
    if (!t.herald_fired || !t.detected_mode) continue;
    const std::size_t mode = *t.detected_mode;
    int digit;
    if (mapping.empty()) {
      digit = static_cast<int>(mode);
    } else {
      if (mode >= mapping.size())
        throw DataError("digits_from_trials: mode index " + std::to_string(mode) +
                        " has no mapping");
      digit = mapping[mode];
    }
    if (digit < 0 || digit >= seq.base)
      throw DataError("digits_from_trials: mapped digit out of range");
    seq.digits.push_back(static_cast<std::uint8_t>(digit));
  }
  return seq;
}

struct ChiSquareResult {
  double statistic = 0.0;
  unsigned dof = 0;
  double p_value = 1.0;
  double significance = 1e-3;
  bool pass = true;
};

/// Pearson frequency test of the digit histogram against an expected
/// probability vector; dof = base - 1.
inline ChiSquareResult chi_square_frequency(const DigitSequence& seq,
                                            std::span<const double> expected,
                                            double significance = 1e-3) {
  seq.check();
  if (seq.digits.empty()) throw std::invalid_argument("chi_square_frequency: empty sequence");
  if (expected.size() != static_cast<std::size_t>(seq.base))
    throw ConfigError("chi_square_frequency: expected vector length != base");
  double total = 0.0;
  for (double p : expected) {
    if (p <= 0.0) throw ConfigError("chi_square_frequency: zero or negative expected cell");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ConfigError("chi_square_frequency: expected probabilities must sum to 1");

  std::vector<std::uint64_t> counts(seq.base, 0);
  for (auto d : seq.digits) ++counts[d];
  const double n = static_cast<double>(seq.size());
  ChiSquareResult r;
  r.dof = static_cast<unsigned>(seq.base - 1);
  r.significance = significance;
  for (int k = 0; k < seq.base; ++k) {
    const double e = n * expected[k];
    const double d = static_cast<double>(counts[k]) - e;
    r.statistic += d * d / e;
  }
  r.p_value = chi_squared_pvalue(r.statistic, r.dof);
  r.pass = r.p_value >= significance;
  return r;
}

struct BorelEntry {
  std::size_t block_size = 0;
  std::string word;
  double frequency = 0.0;
  double expected = 0.0;
  double deviation = 0.0;
};

struct BorelResult {
  bool pass = true;
  double bound = 0.0;           // sqrt(log2(n)/n), n = digit count
  std::string bound_formula = "sqrt(log2(n)/n)";
  std::vector<BorelEntry> table;
};

/// Finite-sample Borel normality: every length-m word over the alphabet,
/// counted over non-overlapping blocks (trailing partial block dropped),
/// must sit within sqrt(log2(n)/n) of base^-m, for m = 1..max_block.
inline BorelResult borel_normality(const DigitSequence& seq, std::size_t max_block) {
  seq.check();
  if (max_block == 0) throw std::invalid_argument("borel_normality: max_block must be >= 1");
  double min_len = std::pow(static_cast<double>(seq.base), 2.0 * static_cast<double>(max_block));
  if (static_cast<double>(seq.size()) < min_len)
    throw std::invalid_argument("borel_normality: sequence too short; need at least " +
                                std::to_string(static_cast<std::uint64_t>(min_len)) +
                                " digits for max_block=" + std::to_string(max_block));

  const double n = static_cast<double>(seq.size());
  BorelResult r;
  r.bound = std::sqrt(std::log2(n) / n);
  for (std::size_t m = 1; m <= max_block; ++m) {
    std::size_t word_count = 1;
    for (std::size_t i = 0; i < m; ++i) word_count *= static_cast<std::size_t>(seq.base);
    std::vector<std::uint64_t> counts(word_count, 0);
    const std::size_t blocks = seq.size() / m;
    for (std::size_t b = 0; b < blocks; ++b) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < m; ++i)
        idx = idx * static_cast<std::size_t>(seq.base) + seq.digits[b * m + i];
      ++counts[idx];
    }
    const double expected = 1.0 / static_cast<double>(word_count);
    for (std::size_t w = 0; w < word_count; ++w) {
      BorelEntry e;
      e.block_size = m;
      std::size_t v = w;
      e.word.assign(m, '0');
      for (std::size_t i = m; i-- > 0;) {
        e.word[i] = static_cast<char>('0' + v % seq.base);
        v /= seq.base;
      }
      e.frequency = blocks ? static_cast<double>(counts[w]) / static_cast<double>(blocks) : 0.0;
      e.expected = expected;
      e.deviation = std::abs(e.frequency - expected);
      if (e.deviation > r.bound) r.pass = false;
      r.table.push_back(std::move(e));
    }
  }
  return r;
}

enum class BitScheme {
  kOuter,  // 0 -> 0, 2 -> 1, middle outcome dropped
  kSplit,  // prefix code 0 -> 00, 2 -> 01, 1 -> 1
};

/// Ternary-to-binary conversion. Under the ideal (1/4, 1/2, 1/4) outcome
/// distribution both schemes emit unbiased bits; outer at half rate, split
/// at the full 1.5 bits/digit entropy rate.
inline DigitSequence to_bits(const DigitSequence& seq, BitScheme scheme) {
  seq.check();
  if (seq.base != 3) throw std::invalid_argument("to_bits: input must be base 3");
  DigitSequence out;
  out.base = 2;
  for (auto d : seq.digits) {
    switch (scheme) {
      case BitScheme::kOuter:
        if (d == 0) out.digits.push_back(0);
        if (d == 2) out.digits.push_back(1);
        break;
      case BitScheme::kSplit:
        if (d == 1) {
          out.digits.push_back(1);
        } else {
          out.digits.push_back(0);
          out.digits.push_back(d == 0 ? 0 : 1);
        }
        break;
    }
  }
  return out;
}

/// Pairwise debiasing: 01 -> 0, 10 -> 1, 00/11 discarded; a trailing
/// unpaired bit is dropped.
inline DigitSequence von_neumann_extract(const DigitSequence& bits) {
  bits.check();
  if (bits.base != 2) throw std::invalid_argument("von_neumann_extract: input must be base 2");
  DigitSequence out;
  out.base = 2;
  for (std::size_t i = 0; i + 1 < bits.size(); i += 2) {
    const auto a = bits.digits[i], b = bits.digits[i + 1];
    if (a != b) out.digits.push_back(a == 1 ? 1 : 0);
  }
  return out;
}

// -- stream formats --------------------------------------------------------

/// Single line of ASCII digits.
inline std::string digits_to_text(const DigitSequence& seq) {
  std::string s;
  s.reserve(seq.size() + 1);
  for (auto d : seq.digits) s.push_back(static_cast<char>('0' + d));
  s.push_back('\n');
  return s;
}

inline DigitSequence digits_from_text(const std::string& text, int base) {
  DigitSequence seq;
  seq.base = base;
  for (char c : text) {
    if (c == '\n' || c == '\r') continue;
    if (c < '0' || c >= '0' + base)
      throw DataError(std::string("digit stream: invalid character '") + c + "'");
    seq.digits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  seq.check();
  return seq;
}

/// Packed form: 8-byte little-endian digit count, then 2 bits per digit,
/// four digits per byte, first digit in the most significant bit pair.
/// Unused trailing bit pairs are zero.
inline std::vector<std::uint8_t> digits_to_packed(const DigitSequence& seq) {
  std::vector<std::uint8_t> out;
  const std::uint64_t n = seq.size();
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((n >> (8 * i)) & 0xFF));
  out.resize(8 + (seq.size() + 3) / 4, 0);
  for (std::size_t i = 0; i < seq.size(); ++i)
    out[8 + i / 4] |= static_cast<std::uint8_t>(seq.digits[i] << (6 - 2 * (i % 4)));
  return out;
}

inline DigitSequence digits_from_packed(std::span<const std::uint8_t> bytes, int base) {
  if (bytes.size() < 8) throw DataError("packed digit stream: missing length header");
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  if (bytes.size() != 8 + (n + 3) / 4)
    throw DataError("packed digit stream: length header does not match payload");
  DigitSequence seq;
  seq.base = base;
  seq.digits.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i)
    seq.digits.push_back((bytes[8 + i / 4] >> (6 - 2 * (i % 4))) & 0x3);
  seq.check();
  return seq;
}

}  // namespace qmesh
