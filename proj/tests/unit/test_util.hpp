// Copyright 2026 The privmoment Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVMOMENT_TESTS_UNIT_TEST_UTIL_HPP_
#define PRIVMOMENT_TESTS_UNIT_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <utility>

#include "privmoment/dataset.hpp"
#include "privmoment/linalg.hpp"
#include "privmoment/noise.hpp"
#include "privmoment/rng.hpp"

namespace privmoment::testing {

inline double between(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline std::size_t below(Rng& rng, std::size_t k) {
  return static_cast<std::size_t>(rng.next_u64() % k);
}

inline Matrix random_rotation(std::size_t d, Rng& rng) {
  return eig_sym(gue_sample(d, 1.0, rng)).vectors;
}

/// Q diag(values) Q^T by explicit triple loop (no spectral helpers).
inline SymMat with_spectrum(const Matrix& q, const Vector& values) {
  const std::size_t d = values.size();
  SymMat out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += q(i, k) * values[k] * q(j, k);
      out.at(i, j) = s;
    }
  }
  return out;
}

inline SymMat random_pd(std::size_t d, double lo, double hi, Rng& rng) {
  Vector v(d);
  for (double& x : v) x = std::exp(between(rng, std::log(lo), std::log(hi)));
  std::sort(v.begin(), v.end(), std::greater<>());
  return with_spectrum(random_rotation(d, rng), v);
}

/// Dataset from literal rows with the tightest valid radius.
inline Dataset rows(std::initializer_list<std::initializer_list<double>> pts) {
  const std::size_t d = pts.begin()->size();
  Matrix m(pts.size(), d);
  std::size_t i = 0;
  for (const auto& p : pts) {
    std::size_t j = 0;
    for (double v : p) m(i, j++) = v;
    ++i;
  }
  return Dataset::with_tight_radius(std::move(m));
}

/// Largest absolute entry of a - b.
inline double max_abs_diff(const SymMat& a, const SymMat& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.packed().size(); ++i) {
    m = std::max(m, std::abs(a.packed()[i] - b.packed()[i]));
  }
  return m;
}

}  // namespace privmoment::testing

#endif  // PRIVMOMENT_TESTS_UNIT_TEST_UTIL_HPP_
