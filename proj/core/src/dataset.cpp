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

#include "privmoment/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace privmoment {

Dataset::Dataset(Matrix points, double radius) : points_(std::move(points)), radius_(radius) {
  if (points_.rows() == 0 || points_.cols() == 0) {
    throw std::invalid_argument("Dataset: need n >= 1 and d >= 1");
  }
  if (!std::isfinite(radius_) || radius_ < 0.0) {
    throw std::invalid_argument("Dataset: radius must be finite and non-negative");
  }
  const double limit = radius_ * (1.0 + kRadiusSlack);
  for (std::size_t i = 0; i < points_.rows(); ++i) {
    const auto row = points_.row(i);
    if (!std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
      throw std::invalid_argument("Dataset: non-finite value in row " + std::to_string(i));
    }
    if (norm2(row) > limit) {
      throw std::invalid_argument("Dataset: row " + std::to_string(i) +
                                  " exceeds the certified radius");
    }
  }
}

Dataset Dataset::with_tight_radius(Matrix points) {
  double r = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) r = std::max(r, norm2(points.row(i)));
  return Dataset(std::move(points), r);
}

double Dataset::max_norm() const {
  double r = 0.0;
  for (std::size_t i = 0; i < size(); ++i) r = std::max(r, norm2(point(i)));
  return r;
}

SymMat second_moment(const Dataset& x) { return second_moment(x.points()); }

SymMat second_moment(const Matrix& points) {
  const std::size_t d = points.cols();
  const std::size_t n = points.rows();
  if (n == 0) throw std::invalid_argument("second_moment: empty point set");
  // Accumulate into a dense upper triangle for locality, then pack.
  std::vector<double> acc(d * d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto x = points.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      double* out = acc.data() + i * d;
      for (std::size_t j = i; j < d; ++j) out[j] += xi * x[j];
    }
  }
  SymMat m(d);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) m.at(i, j) = acc[i * d + j] * inv_n;
  return m;
}

SymMat second_moment(const Matrix& points, std::span<const std::size_t> rows,
                     double normalizer) {
  if (!(normalizer > 0.0)) throw std::invalid_argument("second_moment: normalizer must be positive");
  const std::size_t d = points.cols();
  std::vector<double> acc(d * d, 0.0);
  for (std::size_t r : rows) {
    const auto x = points.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      double* out = acc.data() + i * d;
      for (std::size_t j = i; j < d; ++j) out[j] += xi * x[j];
    }
  }
  SymMat m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) m.at(i, j) = acc[i * d + j] / normalizer;
  return m;
}

}  // namespace privmoment
