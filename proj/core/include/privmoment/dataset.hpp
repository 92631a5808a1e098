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

#ifndef PRIVMOMENT_DATASET_HPP_
#define PRIVMOMENT_DATASET_HPP_

#include <cstddef>
#include <span>

#include "privmoment/linalg.hpp"

namespace privmoment {

/// n points in R^d with a certified L2 radius: every row x has
/// ||x|| <= radius * (1 + 1e-12). Validated on construction.
class Dataset {
 public:
  static constexpr double kRadiusSlack = 1e-12;

  /// Throws std::invalid_argument if n or d is zero, a value is non-finite,
  /// or a row exceeds the radius.
  Dataset(Matrix points, double radius);

  /// Uses the largest realized row norm as the radius.
  static Dataset with_tight_radius(Matrix points);

  std::size_t dim() const { return points_.cols(); }
  std::size_t size() const { return points_.rows(); }
  double radius() const { return radius_; }

  const Matrix& points() const { return points_; }
  std::span<const double> point(std::size_t i) const { return points_.row(i); }

  double max_norm() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Matrix points_;
  double radius_ = 0.0;
};

/// (1/n) sum_i x_i x_i^T.
SymMat second_moment(const Dataset& x);
SymMat second_moment(const Matrix& points);

/// (1/normalizer) sum over the selected rows.
SymMat second_moment(const Matrix& points, std::span<const std::size_t> rows,
                     double normalizer);

}  // namespace privmoment

#endif  // PRIVMOMENT_DATASET_HPP_
