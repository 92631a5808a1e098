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

// Synthetic datasets with known population second moments.

#ifndef PRIVMOMENT_DATAGEN_HPP_
#define PRIVMOMENT_DATAGEN_HPP_

#include <cstddef>
#include <memory>
#include <variant>
#include <vector>

#include "privmoment/dataset.hpp"
#include "privmoment/linalg.hpp"
#include "privmoment/rng.hpp"

namespace privmoment {

struct DistSpec;

/// x = Sigma^{1/2} z with z standard normal.
struct GaussianSpec {
  SymMat sigma;
};

/// x = A^{1/2} u with u uniform on the unit sphere, so x^T A^{-1} x = 1.
struct EllipsoidSpec {
  SymMat a;
};

/// x = lambda v, lambda ~ truncated Pareto on [1, B] with density ~ x^{-6},
/// v uniform on the sphere in R^d.
struct ParetoRadialSpec {
  double b;
  std::size_t d;
};

/// x = (lambda, v) in R^{d+1}: a Pareto first coordinate followed by a
/// uniform unit vector.
struct ParetoConcatSpec {
  double b;
  std::size_t d;
};

/// Uniform choice among fixed points (rows).
struct PointListSpec {
  Matrix points;
};

/// Each point is independently drawn from `outlier` with probability eta and
/// from `base` otherwise.
struct MixtureSpec {
  std::shared_ptr<const DistSpec> base;
  std::shared_ptr<const DistSpec> outlier;
  double eta;
};

struct DistSpec {
  std::variant<GaussianSpec, EllipsoidSpec, ParetoRadialSpec, ParetoConcatSpec, PointListSpec,
               MixtureSpec>
      v;
};

/// Radius set to the largest realized norm.
Dataset gen_gaussian(const SymMat& sigma, std::size_t n, Rng& rng);

/// Requires 0 < A <= I (PSD tolerance on the upper bound). Radius is
/// sqrt(lambda_max(A)).
Dataset gen_ellipsoid(const SymMat& a, std::size_t n, Rng& rng);

/// Radius B.
Dataset gen_pareto_radial(double b, std::size_t d, std::size_t n, Rng& rng);

/// Dimension d + 1, radius sqrt(B^2 + 1).
Dataset gen_pareto_concat(double b, std::size_t d, std::size_t n, Rng& rng);

struct LabeledDataset {
  Dataset data;
  std::vector<bool> outlier;  // ground-truth labels; test-mode use only
};

/// Labels come from rng.split("mixture/labels"), base points from
/// rng.split("mixture/base"), outliers from rng.split("mixture/outlier").
LabeledDataset gen_mixture(const DistSpec& base, const DistSpec& outlier, double eta,
                           std::size_t n, Rng& rng);

/// Samples any spec; labels are all false unless the spec is a mixture.
LabeledDataset sample(const DistSpec& spec, std::size_t n, Rng& rng);

std::size_t dimension(const DistSpec& spec);

/// E[x x^T] under the spec. For a mixture, (1 - eta) Sigma_base + eta
/// Sigma_outlier.
SymMat population_second_moment(const DistSpec& spec);

/// E[lambda^2] and E[lambda^4] of the truncated Pareto law on [1, B].
double pareto6_second_moment(double b);
double pareto6_fourth_moment(double b);

}  // namespace privmoment

#endif  // PRIVMOMENT_DATAGEN_HPP_
