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

// Samplers. Every sampler is a pure function of its parameters and the
// generator state, and advances the generator it is given.

#ifndef PRIVMOMENT_NOISE_HPP_
#define PRIVMOMENT_NOISE_HPP_

#include <cstddef>
#include <span>

#include "privmoment/linalg.hpp"
#include "privmoment/rng.hpp"

namespace privmoment {

/// Standard normal via the Box-Muller transform (cosine branch).
double std_normal(Rng& rng);

/// Fills `out` with i.i.d. standard normals, consuming both Box-Muller
/// outputs per pair of uniforms.
void fill_std_normal(std::span<double> out, Rng& rng);

Matrix std_normal_matrix(std::size_t rows, std::size_t cols, Rng& rng);

/// Symmetric matrix whose entries on and above the diagonal are i.i.d.
/// N(0, sigma2), mirrored below. The diagonal has the same variance as the
/// off-diagonal (not the doubled diagonal of the textbook orthogonal
/// ensemble).
SymMat gue_sample(std::size_t d, double sigma2, Rng& rng);

/// Uniform direction on the unit sphere S^{d-1}: a normalized standard
/// normal vector. All-zero draws are resampled.
Vector unit_sphere_sample(std::size_t d, Rng& rng);

/// Laplace(0, scale) by inverse CDF.
double laplace_sample(double scale, Rng& rng);

/// Support half-width of the truncated Laplace mechanism:
/// (delta_sens / eps) * ln(1 + (e^eps - 1) / (2 delta)).
double tlap_bound(double delta_sens, double eps, double delta);

/// Truncated Laplace: density proportional to exp(-|z| eps / delta_sens) on
/// [-B, B], sampled by inverse CDF of the renormalized density.
double tlap_sample(double delta_sens, double eps, double delta, Rng& rng);

/// Inverse CDF of the truncated Pareto law on [1, B] with density
/// proportional to x^{-6}: x = (1 - u (B^5 - 1) / B^5)^{-1/5}.
double pareto6_from_uniform(double b, double u);
double pareto6_sample(double b, Rng& rng);

}  // namespace privmoment

#endif  // PRIVMOMENT_NOISE_HPP_
