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

#include "privmoment/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace privmoment {

double std_normal(Rng& rng) {
  const double u1 = rng.uniform_pos();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void fill_std_normal(std::span<double> out, Rng& rng) {
  std::size_t i = 0;
  for (; i + 1 < out.size(); i += 2) {
    const double u1 = rng.uniform_pos();
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[i] = r * std::cos(angle);
    out[i + 1] = r * std::sin(angle);
  }
  if (i < out.size()) out[i] = std_normal(rng);
}

Matrix std_normal_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  fill_std_normal(m.data(), rng);
  return m;
}

SymMat gue_sample(std::size_t d, double sigma2, Rng& rng) {
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("gue_sample: sigma2 must be non-negative");
  SymMat n(d);
  if (sigma2 == 0.0) return n;
  fill_std_normal(n.packed(), rng);
  n *= std::sqrt(sigma2);
  return n;
}

Vector unit_sphere_sample(std::size_t d, Rng& rng) {
  if (d == 0) throw std::invalid_argument("unit_sphere_sample: d must be positive");
  Vector v(d);
  for (;;) {
    fill_std_normal(v, rng);
    const double r = norm2(v);
    if (r > 0.0) {
      for (double& x : v) x /= r;
      return v;
    }
  }
}

double laplace_sample(double scale, Rng& rng) {
  if (!(scale >= 0.0)) throw std::invalid_argument("laplace_sample: scale must be non-negative");
  // Exponential magnitude with an independent random sign.
  const double mag = -scale * std::log(rng.uniform_pos());
  return (rng.next_u64() >> 63) ? -mag : mag;
}

double tlap_bound(double delta_sens, double eps, double delta) {
  if (!(delta_sens > 0.0) || !(eps > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("tlap: need delta_sens > 0, eps > 0, 0 < delta < 1");
  }
  return (delta_sens / eps) * std::log1p(std::expm1(eps) / (2.0 * delta));
}

double tlap_sample(double delta_sens, double eps, double delta, Rng& rng) {
  const double bound = tlap_bound(delta_sens, eps, delta);
  const double scale = delta_sens / eps;
  // |Z| has density proportional to exp(-z/scale) on [0, B]; invert its CDF
  // F(z) = (1 - e^{-z/scale}) / (1 - e^{-B/scale}).
  const double mass = -std::expm1(-bound / scale);
  const double u = rng.uniform();
  const double mag = std::min(bound, -scale * std::log1p(-u * mass));
  return (rng.next_u64() >> 63) ? -mag : mag;
}

double pareto6_from_uniform(double b, double u) {
  if (!(b > 1.0)) throw std::invalid_argument("pareto6: B must exceed 1");
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("pareto6: u must lie in [0, 1]");
  const double b5 = std::pow(b, 5.0);
  const double x = std::pow(1.0 - u * (b5 - 1.0) / b5, -0.2);
  return std::min(std::max(x, 1.0), b);
}

double pareto6_sample(double b, Rng& rng) { return pareto6_from_uniform(b, rng.uniform()); }

}  // namespace privmoment
