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

#include "privmoment/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace privmoment {
namespace {
// Depth beyond this means kappa_0 / c_stop > (7/3)^2000, far past doubles.
constexpr std::size_t kMaxLevels = 2000;
}  // namespace

RecursionConstants RecursionConstants::for_subsample_size(std::size_t m) {
  if (m == 0) throw std::invalid_argument("RecursionConstants: m must be positive");
  const double md = static_cast<double>(m);
  return {0.5, 1.0 / (10.0 * md), 1.0 / (80.0 * md), 640.0 * md};
}

RecursionSchedule recursion_schedule_from_kappa(double kappa0, double c_stop) {
  if (!(kappa0 >= 0.0) || !std::isfinite(kappa0)) {
    throw std::invalid_argument("recursion_schedule: kappa must be finite and non-negative");
  }
  if (!(c_stop > 0.0)) throw std::invalid_argument("recursion_schedule: c_stop must be positive");
  RecursionSchedule s;
  s.depth_real = std::max(0.0, std::log(kappa0 / c_stop) / std::log(7.0 / 3.0));
  double kappa = kappa0;
  s.kappas.push_back(kappa);
  while (kappa > c_stop) {
    if (s.kappas.size() >= kMaxLevels) throw std::invalid_argument("recursion_schedule: depth overflow");
    kappa *= 3.0 / 7.0;
    s.kappas.push_back(kappa);
  }
  return s;
}

RecursionSchedule recursion_schedule(double radius, double alpha, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("recursion_schedule: alpha must lie in (0, 1)");
  const RecursionConstants k = RecursionConstants::for_subsample_size(m);
  return recursion_schedule_from_kappa(radius * radius / (1.0 - alpha), k.c_stop);
}

}  // namespace privmoment
