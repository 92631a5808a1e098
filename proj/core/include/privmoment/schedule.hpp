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

#ifndef PRIVMOMENT_SCHEDULE_HPP_
#define PRIVMOMENT_SCHEDULE_HPP_

#include <cstddef>
#include <vector>

namespace privmoment {

/// Constants of the recursive estimator for subsample size m.
struct RecursionConstants {
  double eta;        // 1/2: contraction applied to the large-eigenvalue subspace
  double psi;        // 1/(10m): subspace threshold as a fraction of kappa
  double c_noise;    // 1/(80m): noise level for which the contraction holds
  double c_stop;     // 640m: recursion stops once kappa <= c_stop
  static RecursionConstants for_subsample_size(std::size_t m);
};

/// Data-independent sequence of eigenvalue bounds kappa_l = (3/7)^l kappa_0
/// visited by the recursion, ending at the first kappa <= c_stop.
struct RecursionSchedule {
  double depth_real;            // log_{7/3}(kappa_0 / c_stop), clamped at 0
  std::vector<double> kappas;   // one entry per noisy release

  std::size_t levels() const { return kappas.size(); }
};

/// kappa_0 = radius^2 / (1 - alpha), the bound after the estimator's
/// 1/(1 - alpha) rescaling of the data.
RecursionSchedule recursion_schedule(double radius, double alpha, std::size_t m);

/// Schedule for an explicit starting kappa (no rescaling).
RecursionSchedule recursion_schedule_from_kappa(double kappa0, double c_stop);

}  // namespace privmoment

#endif  // PRIVMOMENT_SCHEDULE_HPP_
