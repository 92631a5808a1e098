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

// Subsamplability: a dataset is (m, alpha, beta)-subsamplable when an i.i.d.
// subsample of m' >= m points satisfies
//   (1 - alpha) Sigma <= Sigma_hat <= (1 + alpha) Sigma
// with probability at least 1 - beta. This header provides the tail-point
// identification that the recursive estimator's guarantee is stated against,
// a Monte-Carlo tester, and the sample-size planners.

#ifndef PRIVMOMENT_SUBSAMP_HPP_
#define PRIVMOMENT_SUBSAMP_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "privmoment/dataset.hpp"
#include "privmoment/linalg.hpp"
#include "privmoment/privacy.hpp"
#include "privmoment/rng.hpp"

namespace privmoment {

struct SubsampParams {
  std::size_t m;
  double alpha;
  double beta;

  /// Throws std::invalid_argument unless m >= 1 and alpha, beta in (0, 1).
  SubsampParams(std::size_t m_in, double alpha_in, double beta_in);
};

/// Points whose squared projection on some direction exceeds m(1+alpha)
/// times the dataset average along that direction. Since
/// sup_u <x,u>^2 / (u^T Sigma u) = x^T Sigma^{-1} x, membership is decided by
/// the leverage score; points with mass outside range(Sigma) have infinite
/// leverage.
struct TailReport {
  std::vector<std::size_t> indices;  // ascending
  double fraction = 0.0;             // indices.size() / n
  double threshold = 0.0;            // m (1 + alpha)
  Vector leverage;                   // per point, +inf outside range(Sigma)
};

/// x^T Sigma^+ x for every point, +infinity for points with relative mass
/// above 1e-9 outside range(Sigma) (eigenvalues <= rank_tolerance are zero).
Vector leverage_scores(const Dataset& x);

TailReport p_tail(const Dataset& x, std::size_t m, double alpha);

/// (1/n) sum over non-tail points of x x^T, normalized by the full n.
SymMat sigma_eff(const Dataset& x, const TailReport& tail);

struct SubsampEstimate {
  std::size_t m = 0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double rate = 0.0;
  double wilson_low = 0.0;   // 95% Wilson score interval
  double wilson_high = 0.0;
};

/// Monte-Carlo failure probability of the Loewner sandwich at subsample size
/// exactly m, drawing with replacement. Trial t uses the stream
/// rng.split(t), so results do not depend on evaluation order.
SubsampEstimate empirical_subsamplability(const Dataset& x, std::size_t m, double alpha,
                                          std::size_t trials, const Rng& rng);

/// The same test at m, 2m, 4m (per-m' failure rates).
std::vector<SubsampEstimate> empirical_subsamplability_grid(const Dataset& x, std::size_t m,
                                                            double alpha, std::size_t trials,
                                                            const Rng& rng);

/// Smallest m on the doubling grid m_start, 2 m_start, ... <= m_max whose
/// estimated failure rate is at most beta.
std::optional<SubsampEstimate> smallest_subsample_size(const Dataset& x, double alpha,
                                                       double beta, std::size_t trials,
                                                       const Rng& rng, std::size_t m_start,
                                                       std::size_t m_max);

/// ceil(max{2 M2 / alpha^2, 2 (1 + M1^2) / (3 alpha)} ln(4d / beta)): the
/// matrix-Bernstein subsample size for whitened samples with ||y|| <= M1 and
/// ||E[(y^T y) y y^T]|| <= M2.
std::size_t bernstein_sample_bound(double m1, double m2, double alpha, double beta,
                                   std::size_t d);

struct PlanInputs {
  SubsampParams params;
  std::size_t d;
  std::optional<ZcdpBudget> zcdp;          // recursive estimator budget
  std::optional<ApproxDpBudget> approx;    // baseline budget
  double gamma;                            // target relative accuracy
  double xi;                               // failure probability
  double radius;                           // L2 bound before preconditioning
  double lambda_min = 1.0;                 // preconditioning estimate
  double const_c = 1.0;                    // constant hidden in the n bound
  double baseline_const = 1.0;             // "large constant" in the baseline noise scale
  double beta_log_base = 2.0;              // base of the log in the beta condition
};

struct SamplePlan {
  double depth_real = 0.0;        // log_{7/3}(kappa / (640 m)) clamped at 0
  std::size_t levels = 0;         // noisy releases of the recursive estimator
  double kappa = 0.0;             // preconditioned R^2 / (1 - alpha)
  std::optional<double> n_recursive;
  std::optional<double> n_baseline;
  double baseline_eta = 0.0;      // multiplicative noise scale of the baseline
  double beta_threshold = 0.0;    // alpha / (4 (1+alpha) log(R^2 / ((1+alpha) m)))
  bool beta_ok = false;
  bool baseline_m_ok = false;     // m >= 2 beta n_baseline / xi
};

/// Sample sizes for the recursive estimator and the baseline, plus the
/// beta precondition of the recursive estimator's guarantee.
///
/// n_recursive = const_c * m sqrt(d / rho) (sqrt(L) ln(L / xi) + ln(1/xi) / gamma),
/// with L the number of noisy releases; when the schedule has a single
/// release only the terminal term remains.
SamplePlan plan_sample_sizes(const PlanInputs& in);

}  // namespace privmoment

#endif  // PRIVMOMENT_SUBSAMP_HPP_
