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

// Private second-moment estimators:
//
//  * dpsme: recursive preconditioning under rho-zCDP. Each level releases the
//    noisy second moment, contracts the large-eigenvalue subspace by 1/2,
//    caps point norms and recurses with a smaller eigenvalue bound.
//  * baseline_estimate: subsample-and-aggregate under (eps, delta)-DP.
//  * dp_min_eigenvalue: stability-histogram estimate of the smallest
//    eigenvalue, used to precondition the input of dpsme.
//
// Estimator failure (the "bottom" outcome) is a value, not an exception.

#ifndef PRIVMOMENT_ESTIMATORS_HPP_
#define PRIVMOMENT_ESTIMATORS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "privmoment/dataset.hpp"
#include "privmoment/linalg.hpp"
#include "privmoment/privacy.hpp"
#include "privmoment/rng.hpp"
#include "privmoment/schedule.hpp"

namespace privmoment {

// ---------------------------------------------------------------------------
// Recursive estimator.

struct RecParams {
  double eta;
  double psi;
  double c_noise;
  double c_stop;
  double kappa;         // eigenvalue upper bound at entry
  double radius;        // norm bound at entry
  std::size_t t_used;   // noisy releases the budget is split over
  double xi;
  double rho;
  double alpha;
  std::size_t m;

  /// Constants from RecursionConstants::for_subsample_size(m). Throws
  /// std::invalid_argument on invalid values.
  static RecParams make(std::size_t m, double alpha, double rho, double xi, double kappa,
                        double radius, std::size_t t_used);
};

struct LevelRecord {
  std::size_t level = 0;
  double kappa = 0.0;
  double radius = 0.0;
  double sigma = 0.0;          // calibrated noise scale of this release
  double noise_norm = 0.0;     // ||N||_2 of the realized draw
  bool event_e = false;        // noise_norm <= c_noise * kappa
  bool terminal = false;
  std::size_t subspace_dim = 0;
  // Diagnostics computed from raw data; filled only when requested.
  std::size_t shrunk = 0;
  std::vector<std::size_t> shrunk_indices;
  std::optional<double> nontail_min_eig;
};

struct RecTrace {
  std::vector<LevelRecord> levels;
};

struct RecOptions {
  /// Drop every noise draw (testing only). sigma is still recorded.
  bool zero_noise = false;
  /// Record raw-data-dependent fields (shrink counts and indices).
  bool diagnostics = false;
  /// When set (size n, true = excluded), each level records the smallest
  /// eigenvalue of the second moment over the non-excluded points,
  /// normalized by n.
  const std::vector<bool>* excluded = nullptr;
};

struct ErrorMetrics {
  double gamma = 0.0;
  double rel_spectral_error = 0.0;   // ||S^{-1/2} E S^{-1/2} - I||
  double spectral_dist = 0.0;
  bool loewner_lower = false;        // (1 - gamma) lower_ref <= E
  bool loewner_upper = false;        // E <= (1 + gamma) truth
};

/// Test-mode comparison against a known second moment. The lower Loewner
/// check uses `lower_ref` (e.g. the second moment without tail points),
/// defaulting to `truth`. Tolerance is psd_tolerance(truth).
ErrorMetrics error_metrics(const SymMat& truth, const SymMat& estimate, double gamma,
                           const SymMat* lower_ref = nullptr);

struct EstimateReport {
  SymMat sigma_hat;
  BudgetLedger ledger;
  std::optional<RecTrace> trace;
  std::optional<ErrorMetrics> metrics;
};

/// Eigenvectors with eigenvalue >= threshold.
std::vector<Vector> threshold_subspace(const EigenDecomp& decomp, double threshold);

struct ShrinkResult {
  std::vector<std::size_t> shrunk;  // ascending row indices that were capped
};

/// Caps every row of `y` at norm sqrt(3/7) * radius in place, keeping
/// direction. Rows already inside are untouched.
ShrinkResult shrink_points(Matrix& y, double radius);

/// Runs the recursion on `x` with the given parameters. Level l draws its
/// noise from rng.split(l). The trace, when non-null, receives one record per
/// noisy release.
SymMat rec_dpsme(const Matrix& x, const RecParams& params, const Rng& rng,
                 const RecOptions& options = {}, RecTrace* trace = nullptr);

/// Full estimator: rescales by 1/sqrt(1 - alpha), runs the recursion with the
/// schedule of recursion_schedule(R, alpha, m), and rescales back. The
/// budget rho is split evenly over the noisy releases and charged to the
/// ledger one level at a time. Requires alpha <= 1/2 and rho > 0.
EstimateReport dpsme(const Dataset& x, double xi, double rho, std::size_t m, double alpha,
                     const Rng& rng, const RecOptions& options = {});

/// Scales every point by 1/sqrt(lambda_min_hat) (radius likewise).
Dataset precondition(const Dataset& x, double lambda_min_hat);

// ---------------------------------------------------------------------------
// Shared by the subsample-and-aggregate estimators.

/// floor(n/m) disjoint groups of m indices after a seeded Fisher-Yates
/// shuffle; the n - floor(n/m) m leftover indices are unused.
std::vector<std::vector<std::size_t>> partition_groups(std::size_t n, std::size_t m, Rng& rng);

struct Failure {
  std::string reason;
  BudgetLedger ledger;
  /// Named numbers explaining the decision (e.g. the abort threshold).
  std::vector<std::pair<std::string, double>> details;
};

// ---------------------------------------------------------------------------
// Baseline.

struct BaselineParams {
  std::size_t m = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double xi = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double noise_const = 1.0;   // the large constant C in the noise scale eta
  bool zero_noise = false;    // drop the TLap and Gaussian draws (testing only)
};

struct BaselineInfo {
  std::size_t groups = 0;
  double q_mean = 0.0;       // Q (raw-data dependent)
  double q_noisy = 0.0;      // Q + Z
  double threshold = 0.0;    // 0.8 + (2 / (T eps)) ln(1 + (e^eps - 1) / (2 delta))
  double weight_total = 0.0;
  double eta = 0.0;
};

struct BaselineReport {
  EstimateReport estimate;
  BaselineInfo info;
};

struct BaselineFailure {
  Failure failure;
  BaselineInfo info;
};

using BaselineOutcome = std::variant<BaselineReport, BaselineFailure>;

/// Weight of a group with agreement score q: min(1, 10 max(0, q - 0.6)).
double baseline_weight(double q);

/// Abort threshold 0.8 + (2 / (T eps)) ln(1 + (e^eps - 1) / (2 delta)).
double baseline_abort_threshold(std::size_t groups, double eps, double delta);

/// Throws std::invalid_argument when n < 2m or a parameter is out of range.
/// Success charges (2 eps, 4 e^eps delta); an abort charges (eps, delta) for
/// the noisy agreement score it released.
BaselineOutcome baseline_estimate(const Dataset& x, const BaselineParams& params, const Rng& rng);

// ---------------------------------------------------------------------------
// Stability histogram and minimum-eigenvalue estimator.

/// Half-open interval [lower, upper).
struct Bucket {
  double lower;
  double upper;
};

struct ReleasedBucket {
  std::size_t bucket;
  double noisy_count;
};

/// 1 + 2 ln(2 / delta) / eps.
double stability_threshold(double eps, double delta);

/// Buckets must be sorted and disjoint. Every bucket holding at least one
/// value gets Laplace(2/eps) noise (drawn in bucket order) and is released iff
/// its noisy count exceeds stability_threshold. Values outside every bucket
/// are ignored.
std::vector<ReleasedBucket> stability_histogram(std::span<const double> values,
                                                std::span<const Bucket> buckets, double eps,
                                                double delta, Rng& rng, bool zero_noise = false);

/// Geometric buckets [r^j, r^{j+1}) with r = 1/(1 - alpha), covering
/// [floor, cap]: a catch-all [0, r^{j0}) with r^{j0} the largest grid point
/// <= floor, the grid buckets, and an overflow [r^{j1}, inf) starting at the
/// first grid point > cap.
std::vector<Bucket> eigmin_grid(double alpha, double floor, double cap);

struct EigminParams {
  std::size_t m = 0;
  double alpha = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double lambda_floor = 1e-9;
  std::optional<double> lambda_cap;   // defaults to R^2
  bool zero_noise = false;
};

struct EigminReport {
  double lambda = 0.0;      // lower edge of the chosen bucket
  Bucket bucket{0.0, 0.0};
  double noisy_count = 0.0;
  std::size_t groups = 0;
  std::vector<ReleasedBucket> released;
  BudgetLedger ledger;
};

using EigminOutcome = std::variant<EigminReport, Failure>;

/// Charges (eps, delta) whether or not a bucket is released.
EigminOutcome dp_min_eigenvalue(const Dataset& x, const EigminParams& params, const Rng& rng);

}  // namespace privmoment

#endif  // PRIVMOMENT_ESTIMATORS_HPP_
