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

#include "privmoment/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "privmoment/errors.hpp"
#include "privmoment/noise.hpp"

namespace privmoment {
namespace {

constexpr std::size_t kMaxLevels = 2000;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

// Smallest eigenvalue of (1/n) sum over rows i with !excluded[i].
double nontail_min_eig(const Matrix& y, const std::vector<bool>& excluded) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    if (!excluded[i]) keep.push_back(i);
  }
  return min_eigenvalue(second_moment(y, keep, static_cast<double>(y.rows())));
}

// y_i <- scale * P y_i for every row.
void transform_rows(Matrix& y, const SymMat& p, double scale) {
  const std::size_t d = y.cols();
  Vector tmp(d);
  for (std::size_t i = 0; i < y.rows(); ++i) {
    auto row = y.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < d; ++b) s += p(a, b) * row[b];
      tmp[a] = scale * s;
    }
    std::copy(tmp.begin(), tmp.end(), row.begin());
  }
}

}  // namespace

RecParams RecParams::make(std::size_t m, double alpha, double rho, double xi, double kappa,
                          double radius, std::size_t t_used) {
  require(in_open_unit(alpha), "RecParams: alpha must lie in (0, 1)");
  require(rho > 0.0 && std::isfinite(rho), "RecParams: rho must be finite and positive");
  require(in_open_unit(xi), "RecParams: xi must lie in (0, 1)");
  require(kappa >= 0.0 && std::isfinite(kappa), "RecParams: kappa must be finite");
  require(radius >= 0.0 && std::isfinite(radius), "RecParams: radius must be finite");
  require(t_used >= 1, "RecParams: t_used must be positive");
  const RecursionConstants k = RecursionConstants::for_subsample_size(m);
  return {k.eta, k.psi, k.c_noise, k.c_stop, kappa, radius, t_used, xi, rho, alpha, m};
}

ErrorMetrics error_metrics(const SymMat& truth, const SymMat& estimate, double gamma,
                           const SymMat* lower_ref) {
  ErrorMetrics m;
  m.gamma = gamma;
  m.rel_spectral_error = rel_spectral_error(truth, estimate);
  m.spectral_dist = spectral_dist(truth, estimate);
  const double tol = psd_tolerance(truth);
  const SymMat& lower = lower_ref ? *lower_ref : truth;
  m.loewner_lower = loewner_leq((1.0 - gamma) * lower, estimate, tol);
  m.loewner_upper = loewner_leq(estimate, (1.0 + gamma) * truth, tol);
  return m;
}

std::vector<Vector> threshold_subspace(const EigenDecomp& decomp, double threshold) {
  std::vector<Vector> basis;
  for (std::size_t i = 0; i < decomp.dim(); ++i) {
    if (decomp.values[i] >= threshold) basis.push_back(decomp.vector(i));
  }
  return basis;
}

ShrinkResult shrink_points(Matrix& y, double radius) {
  require(radius > 0.0, "shrink_points: radius must be positive");
  const double cap = std::sqrt(3.0 / 7.0) * radius;
  ShrinkResult r;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    auto row = y.row(i);
    const double nrm = norm2(row);
    if (nrm <= cap) continue;
    const double s = cap / nrm;
    for (double& v : row) v *= s;
    r.shrunk.push_back(i);
  }
  return r;
}

SymMat rec_dpsme(const Matrix& x, const RecParams& p, const Rng& rng, const RecOptions& options,
                 RecTrace* trace) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  require(n >= 1 && d >= 1, "rec_dpsme: empty input");
  if (options.excluded) {
    require(options.excluded->size() == n, "rec_dpsme: excluded mask has the wrong size");
  }
  const double rho_step = p.rho / static_cast<double>(p.t_used);
  const double inflate = std::sqrt(8.0 / 7.0);

  Matrix y = x;
  double kappa = p.kappa;
  double radius = p.radius;
  std::vector<SymMat> inverses;
  SymMat result;

  for (std::size_t level = 0;; ++level) {
    if (level >= kMaxLevels) throw NumericalFailure("rec_dpsme: recursion did not terminate");
    LevelRecord rec;
    rec.level = level;
    rec.kappa = kappa;
    rec.radius = radius;
    rec.sigma = gaussian_sigma_for_zcdp(sensitivity_second_moment(radius, n), rho_step);

    SymMat noisy = second_moment(y);
    if (!options.zero_noise) {
      Rng stream = rng.split(static_cast<std::uint64_t>(level));
      const SymMat noise = gue_sample(d, rec.sigma * rec.sigma, stream);
      rec.noise_norm = spectral_norm(noise);
      noisy += noise;
    }
    rec.event_e = rec.noise_norm <= p.c_noise * kappa;
    if (options.excluded) rec.nontail_min_eig = nontail_min_eig(y, *options.excluded);

    if (kappa <= p.c_stop) {
      rec.terminal = true;
      if (trace) trace->levels.push_back(std::move(rec));
      result = std::move(noisy);
      break;
    }

    const EigenDecomp e = eig_sym(noisy);
    const std::vector<Vector> basis = threshold_subspace(e, p.psi * kappa);
    rec.subspace_dim = basis.size();
    ShrinkMap pi = shrink_map(basis, p.eta, d);
    transform_rows(y, pi.forward, inflate);
    ShrinkResult sr = shrink_points(y, radius);
    if (options.diagnostics) {
      rec.shrunk = sr.shrunk.size();
      rec.shrunk_indices = std::move(sr.shrunk);
    }
    inverses.push_back(std::move(pi.inverse));
    if (trace) trace->levels.push_back(std::move(rec));

    kappa *= 3.0 / 7.0;
    radius *= std::sqrt(3.0 / 7.0);
  }

  for (auto it = inverses.rbegin(); it != inverses.rend(); ++it) {
    result = (7.0 / 8.0) * congruence(*it, result);
  }
  return result;
}

EstimateReport dpsme(const Dataset& x, double xi, double rho, std::size_t m, double alpha,
                     const Rng& rng, const RecOptions& options) {
  require(alpha > 0.0 && alpha <= 0.5, "dpsme: alpha must lie in (0, 1/2]");
  const double r = x.radius();
  const RecursionSchedule sched = recursion_schedule(r, alpha, m);
  const std::size_t levels = sched.levels();
  const double scale = std::sqrt(1.0 / (1.0 - alpha));
  const RecParams params =
      RecParams::make(m, alpha, rho, xi, r * r / (1.0 - alpha), scale * r, levels);

  Matrix scaled = x.points();
  for (double& v : scaled.data()) v *= scale;

  EstimateReport report;
  RecTrace trace;
  SymMat est = rec_dpsme(scaled, params, rng, options, &trace);
  if (trace.levels.size() != levels) {
    throw NumericalFailure("dpsme: recursion depth disagrees with the privacy schedule");
  }
  report.sigma_hat = (1.0 - alpha) * est;
  const ZcdpBudget per_level(rho / static_cast<double>(levels));
  for (std::size_t l = 0; l < levels; ++l) {
    report.ledger = report.ledger.with_charge("recursive/level/" + std::to_string(l), per_level);
  }
  report.trace = std::move(trace);
  return report;
}

Dataset precondition(const Dataset& x, double lambda_min_hat) {
  require(lambda_min_hat > 0.0 && std::isfinite(lambda_min_hat),
          "precondition: lambda_min_hat must be finite and positive");
  const double s = 1.0 / std::sqrt(lambda_min_hat);
  Matrix pts = x.points();
  for (double& v : pts.data()) v *= s;
  return Dataset(std::move(pts), x.radius() * s);
}

std::vector<std::vector<std::size_t>> partition_groups(std::size_t n, std::size_t m, Rng& rng) {
  require(m >= 1, "partition_groups: m must be positive");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j =
        std::min(i - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(i)));
    std::swap(perm[i - 1], perm[j]);
  }
  const std::size_t t = n / m;
  std::vector<std::vector<std::size_t>> groups(t);
  for (std::size_t g = 0; g < t; ++g) {
    groups[g].assign(perm.begin() + static_cast<std::ptrdiff_t>(g * m),
                     perm.begin() + static_cast<std::ptrdiff_t>((g + 1) * m));
  }
  return groups;
}

// 10 q - 6 rather than 10 (q - 0.6): the latter rounds q = 0.7 below 1.
double baseline_weight(double q) { return std::clamp(10.0 * q - 6.0, 0.0, 1.0); }

double baseline_abort_threshold(std::size_t groups, double eps, double delta) {
  require(groups >= 1, "baseline_abort_threshold: no groups");
  return 0.8 + tlap_bound(2.0 / static_cast<double>(groups), eps, delta);
}

BaselineOutcome baseline_estimate(const Dataset& x, const BaselineParams& p, const Rng& rng) {
  const std::size_t n = x.size();
  const std::size_t d = x.dim();
  require(p.m >= 1, "baseline_estimate: m must be positive");
  require(n >= 2 * p.m, "baseline_estimate: need n >= 2m");
  require(in_open_unit(p.alpha), "baseline_estimate: alpha must lie in (0, 1)");
  require(in_open_unit(p.beta), "baseline_estimate: beta must lie in (0, 1)");
  require(in_open_unit(p.xi), "baseline_estimate: xi must lie in (0, 1)");
  require(p.eps > 0.0 && std::isfinite(p.eps), "baseline_estimate: eps must be positive");
  require(in_open_unit(p.delta), "baseline_estimate: delta must lie in (0, 1)");
  require(p.noise_const > 0.0, "baseline_estimate: noise_const must be positive");
  require(4.0 * std::exp(p.eps) * p.delta < 1.0,
          "baseline_estimate: 4 e^eps delta must be below 1");

  Rng shuffle = rng.split("baseline/shuffle");
  const auto groups = partition_groups(n, p.m, shuffle);
  const std::size_t t = groups.size();
  const double md = static_cast<double>(p.m);

  std::vector<SymMat> sigmas(t);
  std::vector<SymMat> inv_roots(t);
  std::vector<bool> definite(t, false);
  for (std::size_t g = 0; g < t; ++g) {
    sigmas[g] = second_moment(x.points(), groups[g], md);
    const EigenDecomp e = eig_sym(sigmas[g]);
    const double tol = std::max(rank_tolerance(sigmas[g]),
                                1e-12 * std::max(1.0, std::abs(e.values.front())));
    if (e.values.back() > tol) {
      definite[g] = true;
      inv_roots[g] = spectral_map(e, [](double v) { return 1.0 / std::sqrt(v); });
    }
  }

  // The self-pair always counts; singular groups match nothing else.
  const double close = 2.0 * p.alpha / (1.0 - p.alpha);
  std::vector<std::size_t> counts(t, 1);
  for (std::size_t i = 0; i < t; ++i) {
    if (!definite[i]) continue;
    for (std::size_t j = i + 1; j < t; ++j) {
      if (!definite[j]) continue;
      if (spectral_dist_prepared(sigmas[i], inv_roots[i], sigmas[j], inv_roots[j]) <= close) {
        ++counts[i];
        ++counts[j];
      }
    }
  }
  const double td = static_cast<double>(t);
  std::vector<double> q(t);
  double q_sum = 0.0;
  for (std::size_t g = 0; g < t; ++g) {
    q[g] = static_cast<double>(counts[g]) / td;
    q_sum += q[g];
  }

  BaselineInfo info;
  info.groups = t;
  info.q_mean = q_sum / td;
  Rng tlap_rng = rng.split("baseline/tlap");
  const double z = p.zero_noise ? 0.0 : tlap_sample(2.0 / td, p.eps, p.delta, tlap_rng);
  info.q_noisy = info.q_mean + z;
  info.threshold = baseline_abort_threshold(t, p.eps, p.delta);
  info.eta = p.alpha / (48.0 * p.noise_const *
                        (std::sqrt(static_cast<double>(d)) + std::sqrt(std::log(4.0 / p.xi))));

  if (info.q_noisy < info.threshold) {
    BaselineFailure f;
    f.failure.reason = "noisy agreement score below abort threshold";
    f.failure.ledger = BudgetLedger().with_charge("baseline/agreement",
                                                  ApproxDpBudget(p.eps, p.delta));
    f.failure.details = {{"groups", td},
                         {"q_noisy", info.q_noisy},
                         {"threshold", info.threshold},
                         {"threshold_slack", info.threshold - 0.8}};
    f.info = info;
    return f;
  }

  SymMat weighted(d);
  for (std::size_t g = 0; g < t; ++g) {
    const double w = baseline_weight(q[g]);
    if (w == 0.0) continue;
    weighted += w * sigmas[g];
    info.weight_total += w;
  }
  if (!(info.weight_total > 0.0)) {
    throw NumericalFailure("baseline_estimate: passed the abort test with zero total weight");
  }
  weighted *= 1.0 / info.weight_total;

  Matrix a = Matrix::identity(d);
  if (!p.zero_noise) {
    Rng gauss = rng.split("baseline/gauss");
    const Matrix noise = std_normal_matrix(d, d, gauss);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) a(i, j) += info.eta * noise(i, j);
    }
  }
  const SymMat root = sqrt_psd(weighted);
  BaselineReport rep;
  rep.estimate.sigma_hat = congruence(root, congruence(a, SymMat::identity(d)));
  rep.estimate.ledger = BudgetLedger().with_charge(
      "baseline", ApproxDpBudget(2.0 * p.eps, 4.0 * std::exp(p.eps) * p.delta));
  rep.info = info;
  return rep;
}

double stability_threshold(double eps, double delta) {
  require(eps > 0.0, "stability_threshold: eps must be positive");
  require(in_open_unit(delta), "stability_threshold: delta must lie in (0, 1)");
  return 1.0 + 2.0 * std::log(2.0 / delta) / eps;
}

std::vector<ReleasedBucket> stability_histogram(std::span<const double> values,
                                                std::span<const Bucket> buckets, double eps,
                                                double delta, Rng& rng, bool zero_noise) {
  const double threshold = stability_threshold(eps, delta);
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    require(buckets[b].lower < buckets[b].upper, "stability_histogram: empty bucket");
    if (b > 0) require(buckets[b - 1].upper <= buckets[b].lower, "stability_histogram: buckets overlap");
  }
  std::vector<std::size_t> counts(buckets.size(), 0);
  for (double v : values) {
    require(std::isfinite(v), "stability_histogram: non-finite value");
    auto it = std::upper_bound(buckets.begin(), buckets.end(), v,
                               [](double val, const Bucket& b) { return val < b.lower; });
    if (it == buckets.begin()) continue;
    --it;
    if (v < it->upper) ++counts[static_cast<std::size_t>(it - buckets.begin())];
  }
  std::vector<ReleasedBucket> out;
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    if (counts[b] == 0) continue;
    const double noise = zero_noise ? 0.0 : laplace_sample(2.0 / eps, rng);
    const double noisy = static_cast<double>(counts[b]) + noise;
    if (noisy > threshold) out.push_back({b, noisy});
  }
  return out;
}

std::vector<Bucket> eigmin_grid(double alpha, double floor, double cap) {
  require(in_open_unit(alpha), "eigmin_grid: alpha must lie in (0, 1)");
  require(floor > 0.0 && std::isfinite(cap) && floor < cap, "eigmin_grid: need 0 < floor < cap");
  const double r = 1.0 / (1.0 - alpha);
  const auto edge = [r](long j) { return std::pow(r, static_cast<double>(j)); };
  long j0 = static_cast<long>(std::floor(std::log(floor) / std::log(r)));
  while (edge(j0) > floor) --j0;
  while (edge(j0 + 1) <= floor) ++j0;
  long j1 = static_cast<long>(std::ceil(std::log(cap) / std::log(r)));
  while (edge(j1) <= cap) ++j1;
  while (edge(j1 - 1) > cap) --j1;

  std::vector<Bucket> out;
  out.push_back({0.0, edge(j0)});
  for (long j = j0; j < j1; ++j) out.push_back({edge(j), edge(j + 1)});
  out.push_back({edge(j1), std::numeric_limits<double>::infinity()});
  return out;
}

EigminOutcome dp_min_eigenvalue(const Dataset& x, const EigminParams& p, const Rng& rng) {
  const std::size_t n = x.size();
  require(p.m >= 1, "dp_min_eigenvalue: m must be positive");
  require(n >= 2 * p.m, "dp_min_eigenvalue: need n >= 2m");
  require(p.eps > 0.0 && std::isfinite(p.eps), "dp_min_eigenvalue: eps must be positive");
  require(in_open_unit(p.delta), "dp_min_eigenvalue: delta must lie in (0, 1)");
  const double cap = p.lambda_cap.value_or(x.radius() * x.radius());
  const std::vector<Bucket> grid = eigmin_grid(p.alpha, p.lambda_floor, cap);

  Rng shuffle = rng.split("eigmin/shuffle");
  const auto groups = partition_groups(n, p.m, shuffle);
  Vector mins(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const SymMat s = second_moment(x.points(), groups[g], static_cast<double>(p.m));
    mins[g] = std::max(0.0, min_eigenvalue(s));
  }

  Rng hist = rng.split("eigmin/histogram");
  const auto released = stability_histogram(mins, grid, p.eps, p.delta, hist, p.zero_noise);
  const BudgetLedger ledger =
      BudgetLedger().with_charge("eigmin/histogram", ApproxDpBudget(p.eps, p.delta));
  if (released.empty()) {
    Failure f;
    f.reason = "no histogram bucket passed the stability threshold";
    f.ledger = ledger;
    f.details = {{"groups", static_cast<double>(groups.size())},
                 {"threshold", stability_threshold(p.eps, p.delta)}};
    return f;
  }
  const ReleasedBucket* best = &released.front();
  for (const auto& rb : released) {
    if (rb.noisy_count > best->noisy_count) best = &rb;
  }
  EigminReport rep;
  rep.bucket = grid[best->bucket];
  rep.lambda = rep.bucket.lower;
  rep.noisy_count = best->noisy_count;
  rep.groups = groups.size();
  rep.released = released;
  rep.ledger = ledger;
  return rep;
}

}  // namespace privmoment
