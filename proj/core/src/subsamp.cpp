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

#include "privmoment/subsamp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "privmoment/schedule.hpp"

namespace privmoment {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOutsideRangeRel = 1e-9;
constexpr double kWilsonZ = 1.959963984540054;

void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": alpha must lie in (0, 1)");
  }
}

// Fills `sigma_hat` with the second moment of m rows drawn with replacement.
void resample_second_moment(const Matrix& pts, std::size_t m, Rng& rng,
                            std::vector<std::size_t>& rows, SymMat& out) {
  const std::size_t n = pts.rows();
  rows.resize(m);
  for (auto& r : rows) {
    r = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
  }
  out = second_moment(pts, rows, static_cast<double>(m));
}

void wilson(SubsampEstimate& e) {
  const double n = static_cast<double>(e.trials);
  const double p = e.rate;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  e.wilson_low = std::clamp(center - half, 0.0, p);
  e.wilson_high = std::clamp(center + half, p, 1.0);
}

}  // namespace

SubsampParams::SubsampParams(std::size_t m_in, double alpha_in, double beta_in)
    : m(m_in), alpha(alpha_in), beta(beta_in) {
  if (m == 0) throw std::invalid_argument("SubsampParams: m must be positive");
  check_alpha(alpha, "SubsampParams");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("SubsampParams: beta must lie in (0, 1)");
}

Vector leverage_scores(const Dataset& x) {
  const SymMat sigma = second_moment(x);
  const EigenDecomp e = eig_sym(sigma);
  const double tol = rank_tolerance(sigma);
  const std::size_t d = x.dim();
  std::size_t rank = 0;
  while (rank < d && e.values[rank] > tol) ++rank;

  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto p = x.point(i);
    const double total = dot(p, p);
    double inside = 0.0;
    double lev = 0.0;
    for (std::size_t k = 0; k < rank; ++k) {
      double c = 0.0;
      for (std::size_t j = 0; j < d; ++j) c += e.vectors(j, k) * p[j];
      inside += c * c;
      lev += c * c / e.values[k];
    }
    out[i] = (total - inside > kOutsideRangeRel * total) ? kInf : lev;
  }
  return out;
}

TailReport p_tail(const Dataset& x, std::size_t m, double alpha) {
  if (m == 0) throw std::invalid_argument("p_tail: m must be positive");
  check_alpha(alpha, "p_tail");
  TailReport r;
  r.threshold = static_cast<double>(m) * (1.0 + alpha);
  r.leverage = leverage_scores(x);
  for (std::size_t i = 0; i < r.leverage.size(); ++i) {
    if (r.leverage[i] > r.threshold) r.indices.push_back(i);
  }
  r.fraction = static_cast<double>(r.indices.size()) / static_cast<double>(x.size());
  return r;
}

SymMat sigma_eff(const Dataset& x, const TailReport& tail) {
  std::vector<std::size_t> keep;
  keep.reserve(x.size());
  std::size_t t = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (t < tail.indices.size() && tail.indices[t] == i) {
      ++t;
      continue;
    }
    keep.push_back(i);
  }
  return second_moment(x.points(), keep, static_cast<double>(x.size()));
}

SubsampEstimate empirical_subsamplability(const Dataset& x, std::size_t m, double alpha,
                                          std::size_t trials, const Rng& rng) {
  if (trials == 0) throw std::invalid_argument("empirical_subsamplability: trials must be positive");
  if (m == 0) throw std::invalid_argument("empirical_subsamplability: m must be positive");
  check_alpha(alpha, "empirical_subsamplability");

  const SymMat sigma = second_moment(x);
  const double rtol = rank_tolerance(sigma);
  const bool definite = min_eigenvalue(sigma) > rtol;
  // When Sigma is invertible the sandwich is equivalent to the whitened
  // spectrum lying in [1 - alpha, 1 + alpha]. Otherwise check the raw
  // inequalities with the PSD slack.
  SymMat whitener;
  if (definite) whitener = inv_sqrt(sigma, rtol);
  const SymMat lower = (1.0 - alpha) * sigma;
  const SymMat upper = (1.0 + alpha) * sigma;
  const double ptol = psd_tolerance(sigma);

  SubsampEstimate est;
  est.m = m;
  est.trials = trials;
  std::vector<std::size_t> rows;
  SymMat sigma_hat;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng stream = rng.split(static_cast<std::uint64_t>(t));
    resample_second_moment(x.points(), m, stream, rows, sigma_hat);
    bool ok;
    if (definite) {
      const EigenDecomp e = eig_sym(congruence(whitener, sigma_hat));
      ok = e.values.front() <= 1.0 + alpha && e.values.back() >= 1.0 - alpha;
    } else {
      ok = loewner_leq(lower, sigma_hat, ptol) && loewner_leq(sigma_hat, upper, ptol);
    }
    if (!ok) ++est.failures;
  }
  est.rate = static_cast<double>(est.failures) / static_cast<double>(trials);
  wilson(est);
  return est;
}

std::vector<SubsampEstimate> empirical_subsamplability_grid(const Dataset& x, std::size_t m,
                                                            double alpha, std::size_t trials,
                                                            const Rng& rng) {
  std::vector<SubsampEstimate> out;
  for (std::size_t k : {1u, 2u, 4u}) {
    out.push_back(empirical_subsamplability(x, k * m, alpha, trials, rng.split(k * m)));
  }
  return out;
}

std::optional<SubsampEstimate> smallest_subsample_size(const Dataset& x, double alpha,
                                                       double beta, std::size_t trials,
                                                       const Rng& rng, std::size_t m_start,
                                                       std::size_t m_max) {
  if (m_start == 0) throw std::invalid_argument("smallest_subsample_size: m_start must be positive");
  for (std::size_t m = m_start; m <= m_max; m *= 2) {
    SubsampEstimate e = empirical_subsamplability(x, m, alpha, trials, rng.split(m));
    if (e.rate <= beta) return e;
  }
  return std::nullopt;
}

std::size_t bernstein_sample_bound(double m1, double m2, double alpha, double beta,
                                   std::size_t d) {
  if (!(m1 >= 0.0) || !(m2 >= 0.0) || !std::isfinite(m1) || !std::isfinite(m2)) {
    throw std::invalid_argument("bernstein_sample_bound: moments must be finite and non-negative");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("bernstein_sample_bound: alpha must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("bernstein_sample_bound: beta must lie in (0, 1)");
  if (d == 0) throw std::invalid_argument("bernstein_sample_bound: d must be positive");
  const double lead = std::max(2.0 * m2 / (alpha * alpha), 2.0 * (1.0 + m1 * m1) / (3.0 * alpha));
  return static_cast<std::size_t>(std::ceil(lead * std::log(4.0 * static_cast<double>(d) / beta)));
}

SamplePlan plan_sample_sizes(const PlanInputs& in) {
  const SubsampParams& p = in.params;
  if (in.d == 0) throw std::invalid_argument("plan_sample_sizes: d must be positive");
  if (!(in.gamma > 0.0)) throw std::invalid_argument("plan_sample_sizes: gamma must be positive");
  if (!(in.xi > 0.0 && in.xi < 1.0)) throw std::invalid_argument("plan_sample_sizes: xi must lie in (0, 1)");
  if (!(in.radius > 0.0) || !std::isfinite(in.radius)) {
    throw std::invalid_argument("plan_sample_sizes: radius must be finite and positive");
  }
  if (!(in.lambda_min > 0.0)) throw std::invalid_argument("plan_sample_sizes: lambda_min must be positive");
  if (!(in.const_c >= 0.0)) throw std::invalid_argument("plan_sample_sizes: const_c must be non-negative");
  if (!(in.baseline_const > 0.0)) {
    throw std::invalid_argument("plan_sample_sizes: baseline_const must be positive");
  }
  if (!(in.beta_log_base > 1.0)) throw std::invalid_argument("plan_sample_sizes: log base must exceed 1");

  const double md = static_cast<double>(p.m);
  const double dd = static_cast<double>(in.d);
  const double r2 = in.radius * in.radius / in.lambda_min;

  SamplePlan plan;
  plan.kappa = r2 / (1.0 - p.alpha);
  const RecursionSchedule sched =
      recursion_schedule_from_kappa(plan.kappa, RecursionConstants::for_subsample_size(p.m).c_stop);
  plan.depth_real = sched.depth_real;
  plan.levels = sched.levels();

  if (in.zcdp) {
    const double rho = in.zcdp->rho;
    if (!(rho > 0.0)) throw std::invalid_argument("plan_sample_sizes: rho must be positive");
    const double l = static_cast<double>(plan.levels);
    double inner = std::log(1.0 / in.xi) / in.gamma;
    if (plan.depth_real > 0.0) inner += std::sqrt(l) * std::log(l / in.xi);
    plan.n_recursive = in.const_c * md * std::sqrt(dd / rho) * inner;
  }

  plan.baseline_eta = p.alpha / (48.0 * in.baseline_const *
                                 (std::sqrt(dd) + std::sqrt(std::log(4.0 / in.xi))));
  if (in.approx) {
    const double eps = in.approx->eps;
    const double l2d = std::log(2.0 / in.approx->delta);
    const double eta = plan.baseline_eta;
    const double terms[] = {
        std::sqrt(2.0 * dd * (dd + 1.0 / (eta * eta)) / eps),
        8.0 * dd * std::sqrt(l2d) / eps,
        8.0 * l2d / eps,
        12.0 * std::sqrt(dd * l2d) / (eps * eta),
        std::log1p(std::expm1(eps) / (2.0 * in.approx->delta)) / (80.0 * eps),
    };
    plan.n_baseline = 800.0 * md * *std::max_element(std::begin(terms), std::end(terms));
    plan.baseline_m_ok = md >= 2.0 * p.beta * *plan.n_baseline / in.xi;
  }

  const double log_arg = r2 / ((1.0 + p.alpha) * md);
  if (log_arg <= 1.0) {
    plan.beta_threshold = std::numeric_limits<double>::infinity();
  } else {
    plan.beta_threshold =
        p.alpha / (4.0 * (1.0 + p.alpha) * (std::log(log_arg) / std::log(in.beta_log_base)));
  }
  plan.beta_ok = p.beta <= plan.beta_threshold;
  return plan;
}

}  // namespace privmoment
