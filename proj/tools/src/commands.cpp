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

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "dataset_io.hpp"
#include "json.hpp"
#include "privmoment/datagen.hpp"
#include "privmoment/errors.hpp"
#include "privmoment/estimators.hpp"
#include "privmoment/privacy.hpp"
#include "privmoment/subsamp.hpp"
#include "report.hpp"

namespace privmoment::cli {
namespace {

using Json = nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::optional<std::uint64_t> seed;
  std::string report_path;
};

struct GenOptions {
  std::string dist = "gaussian";
  std::vector<double> diag;
  double b = 10.0;
  std::size_t d = 0;
  std::size_t n = 0;
  double eta = 0.0;
  double outlier_scale = 0.0;
  std::size_t outlier_axis = 0;
  std::string output;
  std::string format = "text";
  std::string truth_path;
  std::string labels_path;
};

struct PlanOptions {
  std::size_t m = 0;
  double alpha = 0.5;
  double beta = 0.1;
  std::size_t d = 0;
  double gamma = 0.3;
  double xi = 0.1;
  double radius = 0.0;
  double lambda_min = 1.0;
  double const_c = 1.0;
  double baseline_const = 1.0;
  double beta_log_base = 2.0;
  std::optional<double> rho;
  std::optional<double> eps;
  std::optional<double> delta;
};

struct EstimateOptions {
  std::string data;
  double rho = 0.0;
  std::optional<double> rho_cap;
  std::size_t m = 0;
  double alpha = 0.5;
  double beta = 0.1;
  double xi = 0.1;
  double gamma = 0.3;
  std::optional<double> radius;
  double lambda_min = 1.0;
  double const_c = 1.0;
  std::string ground_truth;
  bool unsafe = false;
  bool zero_noise = false;
};

struct BaselineOptions {
  std::string data;
  double eps = 0.0;
  double delta = 0.0;
  std::optional<double> eps_cap;
  std::optional<double> delta_cap;
  std::size_t m = 0;
  double alpha = 0.5;
  double beta = 0.1;
  double xi = 0.1;
  double gamma = 0.3;
  double noise_const = 1.0;
  std::string ground_truth;
  bool unsafe = false;
  bool zero_noise = false;
};

struct EigminOptions {
  std::string data;
  double eps = 0.0;
  double delta = 0.0;
  std::optional<double> eps_cap;
  std::optional<double> delta_cap;
  std::size_t m = 0;
  double alpha = 0.5;
  double lambda_floor = 1e-9;
  std::optional<double> lambda_cap;
  bool zero_noise = false;
};

struct SubsampOptions {
  std::string data;
  std::size_t m = 0;
  double alpha = 0.5;
  std::size_t trials = 200;
  bool grid = false;
  std::optional<double> beta;
  bool unsafe = false;
};

struct BenchOptions {
  std::vector<double> etas = {0.0, 1e-3, 1e-2};
  std::vector<double> diag = {1, 1, 1, 100, 100};
  std::size_t outlier_axis = 3;
  double outlier_scale = 20.0;
  std::size_t n = 20000;
  std::size_t runs = 1;
  std::size_t m = 50;
  double alpha = 0.5;
  double rho = 1.0;
  double eps = 1.0;
  double delta = 1e-6;
  double xi = 0.1;
  double beta = 0.1;
  double gamma = 0.3;
  std::size_t jobs = 1;
  std::string table_path;
};

// ---------------------------------------------------------------------------

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t resolve_seed(const Common& c, const RunEnv& env, Report& report) {
  if (c.seed) {
    report.set("seed", *c.seed);
    report.set("seed_source", "flag");
    return *c.seed;
  }
  if (env.env_seed) {
    std::uint64_t v = 0;
    const std::string& s = *env.env_seed;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw UsageError("PRIVMOMENT_SEED is not an unsigned integer: '" + s + "'");
    }
    report.set("seed", v);
    report.set("seed_source", "env");
    return v;
  }
  report.set("seed", std::uint64_t{0});
  report.set("seed_source", "default");
  return 0;
}

void check_cap(const char* name, double value, const std::optional<double>& cap) {
  if (cap && value > *cap) {
    throw UsageError(std::string("requested ") + name + " " + format_number(value) +
                     " exceeds the cap " + format_number(*cap));
  }
}

SymMat diag_matrix(const std::vector<double>& diag, const char* flag) {
  if (diag.empty()) throw UsageError(std::string(flag) + " is required for this distribution");
  return SymMat::diagonal(std::span<const double>(diag));
}

SymMat read_truth(const std::string& path, std::size_t d) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open ground-truth file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw UsageError("ground-truth file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.contains("second_moment") || !j["second_moment"].is_array()) {
    throw UsageError("ground-truth file lacks a 'second_moment' array");
  }
  const auto& rows = j["second_moment"];
  if (rows.size() != d) throw UsageError("ground-truth dimension does not match the dataset");
  Matrix dense(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!rows[i].is_array() || rows[i].size() != d) {
      throw UsageError("ground-truth row " + std::to_string(i) + " has the wrong length");
    }
    for (std::size_t k = 0; k < d; ++k) dense(i, k) = rows[i][k].get<double>();
  }
  return SymMat::from_dense(dense, 1e-12 * std::max(1.0, std::abs(dense(0, 0))));
}

void write_truth(const std::string& path, const SymMat& s) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < s.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < s.dim(); ++k) row.push_back(s(i, k));
    rows.push_back(row);
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << Json{{"d", s.dim()}, {"second_moment", rows}}.dump() << "\n";
}

// Ground truth is a JSON file from `gen --truth` or the literal "empirical".
SymMat resolve_truth(const std::string& spec, const Dataset& ds) {
  if (spec == "empirical") return second_moment(ds);
  return read_truth(spec, ds.dim());
}

void report_metrics(Report& r, const ErrorMetrics& m, const std::string& prefix) {
  r.set(prefix + ".gamma", m.gamma);
  r.set(prefix + ".rel_spectral_error", m.rel_spectral_error);
  r.set(prefix + ".spectral_dist", m.spectral_dist);
  r.set(prefix + ".loewner_lower", m.loewner_lower);
  r.set(prefix + ".loewner_upper", m.loewner_upper);
  r.set(prefix + ".loewner_check", (m.loewner_lower && m.loewner_upper) ? "pass" : "fail");
}

void report_plan(Report& r, const SamplePlan& plan) {
  r.set("plan.depth_real", plan.depth_real);
  r.set("plan.levels", static_cast<std::uint64_t>(plan.levels));
  r.set("plan.kappa", plan.kappa);
  if (plan.n_recursive) r.set("plan.n_recursive", *plan.n_recursive);
  if (plan.n_baseline) {
    r.set("plan.n_baseline", *plan.n_baseline);
    r.set("plan.baseline_m_ok", plan.baseline_m_ok);
  }
  r.set("plan.baseline_eta", plan.baseline_eta);
  r.set("plan.beta_threshold", plan.beta_threshold);
  r.set("plan.beta_ok", plan.beta_ok);
}

Dataset load(const std::string& path, const std::optional<double>& radius) {
  Dataset ds = read_dataset(path);
  if (!radius) return ds;
  try {
    return Dataset(ds.points(), *radius);
  } catch (const std::invalid_argument&) {
    throw UsageError("--radius is smaller than a point norm in the dataset");
  }
}

// ---------------------------------------------------------------------------

DistSpec make_spec(const GenOptions& o) {
  if (o.dist == "gaussian") return {GaussianSpec{diag_matrix(o.diag, "--diag")}};
  if (o.dist == "ellipsoid") return {EllipsoidSpec{diag_matrix(o.diag, "--diag")}};
  if (o.dist == "pareto-radial" || o.dist == "pareto-concat") {
    if (o.d == 0) throw UsageError("--d is required for " + o.dist);
    if (o.dist == "pareto-radial") return {ParetoRadialSpec{o.b, o.d}};
    return {ParetoConcatSpec{o.b, o.d}};
  }
  // mixture: Gaussian bulk plus outliers at +-scale * e_axis.
  const SymMat base = diag_matrix(o.diag, "--diag");
  if (o.outlier_axis >= base.dim()) throw UsageError("--outlier-axis is out of range");
  Matrix pts(2, base.dim());
  pts(0, o.outlier_axis) = o.outlier_scale;
  pts(1, o.outlier_axis) = -o.outlier_scale;
  return {MixtureSpec{std::make_shared<DistSpec>(DistSpec{GaussianSpec{base}}),
                      std::make_shared<DistSpec>(DistSpec{PointListSpec{pts}}), o.eta}};
}

int cmd_gen(const GenOptions& o, const Rng& rng, Report& r) {
  const DistSpec spec = make_spec(o);
  Rng stream = rng.split("gen");
  LabeledDataset out = sample(spec, o.n, stream);
  write_dataset(out.data, o.output, o.format == "binary" ? FileFormat::kBinary : FileFormat::kText);
  r.set("dist", o.dist);
  r.set("d", static_cast<std::uint64_t>(out.data.dim()));
  r.set("n", static_cast<std::uint64_t>(out.data.size()));
  r.set("radius", out.data.radius());
  r.set("output", o.output);
  r.set("format", o.format);
  if (o.dist == "mixture") {
    r.set("outliers", static_cast<std::uint64_t>(
                          std::count(out.outlier.begin(), out.outlier.end(), true)));
  }
  if (!o.truth_path.empty()) {
    write_truth(o.truth_path, population_second_moment(spec));
    r.set("truth", o.truth_path);
  }
  if (!o.labels_path.empty()) {
    std::ofstream lf(o.labels_path);
    if (!lf) throw UsageError("cannot write '" + o.labels_path + "'");
    for (bool b : out.outlier) lf << (b ? 1 : 0) << "\n";
    r.set("labels", o.labels_path);
  }
  return kExitOk;
}

int cmd_plan(const PlanOptions& o, Report& r) {
  const bool zc = o.rho.has_value();
  const bool ap = o.eps.has_value() || o.delta.has_value();
  if (zc == ap) throw UsageError("give exactly one budget family: --rho, or --eps with --delta");
  if (ap && !(o.eps && o.delta)) throw UsageError("--eps and --delta must be given together");
  PlanInputs in{SubsampParams(o.m, o.alpha, o.beta), o.d, std::nullopt, std::nullopt, o.gamma, o.xi,
                o.radius};
  if (zc) in.zcdp = ZcdpBudget(*o.rho);
  if (ap) in.approx = ApproxDpBudget(*o.eps, *o.delta);
  in.lambda_min = o.lambda_min;
  in.const_c = o.const_c;
  in.baseline_const = o.baseline_const;
  in.beta_log_base = o.beta_log_base;
  report_plan(r, plan_sample_sizes(in));
  return kExitOk;
}

int cmd_estimate(const EstimateOptions& o, const Rng& rng, Report& r) {
  check_cap("rho", o.rho, o.rho_cap);
  const Dataset ds = load(o.data, o.radius);
  const Dataset work = o.lambda_min == 1.0 ? ds : precondition(ds, o.lambda_min);

  RecOptions opts;
  opts.zero_noise = o.zero_noise;
  opts.diagnostics = o.unsafe;
  const EstimateReport rep = dpsme(work, o.xi, o.rho, o.m, o.alpha, rng.split("estimate"), opts);
  const SymMat sigma_hat = o.lambda_min * rep.sigma_hat;

  r.set("estimator", "recursive");
  r.set("status", "ok");
  r.set("n", static_cast<std::uint64_t>(ds.size()));
  r.set("d", static_cast<std::uint64_t>(ds.dim()));
  r.set("radius", ds.radius());
  r.set("lambda_min", o.lambda_min);
  r.set("force_zero_noise", o.zero_noise);
  r.set_matrix("sigma_hat", sigma_hat);
  r.set_ledger("ledger", rep.ledger);

  PlanInputs in{SubsampParams(o.m, o.alpha, o.beta), ds.dim(), ZcdpBudget(o.rho), std::nullopt,
                o.gamma, o.xi, ds.radius()};
  in.lambda_min = o.lambda_min;
  in.const_c = o.const_c;
  report_plan(r, plan_sample_sizes(in));

  const auto& levels = rep.trace->levels;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const LevelRecord& lv = levels[l];
    const std::string k = "trace.level." + std::to_string(l);
    r.set(k + ".kappa", lv.kappa);
    r.set(k + ".radius", lv.radius);
    r.set(k + ".sigma", lv.sigma);
    r.set(k + ".noise_norm", lv.noise_norm);
    r.set(k + ".event_e", lv.event_e);
    r.set(k + ".terminal", lv.terminal);
    r.set(k + ".subspace_dim", static_cast<std::uint64_t>(lv.subspace_dim));
    if (o.unsafe) r.set(k + ".shrunk", static_cast<std::uint64_t>(lv.shrunk));
  }

  if (!o.ground_truth.empty()) {
    const SymMat truth = resolve_truth(o.ground_truth, ds);
    const SymMat eff = sigma_eff(ds, p_tail(ds, o.m, o.alpha));
    report_metrics(r, error_metrics(truth, sigma_hat, o.gamma, &eff), "metrics");
  }
  return kExitOk;
}

int cmd_baseline(const BaselineOptions& o, const Rng& rng, Report& r) {
  check_cap("eps", o.eps, o.eps_cap);
  check_cap("delta", o.delta, o.delta_cap);
  const Dataset ds = read_dataset(o.data);
  BaselineParams p;
  p.m = o.m;
  p.alpha = o.alpha;
  p.beta = o.beta;
  p.xi = o.xi;
  p.eps = o.eps;
  p.delta = o.delta;
  p.noise_const = o.noise_const;
  p.zero_noise = o.zero_noise;
  const BaselineOutcome outcome = baseline_estimate(ds, p, rng.split("baseline"));

  r.set("estimator", "baseline");
  r.set("n", static_cast<std::uint64_t>(ds.size()));
  r.set("d", static_cast<std::uint64_t>(ds.dim()));
  r.set("force_zero_noise", o.zero_noise);
  const auto report_info = [&](const BaselineInfo& info) {
    r.set("groups", static_cast<std::uint64_t>(info.groups));
    r.set("q_noisy", info.q_noisy);
    r.set("abort.threshold", info.threshold);
    r.set("abort.base", 0.8);
    r.set("abort.slack", info.threshold - 0.8);
    r.set("abort.eps", o.eps);
    r.set("abort.delta", o.delta);
    r.set("eta", info.eta);
    if (o.unsafe) {
      r.set("unsafe.q_mean", info.q_mean);
      r.set("unsafe.weight_total", info.weight_total);
    }
  };

  if (const auto* f = std::get_if<BaselineFailure>(&outcome)) {
    r.set("status", "failure");
    r.set("reason", f->failure.reason);
    report_info(f->info);
    r.set_ledger("ledger", f->failure.ledger);
    return kExitFailure;
  }
  const auto& ok = std::get<BaselineReport>(outcome);
  r.set("status", "ok");
  report_info(ok.info);
  r.set_matrix("sigma_hat", ok.estimate.sigma_hat);
  r.set_ledger("ledger", ok.estimate.ledger);
  if (!o.ground_truth.empty()) {
    const SymMat truth = resolve_truth(o.ground_truth, ds);
    report_metrics(r, error_metrics(truth, ok.estimate.sigma_hat, o.gamma), "metrics");
  }
  return kExitOk;
}

int cmd_eigmin(const EigminOptions& o, const Rng& rng, Report& r) {
  check_cap("eps", o.eps, o.eps_cap);
  check_cap("delta", o.delta, o.delta_cap);
  const Dataset ds = read_dataset(o.data);
  EigminParams p;
  p.m = o.m;
  p.alpha = o.alpha;
  p.eps = o.eps;
  p.delta = o.delta;
  p.lambda_floor = o.lambda_floor;
  p.lambda_cap = o.lambda_cap;
  p.zero_noise = o.zero_noise;
  const EigminOutcome outcome = dp_min_eigenvalue(ds, p, rng.split("eigmin"));
  r.set("estimator", "eigmin");
  r.set("force_zero_noise", o.zero_noise);
  r.set("stability_threshold", stability_threshold(o.eps, o.delta));
  if (const auto* f = std::get_if<Failure>(&outcome)) {
    r.set("status", "failure");
    r.set("reason", f->reason);
    for (const auto& [k, v] : f->details) r.set("detail." + k, v);
    r.set_ledger("ledger", f->ledger);
    return kExitFailure;
  }
  const auto& ok = std::get<EigminReport>(outcome);
  r.set("status", "ok");
  r.set("lambda_min", ok.lambda);
  r.set("bucket.lower", ok.bucket.lower);
  r.set("bucket.upper", ok.bucket.upper);
  r.set("bucket.noisy_count", ok.noisy_count);
  r.set("groups", static_cast<std::uint64_t>(ok.groups));
  r.set("released_buckets", static_cast<std::uint64_t>(ok.released.size()));
  r.set_ledger("ledger", ok.ledger);
  return kExitOk;
}

int cmd_check_subsamp(const SubsampOptions& o, const Rng& rng, Report& r) {
  const Dataset ds = read_dataset(o.data);
  const Rng stream = rng.split("check-subsamp");
  std::vector<SubsampEstimate> ests;
  if (o.grid) {
    ests = empirical_subsamplability_grid(ds, o.m, o.alpha, o.trials, stream);
  } else {
    ests.push_back(empirical_subsamplability(ds, o.m, o.alpha, o.trials, stream));
  }
  bool all_ok = true;
  for (std::size_t i = 0; i < ests.size(); ++i) {
    const auto& e = ests[i];
    const std::string k = "subsamp." + std::to_string(i);
    r.set(k + ".m", static_cast<std::uint64_t>(e.m));
    r.set(k + ".trials", static_cast<std::uint64_t>(e.trials));
    r.set(k + ".failures", static_cast<std::uint64_t>(e.failures));
    r.set(k + ".rate", e.rate);
    r.set(k + ".wilson_low", e.wilson_low);
    r.set(k + ".wilson_high", e.wilson_high);
    if (o.beta) all_ok = all_ok && e.rate <= *o.beta;
  }
  if (o.beta) r.set("subsamplable_at_beta", all_ok);
  const TailReport tail = p_tail(ds, o.m, o.alpha);
  r.set("tail.count", static_cast<std::uint64_t>(tail.indices.size()));
  r.set("tail.fraction", tail.fraction);
  r.set("tail.threshold", tail.threshold);
  if (o.unsafe) {
    std::string idx;
    for (std::size_t i : tail.indices) idx += (idx.empty() ? "" : " ") + std::to_string(i);
    r.set("unsafe.tail_indices", idx);
  }
  return kExitOk;
}

struct BenchRow {
  std::size_t cell;
  double eta;
  std::size_t run;
  std::string estimator;
  std::string outcome;
  std::optional<ErrorMetrics> metrics;
};

std::vector<BenchRow> bench_cell(const BenchOptions& o, std::size_t cell, double eta,
                                 std::size_t run, const Rng& cell_rng) {
  const SymMat base = SymMat::diagonal(std::span<const double>(o.diag));
  Matrix pts(2, base.dim());
  pts(0, o.outlier_axis) = o.outlier_scale;
  pts(1, o.outlier_axis) = -o.outlier_scale;
  const DistSpec spec{MixtureSpec{std::make_shared<DistSpec>(DistSpec{GaussianSpec{base}}),
                                  std::make_shared<DistSpec>(DistSpec{PointListSpec{pts}}), eta}};
  Rng data_rng = cell_rng.split("data");
  const LabeledDataset data = sample(spec, o.n, data_rng);
  const SymMat truth = population_second_moment(spec);
  const SymMat eff = sigma_eff(data.data, p_tail(data.data, o.m, o.alpha));

  std::vector<BenchRow> rows;
  const EstimateReport rec = dpsme(data.data, o.xi, o.rho, o.m, o.alpha, cell_rng.split("recursive"));
  rows.push_back({cell, eta, run, "recursive", "ok", error_metrics(truth, rec.sigma_hat, o.gamma, &eff)});

  BaselineParams p;
  p.m = o.m;
  p.alpha = o.alpha;
  p.beta = o.beta;
  p.xi = o.xi;
  p.eps = o.eps;
  p.delta = o.delta;
  const BaselineOutcome b = baseline_estimate(data.data, p, cell_rng.split("baseline"));
  if (const auto* ok = std::get_if<BaselineReport>(&b)) {
    rows.push_back({cell, eta, run, "baseline", "ok",
                    error_metrics(truth, ok->estimate.sigma_hat, o.gamma, &eff)});
  } else {
    rows.push_back({cell, eta, run, "baseline", "failure", std::nullopt});
  }
  return rows;
}

int cmd_bench(const BenchOptions& o, const Rng& rng, Report& r) {
  if (o.diag.empty()) throw UsageError("--diag must not be empty");
  if (o.outlier_axis >= o.diag.size()) throw UsageError("--outlier-axis is out of range");
  if (o.runs == 0 || o.jobs == 0) throw UsageError("--runs and --jobs must be positive");
  const std::size_t cells = o.etas.size() * o.runs;
  std::vector<std::vector<BenchRow>> results(cells);
  std::vector<std::exception_ptr> errors(cells);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      try {
        const double eta = o.etas[c / o.runs];
        results[c] = bench_cell(o, c, eta, c % o.runs, rng.split("bench").split(c));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t jobs = std::min(o.jobs, cells);
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::ostringstream csv;
  csv << "cell,eta,run,n,d,estimator,outcome,rel_spectral_error,spectral_dist,loewner_lower,"
         "loewner_upper\n";
  r.set("bench.cells", static_cast<std::uint64_t>(cells));
  for (const auto& rows : results) {
    for (const auto& row : rows) {
      csv << row.cell << ',' << format_number(row.eta) << ',' << row.run << ',' << o.n << ','
          << o.diag.size() << ',' << row.estimator << ',' << row.outcome;
      const std::string k = "bench.cell." + std::to_string(row.cell) + "." + row.estimator;
      r.set(k + ".eta", row.eta);
      r.set(k + ".outcome", row.outcome);
      if (row.metrics) {
        csv << ',' << format_number(row.metrics->rel_spectral_error) << ','
            << format_number(row.metrics->spectral_dist) << ','
            << (row.metrics->loewner_lower ? 1 : 0) << ',' << (row.metrics->loewner_upper ? 1 : 0);
        r.set(k + ".rel_spectral_error", row.metrics->rel_spectral_error);
        r.set(k + ".spectral_dist", row.metrics->spectral_dist);
      } else {
        csv << ",,,,";
      }
      csv << '\n';
    }
  }
  if (!o.table_path.empty()) {
    std::ofstream out(o.table_path);
    if (!out) throw UsageError("cannot write '" + o.table_path + "'");
    out << csv.str();
    r.set("bench.table", o.table_path);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const RunEnv& env) {
  CLI::App app{"Differentially private second-moment estimation", "privmoment"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "RNG seed (falls back to PRIVMOMENT_SEED, then 0)");
  app.add_option("--report", common.report_path, "Write the report here instead of stdout");

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic dataset");
  g->add_option("--dist", gen.dist, "Distribution")
      ->check(CLI::IsMember({"gaussian", "ellipsoid", "pareto-radial", "pareto-concat", "mixture"}));
  g->add_option("--diag", gen.diag, "Diagonal of Sigma (gaussian, mixture bulk) or A (ellipsoid)")
      ->delimiter(',');
  g->add_option("--b", gen.b, "Pareto truncation B");
  g->add_option("--d", gen.d, "Dimension for the Pareto families");
  g->add_option("--n", gen.n, "Number of points")->required()->check(CLI::PositiveNumber);
  g->add_option("--eta", gen.eta, "Outlier probability (mixture)");
  g->add_option("--outlier-scale", gen.outlier_scale, "Outliers sit at +-scale * e_axis");
  g->add_option("--outlier-axis", gen.outlier_axis, "Coordinate axis of the outliers");
  g->add_option("--output", gen.output, "Dataset path")->required();
  g->add_option("--format", gen.format, "text or binary")->check(CLI::IsMember({"text", "binary"}));
  g->add_option("--truth", gen.truth_path, "Write the population second moment (JSON)");
  g->add_option("--labels", gen.labels_path, "Write outlier labels, one 0/1 per line");

  PlanOptions plan;
  auto* pl = app.add_subcommand("plan", "Sample sizes and the beta condition");
  pl->add_option("--m", plan.m, "Subsample size")->required();
  pl->add_option("--alpha", plan.alpha);
  pl->add_option("--beta", plan.beta);
  pl->add_option("--d", plan.d, "Dimension")->required();
  pl->add_option("--gamma", plan.gamma);
  pl->add_option("--xi", plan.xi);
  pl->add_option("--radius", plan.radius, "Norm bound R")->required();
  pl->add_option("--lambda-min", plan.lambda_min);
  pl->add_option("--const-c", plan.const_c);
  pl->add_option("--baseline-const", plan.baseline_const);
  pl->add_option("--beta-log-base", plan.beta_log_base);
  pl->add_option("--rho", plan.rho);
  pl->add_option("--eps", plan.eps);
  pl->add_option("--delta", plan.delta);

  EstimateOptions est;
  auto* es = app.add_subcommand("estimate", "Recursive estimator under rho-zCDP");
  es->add_option("--data", est.data)->required();
  es->add_option("--rho", est.rho)->required();
  es->add_option("--rho-cap", est.rho_cap, "Refuse budgets above this");
  es->add_option("--m", est.m)->required();
  es->add_option("--alpha", est.alpha);
  es->add_option("--beta", est.beta);
  es->add_option("--xi", est.xi);
  es->add_option("--gamma", est.gamma);
  es->add_option("--radius", est.radius, "Override the file's radius");
  es->add_option("--lambda-min", est.lambda_min, "Preconditioning estimate");
  es->add_option("--const-c", est.const_c);
  es->add_option("--ground-truth", est.ground_truth, "Truth JSON or 'empirical' (test mode)");
  es->add_flag("--unsafe-diagnostics", est.unsafe, "Report raw-data-dependent fields");
  es->add_flag("--force-zero-noise", est.zero_noise, "Disable all noise (testing only)");

  BaselineOptions base;
  auto* ba = app.add_subcommand("baseline", "Subsample-and-aggregate estimator");
  ba->add_option("--data", base.data)->required();
  ba->add_option("--eps", base.eps)->required();
  ba->add_option("--delta", base.delta)->required();
  ba->add_option("--eps-cap", base.eps_cap);
  ba->add_option("--delta-cap", base.delta_cap);
  ba->add_option("--m", base.m)->required();
  ba->add_option("--alpha", base.alpha);
  ba->add_option("--beta", base.beta);
  ba->add_option("--xi", base.xi);
  ba->add_option("--gamma", base.gamma);
  ba->add_option("--noise-const", base.noise_const);
  ba->add_option("--ground-truth", base.ground_truth);
  ba->add_flag("--unsafe-diagnostics", base.unsafe);
  ba->add_flag("--force-zero-noise", base.zero_noise);

  EigminOptions eig;
  auto* em = app.add_subcommand("eigmin", "Private minimum-eigenvalue estimate");
  em->add_option("--data", eig.data)->required();
  em->add_option("--eps", eig.eps)->required();
  em->add_option("--delta", eig.delta)->required();
  em->add_option("--eps-cap", eig.eps_cap);
  em->add_option("--delta-cap", eig.delta_cap);
  em->add_option("--m", eig.m)->required();
  em->add_option("--alpha", eig.alpha);
  em->add_option("--lambda-floor", eig.lambda_floor);
  em->add_option("--lambda-cap", eig.lambda_cap);
  em->add_flag("--force-zero-noise", eig.zero_noise);

  SubsampOptions sub;
  auto* cs = app.add_subcommand("check-subsamp", "Monte-Carlo subsamplability test (not private)");
  cs->add_option("--data", sub.data)->required();
  cs->add_option("--m", sub.m)->required();
  cs->add_option("--alpha", sub.alpha);
  cs->add_option("--trials", sub.trials);
  cs->add_flag("--grid", sub.grid, "Also test 2m and 4m");
  cs->add_option("--beta", sub.beta);
  cs->add_flag("--unsafe-diagnostics", sub.unsafe);

  BenchOptions bench;
  auto* bn = app.add_subcommand("bench", "Recursive vs baseline over an outlier sweep");
  bn->add_option("--etas", bench.etas)->delimiter(',');
  bn->add_option("--diag", bench.diag)->delimiter(',');
  bn->add_option("--outlier-axis", bench.outlier_axis);
  bn->add_option("--outlier-scale", bench.outlier_scale);
  bn->add_option("--n", bench.n);
  bn->add_option("--runs", bench.runs);
  bn->add_option("--m", bench.m);
  bn->add_option("--alpha", bench.alpha);
  bn->add_option("--rho", bench.rho);
  bn->add_option("--eps", bench.eps);
  bn->add_option("--delta", bench.delta);
  bn->add_option("--xi", bench.xi);
  bn->add_option("--beta", bench.beta);
  bn->add_option("--gamma", bench.gamma);
  bn->add_option("--jobs", bench.jobs);
  bn->add_option("--table", bench.table_path, "CSV output path");

  std::vector<const char*> argv;
  argv.push_back("privmoment");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Report report;
  int code = kExitUsage;
  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    report.set("command", cmd);
    const Rng rng(resolve_seed(common, env, report));
    if (cmd == "gen") code = cmd_gen(gen, rng, report);
    if (cmd == "plan") code = cmd_plan(plan, report);
    if (cmd == "estimate") code = cmd_estimate(est, rng, report);
    if (cmd == "baseline") code = cmd_baseline(base, rng, report);
    if (cmd == "eigmin") code = cmd_eigmin(eig, rng, report);
    if (cmd == "check-subsamp") code = cmd_check_subsamp(sub, rng, report);
    if (cmd == "bench") code = cmd_bench(bench, rng, report);
  } catch (const DatasetFormatError& e) {
    err << "privmoment: data error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "privmoment: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "privmoment: invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "privmoment: error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::optional<std::string> ts =
      env.timestamp ? std::optional<std::string>(utc_timestamp()) : std::nullopt;
  const std::string text = report.render(ts);
  if (common.report_path.empty()) {
    out << text;
  } else {
    std::ofstream f(common.report_path);
    if (!f) {
      err << "privmoment: cannot write report '" << common.report_path << "'\n";
      return kExitUsage;
    }
    f << text;
  }
  return code;
}

}  // namespace privmoment::cli
