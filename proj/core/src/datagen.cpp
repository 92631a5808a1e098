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

#include "privmoment/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "privmoment/errors.hpp"
#include "privmoment/noise.hpp"

namespace privmoment {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Applies a symmetric matrix to d-vectors drawn by `draw` and stores them.
template <class Draw>
Matrix transformed_rows(const SymMat& root, std::size_t n, Draw&& draw) {
  const std::size_t d = root.dim();
  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector z = draw();
    const Vector x = multiply(root, z);
    std::copy(x.begin(), x.end(), out.row(i).begin());
  }
  return out;
}

double max_row_norm(const Matrix& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) r = std::max(r, norm2(m.row(i)));
  return r;
}

}  // namespace

Dataset gen_gaussian(const SymMat& sigma, std::size_t n, Rng& rng) {
  require(n >= 1 && sigma.dim() >= 1, "gen_gaussian: empty request");
  const SymMat root = sqrt_psd(sigma);
  const std::size_t d = sigma.dim();
  Matrix pts = transformed_rows(root, n, [&] {
    Vector z(d);
    fill_std_normal(z, rng);
    return z;
  });
  const double r = max_row_norm(pts);
  return Dataset(std::move(pts), r);
}

Dataset gen_ellipsoid(const SymMat& a, std::size_t n, Rng& rng) {
  require(n >= 1 && a.dim() >= 1, "gen_ellipsoid: empty request");
  const EigenDecomp e = eig_sym(a);
  if (!(e.values.back() > rank_tolerance(a))) {
    throw NotPositiveDefinite("gen_ellipsoid: A must be positive definite");
  }
  if (e.values.front() > 1.0 + psd_tolerance(a)) {
    throw std::invalid_argument("gen_ellipsoid: A must satisfy A <= I");
  }
  const SymMat root = spectral_map(e, [](double v) { return std::sqrt(v); });
  const std::size_t d = a.dim();
  Matrix pts = transformed_rows(root, n, [&] { return unit_sphere_sample(d, rng); });
  const double r = std::max(std::sqrt(e.values.front()), max_row_norm(pts));
  return Dataset(std::move(pts), r);
}

Dataset gen_pareto_radial(double b, std::size_t d, std::size_t n, Rng& rng) {
  require(b > 1.0 && std::isfinite(b), "gen_pareto_radial: B must exceed 1");
  require(n >= 1 && d >= 1, "gen_pareto_radial: empty request");
  Matrix pts(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = pareto6_sample(b, rng);
    const Vector v = unit_sphere_sample(d, rng);
    auto row = pts.row(i);
    for (std::size_t j = 0; j < d; ++j) row[j] = lambda * v[j];
  }
  // Rounding in lambda v stays within the Dataset radius slack.
  return Dataset(std::move(pts), b);
}

Dataset gen_pareto_concat(double b, std::size_t d, std::size_t n, Rng& rng) {
  require(b > 1.0 && std::isfinite(b), "gen_pareto_concat: B must exceed 1");
  require(n >= 1 && d >= 1, "gen_pareto_concat: empty request");
  Matrix pts(n, d + 1);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = pts.row(i);
    row[0] = pareto6_sample(b, rng);
    const Vector v = unit_sphere_sample(d, rng);
    std::copy(v.begin(), v.end(), row.begin() + 1);
  }
  return Dataset(std::move(pts), std::sqrt(b * b + 1.0));
}

LabeledDataset gen_mixture(const DistSpec& base, const DistSpec& outlier, double eta,
                           std::size_t n, Rng& rng) {
  require(eta >= 0.0 && eta < 1.0, "gen_mixture: eta must lie in [0, 1)");
  require(n >= 1, "gen_mixture: empty request");
  const std::size_t d = dimension(base);
  require(dimension(outlier) == d, "gen_mixture: component dimensions differ");

  Rng labels_rng = rng.split("mixture/labels");
  std::vector<bool> labels(n, false);
  std::size_t n_out = 0;
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = labels_rng.uniform() < eta;
    n_out += labels[i] ? 1 : 0;
  }
  const std::size_t n_base = n - n_out;

  Matrix pts(n, d);
  double radius = 0.0;
  std::size_t ib = 0;
  std::size_t io = 0;
  std::optional<Dataset> base_pts;
  std::optional<Dataset> out_pts;
  if (n_base > 0) {
    Rng r = rng.split("mixture/base");
    base_pts = sample(base, n_base, r).data;
    radius = std::max(radius, base_pts->radius());
  }
  if (n_out > 0) {
    Rng r = rng.split("mixture/outlier");
    out_pts = sample(outlier, n_out, r).data;
    radius = std::max(radius, out_pts->radius());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = labels[i] ? out_pts->point(io++) : base_pts->point(ib++);
    std::copy(src.begin(), src.end(), pts.row(i).begin());
  }
  return {Dataset(std::move(pts), radius), std::move(labels)};
}

LabeledDataset sample(const DistSpec& spec, std::size_t n, Rng& rng) {
  const auto unlabeled = [n](Dataset ds) {
    return LabeledDataset{std::move(ds), std::vector<bool>(n, false)};
  };
  return std::visit(
      Overloaded{
          [&](const GaussianSpec& s) { return unlabeled(gen_gaussian(s.sigma, n, rng)); },
          [&](const EllipsoidSpec& s) { return unlabeled(gen_ellipsoid(s.a, n, rng)); },
          [&](const ParetoRadialSpec& s) {
            return unlabeled(gen_pareto_radial(s.b, s.d, n, rng));
          },
          [&](const ParetoConcatSpec& s) {
            return unlabeled(gen_pareto_concat(s.b, s.d, n, rng));
          },
          [&](const PointListSpec& s) {
            require(s.points.rows() >= 1, "sample: empty point list");
            require(n >= 1, "sample: empty request");
            const std::size_t k = s.points.rows();
            Matrix pts(n, s.points.cols());
            for (std::size_t i = 0; i < n; ++i) {
              const std::size_t pick =
                  std::min(k - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(k)));
              const auto src = s.points.row(pick);
              std::copy(src.begin(), src.end(), pts.row(i).begin());
            }
            return unlabeled(Dataset(std::move(pts), max_row_norm(s.points)));
          },
          [&](const MixtureSpec& s) {
            require(s.base && s.outlier, "sample: mixture component missing");
            return gen_mixture(*s.base, *s.outlier, s.eta, n, rng);
          },
      },
      spec.v);
}

std::size_t dimension(const DistSpec& spec) {
  return std::visit(Overloaded{
                        [](const GaussianSpec& s) { return s.sigma.dim(); },
                        [](const EllipsoidSpec& s) { return s.a.dim(); },
                        [](const ParetoRadialSpec& s) { return s.d; },
                        [](const ParetoConcatSpec& s) { return s.d + 1; },
                        [](const PointListSpec& s) { return s.points.cols(); },
                        [](const MixtureSpec& s) { return dimension(*s.base); },
                    },
                    spec.v);
}

SymMat population_second_moment(const DistSpec& spec) {
  return std::visit(
      Overloaded{
          [](const GaussianSpec& s) { return s.sigma; },
          [](const EllipsoidSpec& s) { return (1.0 / static_cast<double>(s.a.dim())) * s.a; },
          [](const ParetoRadialSpec& s) {
            return SymMat::identity(s.d, pareto6_second_moment(s.b) / static_cast<double>(s.d));
          },
          [](const ParetoConcatSpec& s) {
            SymMat m = SymMat::identity(s.d + 1, 1.0 / static_cast<double>(s.d));
            m.at(0, 0) = pareto6_second_moment(s.b);
            return m;
          },
          [](const PointListSpec& s) { return second_moment(s.points); },
          [](const MixtureSpec& s) {
            return (1.0 - s.eta) * population_second_moment(*s.base) +
                   s.eta * population_second_moment(*s.outlier);
          },
      },
      spec.v);
}

namespace {
// integral_1^B x^{k-6} dx / integral_1^B x^{-6} dx for k = 2, 4.
double pareto6_normalizer(double b) { return (1.0 - std::pow(b, -5.0)) / 5.0; }
}  // namespace

double pareto6_second_moment(double b) {
  require(b > 1.0, "pareto6_second_moment: B must exceed 1");
  return ((1.0 - std::pow(b, -3.0)) / 3.0) / pareto6_normalizer(b);
}

double pareto6_fourth_moment(double b) {
  require(b > 1.0, "pareto6_fourth_moment: B must exceed 1");
  return (1.0 - 1.0 / b) / pareto6_normalizer(b);
}

}  // namespace privmoment
