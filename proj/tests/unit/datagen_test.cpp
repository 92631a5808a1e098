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

#include <cmath>
#include <memory>
#include <stdexcept>

#include "gtest/gtest.h"
#include "privmoment/errors.hpp"
#include "privmoment/rng.hpp"
#include "test_util.hpp"

namespace privmoment {
namespace {

double rel_dist(const SymMat& got, const SymMat& want) {
  return spectral_norm(got - want) / spectral_norm(want);
}

TEST(GaussianGenTest, ZeroCovarianceGivesZeros) {
  Rng r(1);
  const Dataset x = gen_gaussian(SymMat(3), 10, r);
  for (double v : x.points().data()) EXPECT_EQ(v, 0.0);
}

TEST(GaussianGenTest, IdentityMoment) {
  Rng r(2);
  const Dataset x = gen_gaussian(SymMat::identity(3), 100000, r);
  EXPECT_LE(rel_dist(second_moment(x), SymMat::identity(3)), 0.03);
  EXPECT_NEAR(x.radius(), x.max_norm(), 1e-9 * x.max_norm());
}

TEST(GaussianGenTest, CorrelatedMoment) {
  Rng r(3);
  const SymMat s = SymMat::from_rows({{2.0, 0.8}, {0.8, 1.0}});
  const Dataset x = gen_gaussian(s, 100000, r);
  EXPECT_LE(rel_dist(second_moment(x), s), 0.03);
}

TEST(GaussianGenTest, Reproducible) {
  Rng a(4);
  Rng b(4);
  EXPECT_EQ(gen_gaussian(SymMat::identity(2), 50, a).points(),
            gen_gaussian(SymMat::identity(2), 50, b).points());
}

TEST(EllipsoidGenTest, IdentityIsTheSphere) {
  Rng r(5);
  const Dataset x = gen_ellipsoid(SymMat::identity(4), 100, r);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(norm2(x.point(i)), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(x.radius(), 1.0);
}

TEST(EllipsoidGenTest, OnTheBoundaryWithQuarterMoment) {
  Rng r(6);
  const Dataset x = gen_ellipsoid(SymMat::diagonal({1.0, 0.25}), 100000, r);
  for (std::size_t i = 0; i < 100; ++i) {
    const auto p = x.point(i);
    EXPECT_NEAR(p[0] * p[0] + 4.0 * p[1] * p[1], 1.0, 1e-9);
  }
  // For d = 2, E[x x^T] = A / 2.
  EXPECT_LE(rel_dist(second_moment(x), SymMat::diagonal({0.5, 0.125})), 0.03);
}

TEST(EllipsoidGenTest, Rejects) {
  Rng r(7);
  EXPECT_THROW(gen_ellipsoid(SymMat::diagonal({2.0, 1.0}), 10, r), std::invalid_argument);
  EXPECT_THROW(gen_ellipsoid(SymMat::diagonal({1.0, 0.0}), 10, r), NotPositiveDefinite);
}

TEST(ParetoRadialGenTest, NormsAndMoment) {
  Rng r(8);
  const Dataset x = gen_pareto_radial(10.0, 4, 200000, r);
  EXPECT_EQ(x.radius(), 10.0);
  for (std::size_t i = 0; i < 1000; ++i) {
    const double l = norm2(x.point(i));
    EXPECT_GE(l, 1.0 - 1e-12);
    EXPECT_LE(l, 10.0 + 1e-12);
  }
  EXPECT_LE(rel_dist(second_moment(x), SymMat::identity(4, 1.66502 / 4.0)), 0.03);
}

TEST(ParetoRadialGenTest, OneDimensionHasBothSigns) {
  Rng r(9);
  const Dataset x = gen_pareto_radial(10.0, 1, 100, r);
  int neg = 0;
  for (std::size_t i = 0; i < x.size(); ++i) neg += x.point(i)[0] < 0.0;
  EXPECT_GT(neg, 20);
  EXPECT_LT(neg, 80);
}

TEST(ParetoConcatGenTest, LayoutAndMoment) {
  Rng r(10);
  const Dataset x = gen_pareto_concat(10.0, 3, 200000, r);
  ASSERT_EQ(x.dim(), 4u);
  EXPECT_NEAR(x.radius(), std::sqrt(101.0), 1e-12);
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto p = x.point(i);
    EXPECT_GE(p[0], 1.0);
    EXPECT_LE(p[0], 10.0);
    EXPECT_NEAR(p[1] * p[1] + p[2] * p[2] + p[3] * p[3], 1.0, 1e-12);
  }
  const SymMat want = SymMat::diagonal({1.66502, 1.0 / 3, 1.0 / 3, 1.0 / 3});
  EXPECT_LE(rel_dist(second_moment(x), want), 0.03);
  EXPECT_LE(rel_dist(population_second_moment(DistSpec{ParetoConcatSpec{10.0, 3}}), want), 1e-5);
}

DistSpec gaussian(SymMat s) { return DistSpec{GaussianSpec{std::move(s)}}; }

TEST(MixtureGenTest, ZeroEtaHasNoOutliers) {
  Rng r(11);
  const LabeledDataset l =
      gen_mixture(gaussian(SymMat::identity(2)), gaussian(SymMat::identity(2, 100.0)), 0.0, 1000, r);
  for (bool b : l.outlier) EXPECT_FALSE(b);
}

TEST(MixtureGenTest, OutlierCountAndMoment) {
  Rng r(12);
  const DistSpec base = gaussian(SymMat::identity(2));
  const DistSpec out = gaussian(SymMat::identity(2, 50.0));
  const LabeledDataset l = gen_mixture(base, out, 0.01, 100000, r);
  std::size_t k = 0;
  for (bool b : l.outlier) k += b;
  EXPECT_GE(k, 700u);
  EXPECT_LE(k, 1300u);
  const DistSpec mix{MixtureSpec{std::make_shared<DistSpec>(base), std::make_shared<DistSpec>(out), 0.01}};
  const SymMat want = population_second_moment(mix);
  EXPECT_LE(::privmoment::testing::max_abs_diff(want, SymMat::identity(2, 0.99 + 0.5)), 1e-12);
  EXPECT_LE(rel_dist(second_moment(l.data), want), 0.05);
}

TEST(MixtureGenTest, SampleDispatch) {
  Rng a(13);
  Rng b(13);
  const DistSpec base = gaussian(SymMat::identity(3));
  const DistSpec out = gaussian(SymMat::identity(3, 9.0));
  const DistSpec mix{MixtureSpec{std::make_shared<DistSpec>(base), std::make_shared<DistSpec>(out), 0.1}};
  EXPECT_EQ(dimension(mix), 3u);
  const LabeledDataset s = sample(mix, 200, a);
  const LabeledDataset g = gen_mixture(base, out, 0.1, 200, b);
  EXPECT_EQ(s.data.points(), g.data.points());
  EXPECT_EQ(s.outlier, g.outlier);
  const LabeledDataset plain = sample(base, 10, a);
  for (bool f : plain.outlier) EXPECT_FALSE(f);
}

TEST(PointListGenTest, DrawsListedRows) {
  Matrix pts(2, 2);
  pts(0, 0) = 3.0;
  pts(1, 1) = -2.0;
  Rng r(14);
  const LabeledDataset l = sample(DistSpec{PointListSpec{pts}}, 500, r);
  int first = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    const auto p = l.data.point(i);
    const bool a = p[0] == 3.0 && p[1] == 0.0;
    const bool b = p[0] == 0.0 && p[1] == -2.0;
    ASSERT_TRUE(a || b);
    first += a;
  }
  EXPECT_GT(first, 200);
  EXPECT_LT(first, 300);
  EXPECT_LE(::privmoment::testing::max_abs_diff(population_second_moment(DistSpec{PointListSpec{pts}}),
                         SymMat::diagonal({4.5, 2.0})),
            1e-12);
}

}  // namespace
}  // namespace privmoment
