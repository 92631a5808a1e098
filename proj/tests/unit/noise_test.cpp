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

#include <cmath>
#include <stdexcept>

#include "gtest/gtest.h"
#include "privmoment/datagen.hpp"
#include "privmoment/linalg.hpp"
#include "privmoment/rng.hpp"

namespace privmoment {
namespace {

TEST(StdNormalMatrixTest, Shape) {
  Rng r(1);
  const Matrix m = std_normal_matrix(2, 3, r);
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
}

TEST(StdNormalMatrixTest, Moments) {
  Rng r(2);
  const Matrix m = std_normal_matrix(1000, 1000, r);
  double sum = 0.0;
  double sq = 0.0;
  for (double v : m.data()) {
    sum += v;
    sq += v * v;
  }
  const double n = 1e6;
  const double mean = sum / n;
  EXPECT_GE(mean, -0.005);
  EXPECT_LE(mean, 0.005);
  const double var = sq / n - mean * mean;
  EXPECT_GE(var, 0.99);
  EXPECT_LE(var, 1.01);
}

TEST(StdNormalMatrixTest, FixedSeedTwice) {
  Rng a(3);
  Rng b(3);
  EXPECT_EQ(std_normal_matrix(7, 5, a), std_normal_matrix(7, 5, b));
}

TEST(StdNormalTest, OddLengthFill) {
  Rng a(4);
  Vector v(5);
  fill_std_normal(v, a);
  for (double x : v) EXPECT_TRUE(std::isfinite(x));
}

TEST(GueTest, ZeroVariance) {
  Rng r(1);
  EXPECT_EQ(gue_sample(4, 0.0, r), SymMat(4));
  EXPECT_THROW(gue_sample(2, -1.0, r), std::invalid_argument);
}

TEST(GueTest, ScalarVariance) {
  Rng r(5);
  double sq = 0.0;
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = gue_sample(1, 1.0, r)(0, 0);
    sum += v;
    sq += v * v;
  }
  const double var = sq / n - (sum / n) * (sum / n);
  EXPECT_GE(var, 0.98);
  EXPECT_LE(var, 1.02);
}

TEST(GueTest, DiagonalAndOffDiagonalShareVariance) {
  Rng r(6);
  const double s2 = 4.0;
  double diag = 0.0;
  double off = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const SymMat g = gue_sample(2, s2, r);
    diag += g(0, 0) * g(0, 0);
    off += g(0, 1) * g(1, 0);
  }
  EXPECT_NEAR(diag / n, s2, 0.1);
  EXPECT_NEAR(off / n, s2, 0.1);
}

TEST(GueTest, NormBound) {
  // ||N|| <= 3 sigma sqrt(d) in at least 95% of draws at d = 50.
  Rng r(7);
  int ok = 0;
  for (int i = 0; i < 200; ++i) {
    if (spectral_norm(gue_sample(50, 1.0, r)) <= 3.0 * std::sqrt(50.0)) ++ok;
  }
  EXPECT_GE(ok, 190);
}

TEST(UnitSphereTest, UnitNorm) {
  Rng r(8);
  for (std::size_t d = 1; d < 20; ++d) {
    const Vector v = unit_sphere_sample(d, r);
    EXPECT_NEAR(norm2(v), 1.0, 1e-12);
  }
  const Vector s = unit_sphere_sample(1, r);
  EXPECT_EQ(std::abs(s[0]), 1.0);
  EXPECT_THROW(unit_sphere_sample(0, r), std::invalid_argument);
}

TEST(UnitSphereTest, IsotropicSecondMoment) {
  Rng r(9);
  SymMat acc(3);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vector v = unit_sphere_sample(3, r);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = a; b < 3; ++b) acc.at(a, b) += v[a] * v[b] / n;
    }
  }
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      EXPECT_NEAR(acc(a, b), a == b ? 1.0 / 3.0 : 0.0, 0.02 / 3.0);
    }
  }
}

TEST(TlapTest, ClosedFormBound) {
  // ln(1 + (e - 1) / 0.2).
  EXPECT_NEAR(tlap_bound(1.0, 1.0, 0.1), 2.260867816817827, 1e-12);
  EXPECT_NEAR(tlap_bound(2.0, 1.0, 0.1), 2.0 * 2.260867816817827, 1e-12);
}

TEST(TlapTest, BoundDecreasesInDelta) {
  double prev = tlap_bound(1.0, 3.0, 1e-9);
  for (double delta : {1e-6, 1e-3, 0.1, 0.3, 0.49}) {
    const double b = tlap_bound(1.0, 3.0, delta);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(TlapTest, InvalidParameters) {
  Rng r(1);
  EXPECT_THROW(tlap_bound(0.0, 1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(tlap_bound(1.0, 0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(tlap_bound(1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(tlap_sample(1.0, 1.0, 0.0, r), std::invalid_argument);
}

TEST(TlapTest, SupportMeanAndShape) {
  Rng r(10);
  const double b = tlap_bound(1.0, 1.0, 0.1);
  double sum = 0.0;
  int inner = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = tlap_sample(1.0, 1.0, 0.1, r);
    ASSERT_LE(std::abs(z), b);
    sum += z;
    if (std::abs(z) <= 1.0) ++inner;
  }
  EXPECT_GE(sum / n, -0.02);
  EXPECT_LE(sum / n, 0.02);
  // P(|Z| <= 1) = (1 - e^{-1}) / (1 - e^{-B}) for the truncated law.
  const double p = (1.0 - std::exp(-1.0)) / (1.0 - std::exp(-b));
  EXPECT_NEAR(static_cast<double>(inner) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(LaplaceTest, MeanAbsoluteValue) {
  Rng r(11);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) s += std::abs(laplace_sample(2.0, r));
  EXPECT_NEAR(s / n, 2.0, 0.03);
  EXPECT_EQ(laplace_sample(0.0, r), 0.0);
}

TEST(Pareto6Test, InverseCdfPoints) {
  EXPECT_EQ(pareto6_from_uniform(10.0, 0.0), 1.0);
  EXPECT_NEAR(pareto6_from_uniform(10.0, 1.0), 10.0, 1e-9);
  // (1 - u (1 - B^{-5}))^{-1/5}, close to 2^{1/5} for B = 10.
  EXPECT_NEAR(pareto6_from_uniform(10.0, 0.5), std::pow(1.0 - 0.5 * (1.0 - 1e-5), -0.2), 1e-12);
  EXPECT_NEAR(pareto6_from_uniform(10.0, 0.5), 1.148698, 1e-5);
  EXPECT_THROW(pareto6_from_uniform(1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(pareto6_from_uniform(10.0, 1.5), std::invalid_argument);
}

TEST(Pareto6Test, MomentsAtB10) {
  Rng r(12);
  double m2 = 0.0;
  double m4 = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double l = pareto6_sample(10.0, r);
    ASSERT_GE(l, 1.0);
    ASSERT_LE(l, 10.0);
    m2 += l * l / n;
    m4 += l * l * l * l / n;
  }
  EXPECT_NEAR(m2, 1.66502, 0.02 * 1.66502);
  EXPECT_NEAR(m4, 4.50005, 0.03 * 4.50005);
}

TEST(Pareto6Test, ClosedFormMoments) {
  // (5/3) B^2 (B^3 - 1) / (B^5 - 1) and 5 B^4 (B - 1) / (B^5 - 1).
  EXPECT_NEAR(pareto6_second_moment(10.0), 1.66502, 1e-5);
  EXPECT_NEAR(pareto6_fourth_moment(10.0), 4.50005, 1e-5);
}

TEST(SamplerDeterminismTest, EqualStateEqualOutput) {
  Rng a(13);
  Rng b(13);
  EXPECT_EQ(gue_sample(5, 2.0, a), gue_sample(5, 2.0, b));
  EXPECT_EQ(unit_sphere_sample(4, a), unit_sphere_sample(4, b));
  EXPECT_EQ(tlap_sample(1.0, 1.0, 0.1, a), tlap_sample(1.0, 1.0, 0.1, b));
  EXPECT_EQ(pareto6_sample(10.0, a), pareto6_sample(10.0, b));
  EXPECT_EQ(laplace_sample(1.0, a), laplace_sample(1.0, b));
}

}  // namespace
}  // namespace privmoment
