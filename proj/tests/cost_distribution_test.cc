// Copyright 2026 The JSAM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jsam/cost_distribution.h"

#include <cmath>
#include <functional>
#include <numbers>

#include "gtest/gtest.h"

namespace jsam {
namespace {

// Adaptive Simpson quadrature, used as an oracle for the gaussian cdf.
double Simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb, double whole, double tol,
               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return Simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         Simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double Integrate(const std::function<double(double)>& f, double a, double b) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return Simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb),
                 1e-14, 50);
}

double GaussianKernel(double x, double mean, double stddev) {
  const double z = (x - mean) / stddev;
  return std::exp(-0.5 * z * z);
}

TEST(VirtualCostTest, UniformIsTwiceCostMinusLower) {
  auto dist = CostDistribution::Uniform(0.0, 1.0);
  ASSERT_TRUE(dist.ok());
  EXPECT_DOUBLE_EQ(*VirtualCost(0.3, *dist), 0.6);
  EXPECT_DOUBLE_EQ(*VirtualCost(0.0, *dist), 0.0);
  auto shifted = CostDistribution::Uniform(0.5, 2.0);
  ASSERT_TRUE(shifted.ok());
  EXPECT_DOUBLE_EQ(*VirtualCost(1.25, *shifted), 2.0);
}

TEST(VirtualCostTest, TruncatedGaussianMatchesQuadratureOracle) {
  const double mean = 0.5;
  const double stddev = 0.2;
  auto dist = CostDistribution::TruncatedGaussian(mean, stddev, 0.0, 1.0);
  ASSERT_TRUE(dist.ok());
  auto kernel = [&](double x) { return GaussianKernel(x, mean, stddev); };
  const double mass = Integrate(kernel, 0.0, 1.0);
  for (double c : {0.05, 0.3, 0.5, 0.7, 0.95}) {
    const double cdf = Integrate(kernel, 0.0, c) / mass;
    const double pdf = kernel(c) / mass;
    const double expected = c + cdf / pdf;
    EXPECT_NEAR(*VirtualCost(c, *dist), expected, 1e-10 * expected) << c;
    EXPECT_NEAR(dist->Cdf(c), cdf, 1e-12);
    EXPECT_NEAR(dist->Pdf(c), pdf, 1e-12);
  }
}

TEST(VirtualCostTest, OutsideSupportIsAnError) {
  auto dist = CostDistribution::Uniform(0.0, 1.0);
  ASSERT_TRUE(dist.ok());
  EXPECT_EQ(VirtualCost(1.5, *dist).status().code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_EQ(VirtualCost(-0.1, *dist).status().code(),
            absl::StatusCode::kOutOfRange);
}

TEST(CostDistributionTest, RejectsInvalidParameters) {
  EXPECT_FALSE(CostDistribution::Uniform(-0.1, 1.0).ok());
  EXPECT_FALSE(CostDistribution::Uniform(1.0, 1.0).ok());
  EXPECT_FALSE(CostDistribution::TruncatedGaussian(0.5, 0.0, 0.0, 1.0).ok());
  EXPECT_FALSE(CostDistribution::TruncatedGaussian(0.5, 0.2, 1.0, 0.5).ok());
}

TEST(CostDistributionTest, RejectsDensityThatVanishesNumerically) {
  // Forty standard deviations out the density underflows to zero.
  EXPECT_FALSE(CostDistribution::TruncatedGaussian(0.9, 0.02, 0.0, 1.0).ok());
}

TEST(CostDistributionTest, VirtualCostIsIncreasing) {
  auto dist = CostDistribution::TruncatedGaussian(0.2, 0.3, 0.0, 2.0);
  ASSERT_TRUE(dist.ok());
  double previous = -1.0;
  for (int i = 0; i <= 500; ++i) {
    const double v = dist->VirtualCostUnchecked(2.0 * i / 500);
    EXPECT_GT(v, previous);
    previous = v;
  }
}

TEST(CostDistributionTest, QuantileInvertsCdf) {
  auto gaussian = CostDistribution::TruncatedGaussian(0.4, 0.25, 0.0, 1.0);
  auto uniform = CostDistribution::Uniform(0.2, 1.2);
  ASSERT_TRUE(gaussian.ok());
  ASSERT_TRUE(uniform.ok());
  for (double u : {0.001, 0.1, 0.5, 0.9, 0.999}) {
    EXPECT_NEAR(gaussian->Cdf(gaussian->Quantile(u)), u, 1e-12);
    EXPECT_NEAR(uniform->Cdf(uniform->Quantile(u)), u, 1e-15);
  }
}

TEST(CostDistributionTest, DensityIntegratesToOne) {
  auto dist = CostDistribution::TruncatedGaussian(0.3, 0.5, 0.0, 1.5);
  ASSERT_TRUE(dist.ok());
  EXPECT_NEAR(Integrate([&](double x) { return dist->Pdf(x); }, 0.0, 1.5), 1.0,
              1e-10);
}

}  // namespace
}  // namespace jsam
