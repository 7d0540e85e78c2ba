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

#include "jsam/payments.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "jsam/cost_distribution.h"
#include "jsam/mechanism.h"

namespace jsam {
namespace {

InterimAllocation Tabulate(double (*rule)(double), int nodes, double lo = 0.0,
                           double hi = 1.0) {
  std::vector<double> grid(nodes);
  std::vector<double> values(nodes);
  for (int j = 0; j < nodes; ++j) {
    grid[j] = j + 1 == nodes ? hi : lo + (hi - lo) * j / (nodes - 1.0);
    values[j] = rule(grid[j]);
  }
  auto interim = MakeInterimAllocation(std::move(grid), std::move(values));
  EXPECT_TRUE(interim.ok());
  return *interim;
}

double Linear(double z) { return 1.0 - z; }
double Constant(double) { return 0.4; }
double Increasing(double z) { return z; }
// Kink at an irrational point so no uniform grid lands on it.
constexpr double kKink = 0.31830988618379067;
double Kinked(double z) {
  return z < kKink ? 1.0 - 2.0 * z : 1.0 - 2.0 * kKink;
}

double KinkedPayment(double c) {
  const double flat = 1.0 - 2.0 * kKink;
  double integral = 0.0;
  if (c < kKink) {
    integral += (kKink - c) - (kKink * kKink - c * c);
    integral += flat * (1.0 - kKink);
  } else {
    integral += flat * (1.0 - c);
  }
  return integral + c * Kinked(c);
}

TEST(PaymentTest, LinearRuleClosedForm) {
  const InterimAllocation interim = Tabulate(Linear, 11);
  auto paid = ComputePayment(0.5, interim);
  ASSERT_TRUE(paid.ok());
  EXPECT_NEAR(paid->amount, 0.375, 1e-12);
  EXPECT_NEAR(paid->quadrature_error, 0.0, 1e-12);
}

TEST(PaymentTest, TopOfSupportWithZeroAllocationPaysNothing) {
  const InterimAllocation interim = Tabulate(Linear, 11);
  auto paid = ComputePayment(1.0, interim);
  ASSERT_TRUE(paid.ok());
  EXPECT_EQ(paid->amount, 0.0);
}

TEST(PaymentTest, ReportOutsideGridIsRejected) {
  const InterimAllocation interim = Tabulate(Linear, 11, 0.2, 1.0);
  EXPECT_EQ(ComputePayment(0.1, interim).status().code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_EQ(ComputePayment(1.2, interim).status().code(),
            absl::StatusCode::kOutOfRange);
}

TEST(PaymentTest, MakeInterimRejectsMalformedGrids) {
  EXPECT_FALSE(MakeInterimAllocation({0.0}, {1.0}).ok());
  EXPECT_FALSE(MakeInterimAllocation({0.0, 1.0}, {1.0}).ok());
  EXPECT_FALSE(MakeInterimAllocation({1.0, 0.0}, {1.0, 1.0}).ok());
}

TEST(PaymentTest, KinkedRuleConvergesQuadratically) {
  for (double c : {0.05, 0.2, 0.5, 0.9}) {
    const double exact = KinkedPayment(c);
    for (int nodes : {11, 41, 161, 641}) {
      const InterimAllocation interim = Tabulate(Kinked, nodes);
      auto paid = ComputePayment(c, interim);
      ASSERT_TRUE(paid.ok());
      const double h = 1.0 / (nodes - 1.0);
      EXPECT_LE(std::abs(paid->amount - exact), h * h) << c << " " << nodes;
    }
  }
}

TEST(PaymentTest, JsamPaymentStableUnderGridRefinement) {
  auto dist = CostDistribution::Uniform(0.0, 1.0);
  ASSERT_TRUE(dist.ok());
  const AllocationRule rule = JsamAllocationRule(*dist, ServerConfig{});
  auto coarse = ComputeInterimAllocation(
      1, 3, *dist, rule, {.grid_size = 200, .samples = 10, .seed = 7});
  auto fine = ComputeInterimAllocation(
      1, 3, *dist, rule, {.grid_size = 2000, .samples = 10, .seed = 7});
  ASSERT_TRUE(coarse.ok());
  ASSERT_TRUE(fine.ok());
  auto a = ComputePayment(0.2, *coarse);
  auto b = ComputePayment(0.2, *fine);
  ASSERT_TRUE(a.ok());
  ASSERT_TRUE(b.ok());
  EXPECT_NEAR(a->amount, b->amount, 0.005 * b->amount);
}

TEST(IcTest, ConstantRuleMakesEveryReportEquivalent) {
  const InterimAllocation interim = Tabulate(Constant, 21);
  const std::vector<double> reports = {0.0, 0.1, 0.5, 0.9, 1.0};
  auto report = VerifyIc(0.3, reports, interim);
  ASSERT_TRUE(report.ok());
  EXPECT_TRUE(report->pass);
  EXPECT_NEAR(report->worst_gain, 0.0, 1e-12);
}

TEST(IcTest, LinearRuleHandExample) {
  const InterimAllocation interim = Tabulate(Linear, 11);
  auto truthful = ComputePayment(0.5, interim);
  auto lie = ComputePayment(0.8, interim);
  ASSERT_TRUE(truthful.ok());
  ASSERT_TRUE(lie.ok());
  EXPECT_NEAR(truthful->amount - 0.5 * 0.5, 0.125, 1e-12);
  EXPECT_NEAR(lie->amount - 0.5 * 0.2, 0.08, 1e-12);
  const std::vector<double> reports = {0.8};
  auto report = VerifyIc(0.5, reports, interim);
  ASSERT_TRUE(report.ok());
  EXPECT_TRUE(report->pass);
  EXPECT_NEAR(report->worst_gain, -0.045, 1e-12);
}

TEST(IcTest, NegatedIntegralSabotageIsCaught) {
  const InterimAllocation interim = Tabulate(Linear, 11);
  const std::vector<double> reports = {0.1, 0.3, 0.8, 1.0};
  auto report =
      VerifyIc(0.5, reports, interim, -1.0, PaymentSabotage::kNegatedIntegral);
  ASSERT_TRUE(report.ok());
  EXPECT_FALSE(report->pass);
  EXPECT_FALSE(report->violation.empty());
}

TEST(IcTest, JsamInterimPasses) {
  auto dist = CostDistribution::Uniform(0.0, 1.0);
  ASSERT_TRUE(dist.ok());
  const AllocationRule rule = JsamAllocationRule(*dist, ServerConfig{});
  const std::vector<double> reports = {0.05, 0.2, 0.45, 0.7, 0.95};
  for (double truth : {0.1, 0.5, 0.9}) {
    auto report = VerifyIc(0, truth, reports, 3, *dist, rule,
                           {.grid_size = 40, .samples = 200, .seed = 3});
    ASSERT_TRUE(report.ok());
    EXPECT_TRUE(report->pass) << report->violation;
  }
}

TEST(IrTest, Examples) {
  EXPECT_TRUE(VerifyIr(0.5, 0.375, 0.5));
  EXPECT_TRUE(VerifyIr(0.5, 0.0, 0.0));
  EXPECT_TRUE(VerifyIr(0.5, 0.25 - 5e-7, 0.5));
  EXPECT_FALSE(VerifyIr(0.5, 0.2, 0.5));
}

TEST(IrTest, LinearRulePaymentsAreRational) {
  const InterimAllocation interim = Tabulate(Linear, 51);
  for (double c = 0.0; c <= 1.0; c += 0.05) {
    auto paid = ComputePayment(c, interim);
    ASSERT_TRUE(paid.ok());
    EXPECT_TRUE(VerifyIr(c, paid->amount, interim.At(c)));
  }
}

TEST(MonotoneTest, ConstantPassesIncreasingFails) {
  EXPECT_TRUE(VerifyMonotoneAllocation(Tabulate(Constant, 10)).pass);
  const MonotoneReport bad = VerifyMonotoneAllocation(Tabulate(Increasing, 10));
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.worst_rise, 1.0 / 9.0, 1e-12);
}

TEST(InterimTest, SingleClientMatchesDeterministicBudget) {
  auto dist = CostDistribution::Uniform(0.2, 1.0);
  ASSERT_TRUE(dist.ok());
  const ServerConfig cfg{.eta = 2.0};
  auto interim =
      ComputeInterimAllocation(0, 1, *dist, JsamAllocationRule(*dist, cfg),
                               {.grid_size = 9, .samples = 5, .seed = 1});
  ASSERT_TRUE(interim.ok());
  for (std::size_t j = 0; j < interim->grid.size(); ++j) {
    const double v = *VirtualCost(interim->grid[j], *dist);
    const std::vector<double> one = {v};
    auto outcome = JsamSolve(one, cfg);
    ASSERT_TRUE(outcome.ok());
    EXPECT_DOUBLE_EQ(interim->allocation[j], outcome->budgets[0]);
  }
}

TEST(InterimTest, GridCoversSupport) {
  auto dist = CostDistribution::Uniform(0.2, 1.0);
  ASSERT_TRUE(dist.ok());
  const std::vector<double> grid = InterimGrid(*dist, 25);
  EXPECT_EQ(grid.front(), 0.2);
  EXPECT_EQ(grid.back(), 1.0);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  auto zero = CostDistribution::Uniform(0.0, 1.0);
  ASSERT_TRUE(zero.ok());
  const std::vector<double> lifted = InterimGrid(*zero, 25);
  EXPECT_GT(lifted.front(), 0.0);
  EXPECT_LT(lifted.front(), 1e-5);
  EXPECT_EQ(lifted.back(), 1.0);
  for (std::size_t j = 1; j < lifted.size(); ++j) {
    EXPECT_LT(lifted[j - 1], lifted[j]);
  }
}

TEST(InterimTest, TopReportGetsTheLeast) {
  auto dist = CostDistribution::Uniform(0.0, 1.0);
  ASSERT_TRUE(dist.ok());
  auto interim = ComputeInterimAllocation(
      2, 3, *dist, JsamAllocationRule(*dist, ServerConfig{}),
      {.grid_size = 20, .samples = 300, .seed = 5});
  ASSERT_TRUE(interim.ok());
  const double top = interim->allocation.back();
  for (double value : interim->allocation) EXPECT_LE(top, value + 1e-12);
  EXPECT_TRUE(VerifyMonotoneAllocation(*interim).pass);
}

TEST(InterimTest, DeterministicGivenSeed) {
  auto dist = CostDistribution::Uniform(0.0, 1.0);
  ASSERT_TRUE(dist.ok());
  const AllocationRule rule = JsamAllocationRule(*dist, ServerConfig{});
  const InterimOptions options{.grid_size = 12, .samples = 50, .seed = 9};
  auto a = ComputeInterimAllocation(0, 3, *dist, rule, options);
  auto b = ComputeInterimAllocation(0, 3, *dist, rule, options);
  ASSERT_TRUE(a.ok());
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(a->allocation, b->allocation);
  EXPECT_EQ(a->grid, b->grid);
}

TEST(InterimTest, TwoSeedsAgreeWithinMonteCarloBand) {
  auto dist = CostDistribution::Uniform(0.0, 1.0);
  ASSERT_TRUE(dist.ok());
  const AllocationRule rule = JsamAllocationRule(*dist, ServerConfig{});
  constexpr int kSamples = 2000;
  auto a = ComputeInterimAllocation(
      0, 3, *dist, rule, {.grid_size = 10, .samples = kSamples, .seed = 1});
  auto b = ComputeInterimAllocation(
      0, 3, *dist, rule, {.grid_size = 10, .samples = kSamples, .seed = 2});
  ASSERT_TRUE(a.ok());
  ASSERT_TRUE(b.ok());
  // Budgets scale like 1/z near a zero cost, so the band is relative there.
  for (std::size_t j = 0; j < a->grid.size(); ++j) {
    const double scale = std::max(1.0, std::abs(a->allocation[j]));
    EXPECT_LE(std::abs(a->allocation[j] - b->allocation[j]),
              McTolerance(kSamples) * scale)
        << "report " << a->grid[j];
  }
}

TEST(InterimTest, RejectsBadOptions) {
  auto dist = CostDistribution::Uniform(0.0, 1.0);
  ASSERT_TRUE(dist.ok());
  const AllocationRule rule = JsamAllocationRule(*dist, ServerConfig{});
  EXPECT_FALSE(
      ComputeInterimAllocation(0, 3, *dist, rule, {.grid_size = 1}).ok());
  EXPECT_FALSE(
      ComputeInterimAllocation(0, 3, *dist, rule, {.samples = 0}).ok());
  EXPECT_FALSE(ComputeInterimAllocation(3, 3, *dist, rule, {}).ok());
}

// Summed payments and summed virtual spend agree in expectation over profiles.
TEST(ExpectedPaymentTest, PaymentsMatchVirtualSpend) {
  auto dist = CostDistribution::Uniform(0.1, 1.1);
  ASSERT_TRUE(dist.ok());
  const ServerConfig cfg{.eta = 1.0, .q = 1.0};
  const AllocationRule rule = JsamAllocationRule(*dist, cfg);
  constexpr int kSamples = 2000;
  auto interim = ComputeInterimAllocation(
      0, 2, *dist, rule, {.grid_size = 100, .samples = kSamples, .seed = 13});
  ASSERT_TRUE(interim.ok());
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> draw(0.1, 1.1);
  constexpr int kProfiles = 4000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < kProfiles; ++s) {
    const std::vector<double> costs = {draw(gen), draw(gen)};
    const std::vector<double> v = {*VirtualCost(costs[0], *dist),
                                   *VirtualCost(costs[1], *dist)};
    auto outcome = JsamSolve(v, cfg);
    ASSERT_TRUE(outcome.ok());
    double paid = 0.0;
    for (double c : costs) paid += ComputePayment(c, *interim)->amount;
    const double gap = paid - outcome->total_budget;
    sum += gap;
    sum_sq += gap * gap;
  }
  const double mean = sum / kProfiles;
  const double sd = std::sqrt(std::max(0.0, sum_sq / kProfiles - mean * mean));
  // Profile noise plus the interim's own Monte-Carlo error on each payment.
  double interim_scale = 0.0;
  for (double value : interim->allocation)
    interim_scale = std::max(interim_scale, value);
  const double band = 3.0 * sd / std::sqrt(kProfiles) +
                      2.0 * 3.0 * interim_scale / std::sqrt(kSamples);
  EXPECT_LE(std::abs(mean), band) << "mean gap " << mean << " sd " << sd;
}

}  // namespace
}  // namespace jsam
