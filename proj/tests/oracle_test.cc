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

#include "jsam/oracle.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "jsam/mechanism.h"

namespace jsam {
namespace {

TEST(MinimizeDpTermTest, MatchesClosedFormBudgets) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<double> p(n);
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) {
      p[k] = unit(gen);
      v[k] = 0.01 + 2.0 * unit(gen);
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x /= total;
    const double budget = 0.1 + 9.9 * unit(gen);
    auto numeric = MinimizeDpTerm(p, v, budget);
    auto closed = OptimalEpsilon(p, budget, v);
    ASSERT_TRUE(numeric.ok());
    ASSERT_TRUE(closed.ok());
    double spend = 0.0;
    for (int k = 0; k < n; ++k) {
      EXPECT_NEAR(numeric->budgets[k], (*closed)[k], 1e-5 * (*closed)[k]);
      spend += v[k] * numeric->budgets[k];
    }
    EXPECT_NEAR(spend, budget, 1e-9 * budget);
  }
}

TEST(MinimizeDpTermTest, IgnoresExcludedClients) {
  const std::vector<double> p = {0.7, 0.0, 0.3};
  const std::vector<double> v = {1.0, 0.1, 2.0};
  auto numeric = MinimizeDpTerm(p, v, 2.0);
  ASSERT_TRUE(numeric.ok());
  EXPECT_EQ(numeric->budgets[1], 0.0);
}

TEST(BruteForceTest, SingleClientUsesUnbiasedBudget) {
  const ServerConfig cfg{.eta = 3.0, .q = 2.0};
  auto brute = BruteForceSolve(std::vector<double>{0.8}, cfg, 0.01);
  ASSERT_TRUE(brute.ok());
  EXPECT_EQ(brute->probabilities, std::vector<double>{1.0});
  const double expected = std::sqrt(3.0) * std::pow(2.0 * 0.64, 0.25);
  EXPECT_NEAR(brute->total_budget, expected, 1e-6 * expected);
  auto jsam = JsamSolve(std::vector<double>{0.8}, cfg);
  ASSERT_TRUE(jsam.ok());
  EXPECT_NEAR(brute->objective, jsam->objective, 1e-9 * jsam->objective);
}

TEST(BruteForceTest, TwoClientExample) {
  const std::vector<double> v = {0.4, 2.0};
  const ServerConfig cfg{.eta = 1.0, .q = 1.0};
  auto brute = BruteForceSolve(v, cfg, 0.01);
  auto jsam = JsamSolve(v, cfg);
  ASSERT_TRUE(brute.ok());
  ASSERT_TRUE(jsam.ok());
  const double slack = CrossCheckSlack(0.01, cfg.grid_delta, cfg.eta, 2.0);
  EXPECT_LE(brute->objective, jsam->objective + slack);
  const std::vector<std::size_t> order = {0, 1};
  EXPECT_TRUE(VerifyStructure(brute->probabilities, order, 0.01).pass);
  EXPECT_EQ(brute->evaluations, 101);
}

TEST(BruteForceTest, ZeroWeightCostsNothing) {
  auto brute = BruteForceSolve(std::vector<double>{0.4, 1.0, 2.0},
                               ServerConfig{.eta = 0.0}, 0.05);
  ASSERT_TRUE(brute.ok());
  EXPECT_EQ(brute->objective, 0.0);
  EXPECT_EQ(brute->total_budget, 0.0);
}

TEST(BruteForceTest, Guards) {
  const ServerConfig cfg;
  EXPECT_FALSE(BruteForceSolve(std::vector<double>(6, 1.0), cfg, 0.1).ok());
  EXPECT_FALSE(BruteForceSolve(std::vector<double>{1.0, 2.0}, cfg, 1e-4).ok());
  EXPECT_FALSE(BruteForceSolve(std::vector<double>{1.0, 2.0}, cfg, 0.03).ok());
  EXPECT_FALSE(BruteForceSolve(std::vector<double>{}, cfg, 0.1).ok());
  EXPECT_FALSE(CrossCheck(std::vector<double>(5, 1.0), cfg, 0.1).ok());
}

TEST(BruteForceTest, BudgetsAreClosedFormForTheChosenPlan) {
  const std::vector<double> v = {0.3, 0.9, 1.7};
  const ServerConfig cfg{.eta = 2.0, .q = 0.5};
  auto brute = BruteForceSolve(v, cfg, 0.02);
  ASSERT_TRUE(brute.ok());
  auto closed = OptimalEpsilon(brute->probabilities, brute->total_budget, v);
  ASSERT_TRUE(closed.ok());
  for (std::size_t k = 0; k < v.size(); ++k) {
    EXPECT_NEAR(brute->budgets[k], (*closed)[k], 1e-5 * (*closed)[k] + 1e-300);
  }
}

TEST(CrossCheckTest, RandomThreeClientInstances) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(3);
    for (double& x : v) x = 2.0 * unit(gen) + 1e-3;
    const ServerConfig cfg{.eta = 0.1 + 5.0 * unit(gen)};
    auto report = CrossCheck(v, cfg, 0.01);
    ASSERT_TRUE(report.ok());
    EXPECT_TRUE(report->pass)
        << "trial " << trial << ": jsam " << report->jsam_objective << " brute "
        << report->brute_force_objective;
    // The brute force optimum keeps the threshold shape up to its grid.
    EXPECT_TRUE(VerifyStructure(report->brute_force.probabilities,
                                report->jsam.order, 0.01 + 1e-9)
                    .pass);
  }
}

TEST(CrossCheckTest, SingleClientMatchesExactly) {
  auto report = CrossCheck(std::vector<double>{1.3}, ServerConfig{}, 0.01);
  ASSERT_TRUE(report.ok());
  EXPECT_TRUE(report->pass);
  EXPECT_NEAR(report->jsam_objective, report->brute_force_objective,
              1e-9 * report->jsam_objective);
}

TEST(CrossCheckTest, NearTieIsDeterministic) {
  const std::vector<double> v = {1.0, 1.0 + 1e-9, 5.0};
  auto a = CrossCheck(v, ServerConfig{}, 0.01);
  auto b = CrossCheck(v, ServerConfig{}, 0.01);
  ASSERT_TRUE(a.ok());
  ASSERT_TRUE(b.ok());
  EXPECT_TRUE(a->pass);
  EXPECT_EQ(a->jsam.probabilities, b->jsam.probabilities);
  EXPECT_EQ(a->brute_force.probabilities, b->brute_force.probabilities);
  EXPECT_EQ(a->brute_force_objective, b->brute_force_objective);
}

TEST(CrossCheckSlackTest, Formula) {
  EXPECT_DOUBLE_EQ(CrossCheckSlack(0.01, 0.001, 2.0, 3.0), 4.0 * 0.011 * 5.0);
}

}  // namespace
}  // namespace jsam
