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

#ifndef JSAM_ORACLE_H_
#define JSAM_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "jsam/mechanism.h"

namespace jsam {

// Numeric minimum of sum_k p_k^2 / eps_k^2 subject to sum_k v_k eps_k = B,
// by bisection on the multiplier with a per-client 1-D search inside.
struct DpTermMinimum {
  std::vector<double> budgets;
  double value = 0.0;
};

absl::StatusOr<DpTermMinimum> MinimizeDpTerm(
    std::span<const double> probabilities,
    std::span<const double> virtual_costs, double total_budget);

struct BruteForceResult {
  std::vector<double> probabilities;
  std::vector<double> budgets;
  double total_budget = 0.0;
  double objective = 0.0;
  double grid_step = 0.0;
  std::int64_t evaluations = 0;
};

// Exhaustive search over simplex points whose coordinates are multiples of
// `grid_step`, each with budgets minimized numerically. Limited to N <= 5.
absl::StatusOr<BruteForceResult> BruteForceSolve(
    std::span<const double> virtual_costs, const ServerConfig& config,
    double grid_step);

// Empirical allowance for grid effects: 4 (g + delta)(eta + max v).
double CrossCheckSlack(double grid_step, double grid_delta, double eta,
                       double max_virtual_cost);

struct CrossCheckReport {
  bool pass = false;
  double jsam_objective = 0.0;
  double brute_force_objective = 0.0;
  double allowance = 0.0;
  MechanismOutcome jsam;
  BruteForceResult brute_force;
};

absl::StatusOr<CrossCheckReport> CrossCheck(
    std::span<const double> virtual_costs, const ServerConfig& config,
    double grid_step = 0.01);

}  // namespace jsam

#endif  // JSAM_ORACLE_H_
