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

#ifndef JSAM_MECHANISM_H_
#define JSAM_MECHANISM_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "jsam/cost_distribution.h"

namespace jsam {

// How the selection-bias term ||p - p^u||_1 enters the reduced objective.
// kExactL1 uses the true L1 distance of the threshold plan, 2(p_1 - 1/N).
// kPaperLiteral uses 2(p_1 - p_h), which agrees only when p_h = 1/N.
enum class ObjectiveForm { kExactL1, kPaperLiteral };

std::string_view ObjectiveFormName(ObjectiveForm form);
absl::StatusOr<ObjectiveForm> ParseObjectiveForm(std::string_view name);

// Constituents of the DP loss coefficient Q = 2 c2^2 ln(1/delta) D sqrt(T) L.
struct PrivacyConstants {
  double c2 = 1.0;
  double delta = 1e-5;
  double dimension = 1.0;
  double iterations = 1.0;
  double smoothness = 1.0;
};

absl::StatusOr<double> DpLossCoefficient(const PrivacyConstants& constants);

struct ServerConfig {
  // Weight of the training-loss bound against monetary cost.
  double eta = 1.0;
  // Q, the multiplier of sum p_k^2 / eps_k^2.
  double q = 1.0;
  // Search granularity for the threshold probability.
  double grid_delta = 1e-3;
  ObjectiveForm objective_form = ObjectiveForm::kExactL1;

  friend bool operator==(const ServerConfig&, const ServerConfig&) = default;
};

absl::Status ValidateServerConfig(const ServerConfig& config);

struct ClientType {
  int index = 0;
  double sensitivity = 0.0;
  double virtual_cost = 0.0;
  CostDistribution distribution;
};

absl::StatusOr<std::vector<ClientType>> MakeClients(
    std::span<const double> sensitivities, const CostDistribution& dist);

struct MechanismOutcome {
  // All vectors are indexed by the caller's client order.
  std::vector<double> probabilities;
  std::vector<double> budgets;
  // Empty until filled by the payments module.
  std::vector<double> payments;
  // Monetary total B = sum_k v_k eps_k.
  double total_budget = 0.0;
  // 1-based rank of the threshold client in ascending virtual-cost order.
  int threshold = 1;
  double threshold_probability = 1.0;
  double objective = 0.0;
  // Ascending virtual-cost order (0-based client indices).
  std::vector<std::size_t> order;
  // True when eta = 0 and the plan carries no privacy budget at all.
  bool degenerate = false;

  int SelectedCount() const;
};

// Minimizer of the reduced objective over B for one (h, p_h) pair.
struct InnerSolution {
  double budget = 0.0;
  double objective = 0.0;
  bool degenerate = false;
};

// Stable ascending order by virtual cost; equal costs keep index order.
std::vector<std::size_t> SortByVirtualCost(
    std::span<const double> virtual_costs);

// Closed-form privacy budgets for a fixed plan p and monetary total B:
//   eps_k = p_k^{2/3} B / ((sum_i v_i^{2/3} p_i^{2/3}) v_k^{1/3}).
absl::StatusOr<std::vector<double>> OptimalEpsilon(
    std::span<const double> probabilities, double total_budget,
    std::span<const double> virtual_costs);

// Selection-bias term of a threshold plan under the configured form.
double DeviationTerm(int threshold, double threshold_probability,
                     int num_clients, ObjectiveForm form);

// Probability of the lowest-cost client implied by (h, p_h).
double LeadProbability(int threshold, double threshold_probability,
                       int num_clients);

// Reduced objective of a threshold plan with budgets already optimized:
//   eta sqrt(dev^2 + Q c / B^2) + eta dev + B,
//   c = ((v_1 p_1)^{2/3} + (v_h p_h)^{2/3} + sum_{1<i<h} (v_i/N)^{2/3})^3.
// `sorted_virtual_costs` must be ascending; `threshold` is 1-based.
absl::StatusOr<double> ReducedObjective(
    int threshold, double threshold_probability, double total_budget,
    std::span<const double> sorted_virtual_costs, const ServerConfig& config);

absl::StatusOr<InnerSolution> SolveInnerBudget(
    int threshold, double threshold_probability,
    std::span<const double> sorted_virtual_costs, const ServerConfig& config);

// Inner budget problem for an arbitrary plan p (baselines): dev is the exact
// L1 distance to the uniform plan and c = (sum_k (v_k p_k)^{2/3})^3.
absl::StatusOr<InnerSolution> SolveBudgetForPlan(
    std::span<const double> probabilities,
    std::span<const double> virtual_costs, const ServerConfig& config);

// 1-D convex minimization of eta sqrt(dev^2 + qc / B^2) + eta dev + B over
// B > 0 by derivative-sign bisection.
InnerSolution MinimizeOverBudget(double eta, double deviation,
                                 double weighted_concentration);

// Server objective for explicit (p, eps): exact L1 selection bias plus the
// DP term over selected clients plus sum_k v_k eps_k.
double ServerObjective(std::span<const double> probabilities,
                       std::span<const double> budgets,
                       std::span<const double> virtual_costs,
                       const ServerConfig& config);

// Grid search over (h, p_h) with the inner budget solved exactly.
absl::StatusOr<MechanismOutcome> JsamSolve(
    std::span<const double> virtual_costs, const ServerConfig& config);
absl::StatusOr<MechanismOutcome> JsamSolve(std::span<const ClientType> clients,
                                           const ServerConfig& config);

struct StructureReport {
  bool pass = true;
  std::string violation;
};

// Checks the threshold shape of p walked in `order`: one optional client
// above 1/N in first position, then clients at exactly 1/N, at most one
// strictly between 0 and 1/N, then zeros.
StructureReport VerifyStructure(std::span<const double> probabilities,
                                std::span<const std::size_t> order,
                                double tolerance = 1e-9);

}  // namespace jsam

#endif  // JSAM_MECHANISM_H_
