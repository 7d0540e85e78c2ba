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

#include "jsam/flsim/baselines.h"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "jsam/status_macros.h"

namespace jsam::flsim {
namespace {

bool SymmetricRule(MechanismKind kind) { return kind != MechanismKind::kBbm; }

absl::StatusOr<std::vector<double>> SelectionProbabilities(
    const MechanismSpec& spec, std::span<const double> costs,
    const PlanOptions& options) {
  const std::size_t n = costs.size();
  switch (spec.kind) {
    case MechanismKind::kUsbm:
      return std::vector<double>(n, 1.0 / n);
    case MechanismKind::kFsbm: {
      if (spec.subset_size < 1 || spec.subset_size > static_cast<int>(n)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "fsbm subset size ", spec.subset_size, " outside [1, ", n, "]"));
      }
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(
          order.begin(), order.end(),
          [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
      std::vector<double> p(n, 0.0);
      for (int r = 0; r < spec.subset_size; ++r) {
        p[order[r]] = 1.0 / spec.subset_size;
      }
      return p;
    }
    case MechanismKind::kBbm: {
      if (options.client_losses.size() != n) {
        return absl::InvalidArgumentError(
            "bbm needs one initial-model loss per client");
      }
      double total = 0.0;
      for (double loss : options.client_losses) {
        if (!(loss >= 0.0)) {
          return absl::InvalidArgumentError("bbm losses must be >= 0");
        }
        total += loss;
      }
      if (!(total > 0.0)) {
        return absl::InvalidArgumentError("bbm losses are all zero");
      }
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k) {
        p[k] = options.client_losses[k] / total;
      }
      return p;
    }
    case MechanismKind::kJsam:
    case MechanismKind::kJsamCi:
      break;
  }
  return absl::InternalError("grid-search mechanisms have no fixed plan");
}

}  // namespace

std::string MechanismSpec::Name() const {
  switch (kind) {
    case MechanismKind::kJsam:
      return "jsam";
    case MechanismKind::kUsbm:
      return "usbm";
    case MechanismKind::kFsbm:
      return absl::StrCat("fsbm:", subset_size);
    case MechanismKind::kBbm:
      return "bbm";
    case MechanismKind::kJsamCi:
      return "jsam_ci";
  }
  return "unknown";
}

absl::StatusOr<MechanismSpec> ParseMechanismSpec(std::string_view text) {
  if (text == "jsam") return MechanismSpec{MechanismKind::kJsam, 0};
  if (text == "usbm") return MechanismSpec{MechanismKind::kUsbm, 0};
  if (text == "bbm") return MechanismSpec{MechanismKind::kBbm, 0};
  if (text == "jsam_ci") return MechanismSpec{MechanismKind::kJsamCi, 0};
  if (text.starts_with("fsbm:")) {
    int m = 0;
    if (absl::SimpleAtoi(std::string(text.substr(5)), &m) && m >= 1) {
      return MechanismSpec{MechanismKind::kFsbm, m};
    }
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "mechanism must be jsam, usbm, fsbm:<M>, bbm or jsam_ci, got '",
      std::string(text), "'"));
}

int Plan::SelectedCount() const {
  return static_cast<int>(std::count_if(probabilities.begin(),
                                        probabilities.end(),
                                        [](double p) { return p > 0.0; }));
}

absl::StatusOr<Plan> SelectPlan(const MechanismSpec& spec,
                                std::span<const double> costs,
                                const CostDistribution& dist,
                                const PlanOptions& options) {
  if (costs.empty()) return absl::InvalidArgumentError("empty client list");
  if (options.budget_override.has_value() &&
      !(*options.budget_override > 0.0)) {
    return absl::InvalidArgumentError("budget override must be > 0");
  }
  std::vector<double> virtual_costs(costs.size());
  for (std::size_t k = 0; k < costs.size(); ++k) {
    JSAM_ASSIGN_OR_RETURN(virtual_costs[k], VirtualCost(costs[k], dist));
    if (spec.kind == MechanismKind::kJsamCi) virtual_costs[k] = costs[k];
  }

  Plan plan;
  plan.mechanism = spec.Name();
  if (spec.kind == MechanismKind::kJsam ||
      spec.kind == MechanismKind::kJsamCi) {
    JSAM_ASSIGN_OR_RETURN(MechanismOutcome outcome,
                          JsamSolve(virtual_costs, options.server));
    plan.probabilities = std::move(outcome.probabilities);
    plan.total_budget = outcome.total_budget;
    plan.threshold = outcome.threshold;
    plan.degenerate = outcome.degenerate;
  } else {
    JSAM_ASSIGN_OR_RETURN(plan.probabilities,
                          SelectionProbabilities(spec, costs, options));
    JSAM_ASSIGN_OR_RETURN(
        InnerSolution inner,
        SolveBudgetForPlan(plan.probabilities, virtual_costs, options.server));
    plan.total_budget = inner.budget;
    plan.degenerate = inner.degenerate;
  }
  if (options.budget_override.has_value()) {
    plan.total_budget = *options.budget_override;
    plan.degenerate = false;
  }
  JSAM_ASSIGN_OR_RETURN(
      plan.budgets,
      OptimalEpsilon(plan.probabilities, plan.total_budget, virtual_costs));
  plan.objective = ServerObjective(plan.probabilities, plan.budgets,
                                   virtual_costs, options.server);
  return plan;
}

AllocationRule MechanismAllocationRule(const MechanismSpec& spec,
                                       const CostDistribution& dist,
                                       const PlanOptions& options) {
  return [spec, dist, options](std::span<const double> costs)
             -> absl::StatusOr<std::vector<double>> {
    JSAM_ASSIGN_OR_RETURN(Plan plan, SelectPlan(spec, costs, dist, options));
    return std::move(plan.budgets);
  };
}

absl::StatusOr<Plan> BaselinePlan(const MechanismSpec& spec,
                                  std::span<const double> costs,
                                  const CostDistribution& dist,
                                  const PlanOptions& options) {
  JSAM_ASSIGN_OR_RETURN(Plan plan, SelectPlan(spec, costs, dist, options));
  const int n = static_cast<int>(costs.size());
  plan.payments.assign(n, 0.0);
  if (spec.kind == MechanismKind::kJsamCi) {
    for (int k = 0; k < n; ++k) plan.payments[k] = costs[k] * plan.budgets[k];
  } else {
    const AllocationRule rule = MechanismAllocationRule(spec, dist, options);
    std::optional<InterimAllocation> shared;
    for (int k = 0; k < n; ++k) {
      if (!shared.has_value() || !SymmetricRule(spec.kind)) {
        JSAM_ASSIGN_OR_RETURN(
            shared, ComputeInterimAllocation(SymmetricRule(spec.kind) ? 0 : k,
                                             n, dist, rule, options.payments));
      }
      // Reports below the lifted grid start pay as if at the grid start.
      const double report =
          std::clamp(costs[k], shared->grid.front(), shared->grid.back());
      JSAM_ASSIGN_OR_RETURN(Payment paid, ComputePayment(report, *shared));
      plan.payments[k] = paid.amount;
    }
  }
  plan.monetary_cost = 0.0;
  for (double pi : plan.payments) plan.monetary_cost += pi;
  return plan;
}

}  // namespace jsam::flsim
