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

#ifndef JSAM_FLSIM_BASELINES_H_
#define JSAM_FLSIM_BASELINES_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "jsam/cost_distribution.h"
#include "jsam/mechanism.h"
#include "jsam/payments.h"

namespace jsam::flsim {

enum class MechanismKind { kJsam, kUsbm, kFsbm, kBbm, kJsamCi };

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kJsam;
  // Subset size M for fsbm.
  int subset_size = 0;

  // "jsam", "usbm", "fsbm:M", "bbm" or "jsam_ci".
  std::string Name() const;
  friend bool operator==(const MechanismSpec&, const MechanismSpec&) = default;
};

absl::StatusOr<MechanismSpec> ParseMechanismSpec(std::string_view text);

struct Plan {
  std::string mechanism;
  std::vector<double> probabilities;
  std::vector<double> budgets;
  std::vector<double> payments;
  // B = sum_k v_k eps_k (true costs for jsam_ci).
  double total_budget = 0.0;
  double objective = 0.0;
  double monetary_cost = 0.0;
  // Threshold rank for the grid-search mechanisms, 0 otherwise.
  int threshold = 0;
  bool degenerate = false;

  int SelectedCount() const;
};

struct PlanOptions {
  ServerConfig server;
  // Replaces the optimized B; used to compare mechanisms at equal spend.
  std::optional<double> budget_override;
  // Initial-model loss per client, needed by bbm.
  std::vector<double> client_losses;
  // Interim estimate behind the payments.
  InterimOptions payments;
};

// Selection probabilities and budgets for a reported cost profile.
absl::StatusOr<Plan> SelectPlan(const MechanismSpec& spec,
                                std::span<const double> costs,
                                const CostDistribution& dist,
                                const PlanOptions& options);

AllocationRule MechanismAllocationRule(const MechanismSpec& spec,
                                       const CostDistribution& dist,
                                       const PlanOptions& options);

// SelectPlan plus payments: interim-allocation payments for every mechanism
// except jsam_ci, which pays c_k eps_k.
absl::StatusOr<Plan> BaselinePlan(const MechanismSpec& spec,
                                  std::span<const double> costs,
                                  const CostDistribution& dist,
                                  const PlanOptions& options);

}  // namespace jsam::flsim

#endif  // JSAM_FLSIM_BASELINES_H_
