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

#include "jsam/mechanism.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "jsam/numeric.h"
#include "jsam/status_macros.h"

namespace jsam {
namespace {

constexpr double kProbabilityTolerance = 1e-12;
constexpr double kBudgetLowerBracket = 1e-8;
constexpr double kBudgetRelativeTolerance = 1e-10;

double TwoThirds(double x) { return std::cbrt(x * x); }

// Sum of v_i^{2/3} over sorted ranks [first, last), 0-based, from prefix sums.
double RangeSum(const std::vector<double>& prefix, int first, int last) {
  if (last <= first) return 0.0;
  return prefix[last] - prefix[first];
}

// c of the reduced objective. `prefix[i]` holds sum_{r<i} v_r^{2/3}.
double ThresholdConcentration(int threshold, double lead_probability,
                              double threshold_probability,
                              std::span<const double> sorted_virtual_costs,
                              const std::vector<double>& prefix) {
  const int n = static_cast<int>(sorted_virtual_costs.size());
  const double lead = sorted_virtual_costs[0] * lead_probability;
  if (threshold == 1) return lead * lead;
  const double inner =
      TwoThirds(lead) +
      TwoThirds(sorted_virtual_costs[threshold - 1] * threshold_probability) +
      RangeSum(prefix, 1, threshold - 1) / TwoThirds(static_cast<double>(n));
  return inner * inner * inner;
}

std::vector<double> TwoThirdsPrefix(std::span<const double> sorted) {
  std::vector<double> prefix(sorted.size() + 1, 0.0);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    prefix[i + 1] = prefix[i] + TwoThirds(sorted[i]);
  }
  return prefix;
}

absl::Status CheckThresholdPair(int threshold, double threshold_probability,
                                int n) {
  if (threshold < 1 || threshold > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("threshold ", threshold, " outside [1, ", n, "]"));
  }
  const double uniform = 1.0 / n;
  if (threshold_probability < -kProbabilityTolerance ||
      threshold_probability > uniform + kProbabilityTolerance) {
    return absl::InvalidArgumentError(absl::StrCat(
        "threshold probability ", threshold_probability, " outside [0, 1/N]"));
  }
  if (threshold == 1 &&
      std::abs(threshold_probability - uniform) > kProbabilityTolerance) {
    return absl::InvalidArgumentError(
        "threshold 1 admits only the single-client plan p_1 = 1");
  }
  const double lead = LeadProbability(threshold, threshold_probability, n);
  if (lead < uniform - kProbabilityTolerance ||
      lead > 1.0 + kProbabilityTolerance) {
    return absl::InvalidArgumentError(absl::StrCat(
        "infeasible plan: lead probability ", lead, " outside [1/N, 1]"));
  }
  return absl::OkStatus();
}

absl::Status CheckSortedCosts(std::span<const double> sorted) {
  if (sorted.empty()) return absl::InvalidArgumentError("no clients");
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!std::isfinite(sorted[i]) || !(sorted[i] > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("virtual cost at rank ", i + 1,
                       " must be finite and positive, got ", sorted[i]));
    }
    if (i > 0 && sorted[i] < sorted[i - 1]) {
      return absl::InvalidArgumentError("virtual costs are not sorted");
    }
  }
  return absl::OkStatus();
}

}  // namespace

std::string_view ObjectiveFormName(ObjectiveForm form) {
  switch (form) {
    case ObjectiveForm::kExactL1:
      return "exact_l1";
    case ObjectiveForm::kPaperLiteral:
      return "paper_literal";
  }
  return "unknown";
}

absl::StatusOr<ObjectiveForm> ParseObjectiveForm(std::string_view name) {
  if (name == "exact_l1") return ObjectiveForm::kExactL1;
  if (name == "paper_literal") return ObjectiveForm::kPaperLiteral;
  return absl::InvalidArgumentError(
      absl::StrCat("objective_form must be exact_l1 or paper_literal, got '",
                   std::string(name), "'"));
}

absl::StatusOr<double> DpLossCoefficient(const PrivacyConstants& constants) {
  if (!(constants.c2 > 0.0))
    return absl::InvalidArgumentError("c2 must be > 0");
  if (!(constants.delta > 0.0 && constants.delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (!(constants.dimension > 0.0) || !(constants.iterations > 0.0) ||
      !(constants.smoothness > 0.0)) {
    return absl::InvalidArgumentError(
        "dimension, iterations and smoothness must be > 0");
  }
  return 2.0 * constants.c2 * constants.c2 * std::log(1.0 / constants.delta) *
         constants.dimension * std::sqrt(constants.iterations) *
         constants.smoothness;
}

absl::Status ValidateServerConfig(const ServerConfig& config) {
  if (!std::isfinite(config.eta) || config.eta < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta must be finite and >= 0, got ", config.eta));
  }
  if (!std::isfinite(config.q) || !(config.q > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("q must be finite and > 0, got ", config.q));
  }
  if (!std::isfinite(config.grid_delta) || !(config.grid_delta > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid_delta must be > 0, got ", config.grid_delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<ClientType>> MakeClients(
    std::span<const double> sensitivities, const CostDistribution& dist) {
  std::vector<ClientType> clients;
  clients.reserve(sensitivities.size());
  for (std::size_t k = 0; k < sensitivities.size(); ++k) {
    JSAM_ASSIGN_OR_RETURN(double v, VirtualCost(sensitivities[k], dist));
    clients.push_back(ClientType{.index = static_cast<int>(k),
                                 .sensitivity = sensitivities[k],
                                 .virtual_cost = v,
                                 .distribution = dist});
  }
  return clients;
}

int MechanismOutcome::SelectedCount() const {
  return static_cast<int>(std::count_if(probabilities.begin(),
                                        probabilities.end(),
                                        [](double p) { return p > 0.0; }));
}

std::vector<std::size_t> SortByVirtualCost(
    std::span<const double> virtual_costs) {
  std::vector<std::size_t> order(virtual_costs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return virtual_costs[a] < virtual_costs[b];
                   });
  return order;
}

absl::StatusOr<std::vector<double>> OptimalEpsilon(
    std::span<const double> probabilities, double total_budget,
    std::span<const double> virtual_costs) {
  if (probabilities.size() != virtual_costs.size()) {
    return absl::InvalidArgumentError(
        "probability and virtual-cost vectors differ in length");
  }
  if (!(total_budget >= 0.0) || !std::isfinite(total_budget)) {
    return absl::InvalidArgumentError(
        absl::StrCat("total budget must be >= 0, got ", total_budget));
  }
  double normalizer = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    const double p = probabilities[k];
    if (p < 0.0 || !std::isfinite(p)) {
      return absl::InvalidArgumentError("probabilities must be >= 0");
    }
    if (p == 0.0) continue;
    if (!(virtual_costs[k] > 0.0) || !std::isfinite(virtual_costs[k])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "selected client ", k, " needs a positive virtual cost"));
    }
    normalizer += TwoThirds(virtual_costs[k] * p);
  }
  if (!(normalizer > 0.0)) {
    return absl::InvalidArgumentError("probability vector is all zero");
  }
  std::vector<double> budgets(probabilities.size(), 0.0);
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] == 0.0) continue;
    budgets[k] = TwoThirds(probabilities[k]) * total_budget /
                 (normalizer * std::cbrt(virtual_costs[k]));
  }
  return budgets;
}

double LeadProbability(int threshold, double threshold_probability,
                       int num_clients) {
  if (threshold == 1) return 1.0;
  return static_cast<double>(2 + num_clients - threshold) / num_clients -
         threshold_probability;
}

double DeviationTerm(int threshold, double threshold_probability,
                     int num_clients, ObjectiveForm form) {
  const double lead =
      LeadProbability(threshold, threshold_probability, num_clients);
  switch (form) {
    case ObjectiveForm::kExactL1:
      return 2.0 * (lead - 1.0 / num_clients);
    case ObjectiveForm::kPaperLiteral:
      return 2.0 * (lead - (threshold == 1 ? 1.0 / num_clients
                                           : threshold_probability));
  }
  return 0.0;
}

InnerSolution MinimizeOverBudget(double eta, double deviation,
                                 double weighted_concentration) {
  if (eta == 0.0) return {.budget = 0.0, .objective = 0.0, .degenerate = true};
  const double dev = deviation;
  const double qc = weighted_concentration;
  auto objective = [&](double b) {
    return eta * std::sqrt(dev * dev + qc / (b * b)) + eta * dev + b;
  };
  if (qc == 0.0) {
    return {.budget = 0.0, .objective = 2.0 * eta * dev, .degenerate = true};
  }
  // d/dB = 1 - eta qc / (B^2 sqrt(dev^2 B^2 + qc)), increasing in B.
  auto derivative = [&](double b) {
    return 1.0 - eta * qc / (b * b * std::sqrt(dev * dev * b * b + qc));
  };
  double lo = kBudgetLowerBracket;
  if (derivative(lo) >= 0.0) {
    return {.budget = lo, .objective = objective(lo), .degenerate = false};
  }
  double hi = 1.0;
  while (derivative(hi) <= 0.0) {
    lo = std::max(lo, hi);
    hi *= 2.0;
  }
  // Newton on the derivative, falling back to a geometric bisection step
  // whenever the iterate leaves the sign bracket.
  auto curvature = [&](double b) {
    const double inner = dev * dev * b * b + qc;
    return eta * qc / (b * b * b * std::sqrt(inner)) *
           (2.0 + dev * dev * b * b / inner);
  };
  double x = std::min(hi, std::sqrt(eta) * std::sqrt(std::sqrt(qc)));
  for (int iter = 0; iter < 400 && hi - lo > kBudgetRelativeTolerance * hi;
       ++iter) {
    const double d = derivative(x);
    if (d == 0.0) {
      lo = hi = x;
      break;
    }
    if (d > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double step = d / curvature(x);
    double next = x - step;
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    if (std::abs(next - x) <= 0.01 * kBudgetRelativeTolerance * x) {
      lo = hi = next;
      break;
    }
    x = next;
  }
  const double budget = 0.5 * (lo + hi);
  return {
      .budget = budget, .objective = objective(budget), .degenerate = false};
}

absl::StatusOr<double> ReducedObjective(
    int threshold, double threshold_probability, double total_budget,
    std::span<const double> sorted_virtual_costs, const ServerConfig& config) {
  JSAM_RETURN_IF_ERROR(ValidateServerConfig(config));
  JSAM_RETURN_IF_ERROR(CheckSortedCosts(sorted_virtual_costs));
  const int n = static_cast<int>(sorted_virtual_costs.size());
  JSAM_RETURN_IF_ERROR(CheckThresholdPair(threshold, threshold_probability, n));
  if (!(total_budget > 0.0)) {
    return absl::InvalidArgumentError("total budget must be > 0");
  }
  const double p_h = std::clamp(threshold_probability, 0.0, 1.0 / n);
  const double lead = LeadProbability(threshold, p_h, n);
  const double c =
      ThresholdConcentration(threshold, lead, p_h, sorted_virtual_costs,
                             TwoThirdsPrefix(sorted_virtual_costs));
  const double dev = DeviationTerm(threshold, p_h, n, config.objective_form);
  return config.eta * std::sqrt(dev * dev +
                                config.q * c / (total_budget * total_budget)) +
         config.eta * dev + total_budget;
}

absl::StatusOr<InnerSolution> SolveInnerBudget(
    int threshold, double threshold_probability,
    std::span<const double> sorted_virtual_costs, const ServerConfig& config) {
  JSAM_RETURN_IF_ERROR(ValidateServerConfig(config));
  JSAM_RETURN_IF_ERROR(CheckSortedCosts(sorted_virtual_costs));
  const int n = static_cast<int>(sorted_virtual_costs.size());
  JSAM_RETURN_IF_ERROR(CheckThresholdPair(threshold, threshold_probability, n));
  const double p_h = std::clamp(threshold_probability, 0.0, 1.0 / n);
  const double lead = LeadProbability(threshold, p_h, n);
  const double c =
      ThresholdConcentration(threshold, lead, p_h, sorted_virtual_costs,
                             TwoThirdsPrefix(sorted_virtual_costs));
  return MinimizeOverBudget(
      config.eta, DeviationTerm(threshold, p_h, n, config.objective_form),
      config.q * c);
}

absl::StatusOr<InnerSolution> SolveBudgetForPlan(
    std::span<const double> probabilities,
    std::span<const double> virtual_costs, const ServerConfig& config) {
  JSAM_RETURN_IF_ERROR(ValidateServerConfig(config));
  if (probabilities.empty() || probabilities.size() != virtual_costs.size()) {
    return absl::InvalidArgumentError("plan and virtual costs mismatch");
  }
  const double uniform = 1.0 / probabilities.size();
  double deviation = 0.0;
  double sum = 0.0;
  double inner = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    const double p = probabilities[k];
    if (p < 0.0) return absl::InvalidArgumentError("negative probability");
    sum += p;
    deviation += std::abs(p - uniform);
    if (p == 0.0) continue;
    if (!(virtual_costs[k] > 0.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "selected client ", k, " needs a positive virtual cost"));
    }
    inner += TwoThirds(virtual_costs[k] * p);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("probabilities sum to ", sum, ", not 1"));
  }
  return MinimizeOverBudget(config.eta, deviation,
                            config.q * inner * inner * inner);
}

double ServerObjective(std::span<const double> probabilities,
                       std::span<const double> budgets,
                       std::span<const double> virtual_costs,
                       const ServerConfig& config) {
  const double uniform = 1.0 / probabilities.size();
  double deviation = 0.0;
  double dp_term = 0.0;
  double money = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    deviation += std::abs(probabilities[k] - uniform);
    money += virtual_costs[k] * budgets[k];
    if (probabilities[k] > 0.0) {
      if (!(budgets[k] > 0.0)) return std::numeric_limits<double>::infinity();
      const double ratio = probabilities[k] / budgets[k];
      dp_term += ratio * ratio;
    }
  }
  return config.eta * (deviation +
                       std::sqrt(deviation * deviation + config.q * dp_term)) +
         money;
}

absl::StatusOr<MechanismOutcome> JsamSolve(
    std::span<const double> virtual_costs, const ServerConfig& config) {
  if (virtual_costs.empty()) {
    return absl::InvalidArgumentError("empty client list");
  }
  JSAM_RETURN_IF_ERROR(ValidateServerConfig(config));
  const int n = static_cast<int>(virtual_costs.size());
  if (config.grid_delta > 1.0 / n + kProbabilityTolerance) {
    return absl::InvalidArgumentError(absl::StrCat(
        "grid_delta ", config.grid_delta, " exceeds 1/N = ", 1.0 / n));
  }
  std::vector<std::size_t> order = SortByVirtualCost(virtual_costs);
  std::vector<double> sorted(n);
  for (int r = 0; r < n; ++r) sorted[r] = virtual_costs[order[r]];
  JSAM_RETURN_IF_ERROR(CheckSortedCosts(sorted));
  const std::vector<double> prefix = TwoThirdsPrefix(sorted);

  const double uniform = 1.0 / n;
  const int max_step =
      static_cast<int>(std::floor(1.0 / (n * config.grid_delta) + 1e-9));

  double best_objective = std::numeric_limits<double>::infinity();
  int best_threshold = 0;
  int best_step = 0;
  double best_threshold_probability = uniform;
  InnerSolution best_inner;

  for (int i = 1; i <= n; ++i) {
    const int h = n + 1 - i;
    const int last_step = h == 1 ? 0 : max_step;
    for (int m = 0; m <= last_step; ++m) {
      const double p_h =
          h == 1 ? uniform : std::max(0.0, uniform - m * config.grid_delta);
      const double lead = LeadProbability(h, p_h, n);
      const double c = ThresholdConcentration(h, lead, p_h, sorted, prefix);
      const double dev = DeviationTerm(h, p_h, n, config.objective_form);
      const InnerSolution inner =
          MinimizeOverBudget(config.eta, dev, config.q * c);
      const bool better =
          inner.objective < best_objective ||
          (inner.objective == best_objective &&
           (h < best_threshold || (h == best_threshold && m < best_step)));
      if (better) {
        best_objective = inner.objective;
        best_threshold = h;
        best_step = m;
        best_threshold_probability = p_h;
        best_inner = inner;
      }
    }
  }

  MechanismOutcome outcome;
  outcome.probabilities.assign(n, 0.0);
  const double lead =
      LeadProbability(best_threshold, best_threshold_probability, n);
  for (int r = 0; r < n; ++r) {
    const int rank = r + 1;
    double p = 0.0;
    if (rank == 1) {
      p = lead;
    } else if (rank < best_threshold) {
      p = uniform;
    } else if (rank == best_threshold) {
      p = best_threshold_probability;
    }
    outcome.probabilities[order[r]] = p;
  }
  JSAM_ASSIGN_OR_RETURN(
      outcome.budgets,
      OptimalEpsilon(outcome.probabilities, best_inner.budget, virtual_costs));
  outcome.total_budget = best_inner.budget;
  outcome.threshold = best_threshold;
  outcome.threshold_probability =
      best_threshold == 1 ? 1.0 : best_threshold_probability;
  outcome.objective = best_objective;
  outcome.order = std::move(order);
  outcome.degenerate = best_inner.degenerate;
  return outcome;
}

absl::StatusOr<MechanismOutcome> JsamSolve(std::span<const ClientType> clients,
                                           const ServerConfig& config) {
  std::vector<double> virtual_costs;
  virtual_costs.reserve(clients.size());
  for (const ClientType& client : clients) {
    virtual_costs.push_back(client.virtual_cost);
  }
  return JsamSolve(virtual_costs, config);
}

StructureReport VerifyStructure(std::span<const double> probabilities,
                                std::span<const std::size_t> order,
                                double tolerance) {
  const std::size_t n = probabilities.size();
  if (n == 0 || order.size() != n) {
    return {.pass = false, .violation = "order does not match the plan"};
  }
  const double uniform = 1.0 / n;
  if (probabilities[order[0]] < uniform - tolerance) {
    return {.pass = false,
            .violation = "lowest-cost client selected below 1/N"};
  }
  enum class Phase { kUniform, kAfterPartial, kExcluded };
  Phase phase = Phase::kUniform;
  for (std::size_t r = 1; r < n; ++r) {
    const double p = probabilities[order[r]];
    if (p > uniform + tolerance) {
      return {.pass = false,
              .violation = absl::StrCat("rank ", r + 1,
                                        " exceeds 1/N; only the lowest-cost "
                                        "client may")};
    }
    const bool at_uniform = std::abs(p - uniform) <= tolerance;
    const bool excluded = p <= tolerance;
    switch (phase) {
      case Phase::kUniform:
        if (at_uniform) break;
        phase = excluded ? Phase::kExcluded : Phase::kAfterPartial;
        break;
      case Phase::kAfterPartial:
      case Phase::kExcluded:
        if (excluded) {
          phase = Phase::kExcluded;
          break;
        }
        if (phase == Phase::kAfterPartial && !at_uniform) {
          return {.pass = false,
                  .violation = absl::StrCat(
                      "more than one client strictly between 0 and 1/N (rank ",
                      r + 1, ")")};
        }
        return {.pass = false,
                .violation = absl::StrCat(
                    "rank ", r + 1, " is selected after the threshold client")};
    }
  }
  return {};
}

}  // namespace jsam
