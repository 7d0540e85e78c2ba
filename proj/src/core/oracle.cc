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
#include <functional>
#include <limits>

#include "absl/strings/str_cat.h"
#include "jsam/status_macros.h"

namespace jsam {
namespace {

constexpr int kMaxBruteForceClients = 5;
constexpr int kMaxCrossCheckClients = 4;
constexpr double kMinGridStep = 1e-3;
constexpr double kGolden = 0.6180339887498949;

// Bisection on an increasing function of t until the bracket stops shrinking.
// Expands the bracket outward from [-1, 1] first.
double IncreasingRoot(const std::function<double(double)>& fn) {
  double lo = -1.0;
  double hi = 1.0;
  while (fn(lo) > 0.0) lo *= 2.0;
  while (fn(hi) < 0.0) hi *= 2.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fn(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// argmin over eps > 0 of p^2/eps^2 + lambda v eps, searched in log eps.
double CoordinateMinimizer(double p, double v, double lambda) {
  const double log_pp = std::log(2.0 * p * p);
  const double log_lv = std::log(lambda * v);
  // Sign of the derivative -2p^2/eps^3 + lambda v, compared in logs.
  return std::exp(
      IncreasingRoot([&](double t) { return log_lv - (log_pp - 3.0 * t); }));
}

absl::Status CheckPlanInputs(std::span<const double> probabilities,
                             std::span<const double> virtual_costs) {
  if (probabilities.empty() || probabilities.size() != virtual_costs.size()) {
    return absl::InvalidArgumentError("plan and virtual costs mismatch");
  }
  bool any = false;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] < 0.0) {
      return absl::InvalidArgumentError("negative probability");
    }
    if (probabilities[k] == 0.0) continue;
    any = true;
    if (!(virtual_costs[k] > 0.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "selected client ", k, " needs a positive virtual cost"));
    }
  }
  if (!any) return absl::InvalidArgumentError("probability vector is all zero");
  return absl::OkStatus();
}

double DpTerm(std::span<const double> probabilities,
              std::span<const double> budgets) {
  double total = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] == 0.0) continue;
    const double ratio = probabilities[k] / budgets[k];
    total += ratio * ratio;
  }
  return total;
}

// Budgets at multiplier 1 all lie on the ray of minimizers as the multiplier
// varies (each coordinate problem is homogeneous), so scaling them onto
// sum v eps = 1 gives the unit-budget minimizer.
double UnitBudgetDpTerm(std::span<const double> probabilities,
                        std::span<const double> virtual_costs,
                        std::vector<double>& budgets) {
  double spend = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    budgets[k] =
        probabilities[k] == 0.0
            ? 0.0
            : CoordinateMinimizer(probabilities[k], virtual_costs[k], 1.0);
    spend += virtual_costs[k] * budgets[k];
  }
  for (double& eps : budgets) eps /= spend;
  return DpTerm(probabilities, budgets);
}

struct BudgetChoice {
  double budget = 0.0;
  double objective = 0.0;
};

// Golden-section search in log B of eta (dev + sqrt(dev^2 + Q D1 / B^2)) + B.
BudgetChoice MinimizeOverBudgetGolden(double eta, double deviation,
                                      double weighted_dp) {
  if (eta == 0.0) return {};
  auto objective = [&](double t) {
    const double b = std::exp(t);
    return eta * (deviation +
                  std::sqrt(deviation * deviation + weighted_dp / (b * b))) +
           b;
  };
  double lo = std::log(1e-8);
  double hi = 0.0;
  while (objective(hi + 1.0) < objective(hi)) hi += 1.0;
  hi += 1.0;
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double t = 0.5 * (lo + hi);
  return {.budget = std::exp(t), .objective = objective(t)};
}

}  // namespace

absl::StatusOr<DpTermMinimum> MinimizeDpTerm(
    std::span<const double> probabilities,
    std::span<const double> virtual_costs, double total_budget) {
  JSAM_RETURN_IF_ERROR(CheckPlanInputs(probabilities, virtual_costs));
  if (!(total_budget > 0.0) || !std::isfinite(total_budget)) {
    return absl::InvalidArgumentError("total budget must be > 0");
  }
  const std::size_t n = probabilities.size();
  std::vector<double> budgets(n, 0.0);
  auto spend_at = [&](double log_lambda) {
    const double lambda = std::exp(log_lambda);
    double spend = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      budgets[k] =
          probabilities[k] == 0.0
              ? 0.0
              : CoordinateMinimizer(probabilities[k], virtual_costs[k], lambda);
      spend += virtual_costs[k] * budgets[k];
    }
    return spend;
  };
  // Spend falls as the multiplier grows.
  const double log_lambda = IncreasingRoot([&](double log_lambda) {
    return std::log(total_budget) - std::log(spend_at(log_lambda));
  });
  const double spend = spend_at(log_lambda);
  for (double& eps : budgets) eps *= total_budget / spend;
  DpTermMinimum result;
  result.value = DpTerm(probabilities, budgets);
  result.budgets = std::move(budgets);
  return result;
}

double CrossCheckSlack(double grid_step, double grid_delta, double eta,
                       double max_virtual_cost) {
  return 4.0 * (grid_step + grid_delta) * (eta + max_virtual_cost);
}

absl::StatusOr<BruteForceResult> BruteForceSolve(
    std::span<const double> virtual_costs, const ServerConfig& config,
    double grid_step) {
  JSAM_RETURN_IF_ERROR(ValidateServerConfig(config));
  const int n = static_cast<int>(virtual_costs.size());
  if (n < 1) return absl::InvalidArgumentError("empty client list");
  if (n > kMaxBruteForceClients) {
    return absl::InvalidArgumentError(absl::StrCat("brute force is limited to ",
                                                   kMaxBruteForceClients,
                                                   " clients, got ", n));
  }
  if (!(grid_step >= kMinGridStep) || grid_step > 1.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid step must lie in [", kMinGridStep, ", 1]"));
  }
  const long units = std::lround(1.0 / grid_step);
  if (std::abs(units * grid_step - 1.0) > 1e-9) {
    return absl::InvalidArgumentError("1 / grid_step must be an integer");
  }
  for (double v : virtual_costs) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      return absl::InvalidArgumentError("virtual costs must be positive");
    }
  }

  const double uniform = 1.0 / n;
  BruteForceResult best;
  best.grid_step = grid_step;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<long> counts(n, 0);
  std::vector<double> p(n, 0.0);
  std::vector<double> unit_budgets(n, 0.0);

  auto evaluate = [&] {
    double deviation = 0.0;
    for (int k = 0; k < n; ++k) {
      p[k] = static_cast<double>(counts[k]) / units;
      deviation += std::abs(p[k] - uniform);
    }
    const double unit_dp = UnitBudgetDpTerm(p, virtual_costs, unit_budgets);
    const BudgetChoice choice =
        MinimizeOverBudgetGolden(config.eta, deviation, config.q * unit_dp);
    ++best.evaluations;
    if (choice.objective < best.objective) {
      best.objective = choice.objective;
      best.total_budget = choice.budget;
      best.probabilities = p;
      best.budgets.resize(n);
      for (int k = 0; k < n; ++k) {
        best.budgets[k] = unit_budgets[k] * choice.budget;
      }
    }
  };

  // Compositions of `units` into n parts in lexicographic order.
  std::function<void(int, long)> enumerate = [&](int k, long remaining) {
    if (k == n - 1) {
      counts[k] = remaining;
      evaluate();
      return;
    }
    for (long c = 0; c <= remaining; ++c) {
      counts[k] = c;
      enumerate(k + 1, remaining - c);
    }
  };
  enumerate(0, units);
  return best;
}

absl::StatusOr<CrossCheckReport> CrossCheck(
    std::span<const double> virtual_costs, const ServerConfig& config,
    double grid_step) {
  if (virtual_costs.size() > kMaxCrossCheckClients) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cross check is limited to ", kMaxCrossCheckClients, " clients"));
  }
  CrossCheckReport report;
  JSAM_ASSIGN_OR_RETURN(report.jsam, JsamSolve(virtual_costs, config));
  JSAM_ASSIGN_OR_RETURN(report.brute_force,
                        BruteForceSolve(virtual_costs, config, grid_step));
  report.jsam_objective = report.jsam.objective;
  report.brute_force_objective = report.brute_force.objective;
  const double max_v =
      *std::max_element(virtual_costs.begin(), virtual_costs.end());
  report.allowance = std::max(
      0.01 * report.brute_force_objective,
      CrossCheckSlack(grid_step, config.grid_delta, config.eta, max_v));
  report.pass = std::abs(report.jsam_objective -
                         report.brute_force_objective) <= report.allowance;
  return report;
}

}  // namespace jsam
