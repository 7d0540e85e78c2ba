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
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "jsam/numeric.h"
#include "jsam/random.h"
#include "jsam/status_macros.h"

namespace jsam {
namespace {

constexpr double kLowerLift = 1e-6;
constexpr double kIrSlack = 1e-6;
constexpr double kCoverSlack = 1e-12;

// Index j of the segment [grid[j], grid[j+1]] holding z.
std::size_t SegmentOf(const std::vector<double>& grid, double z) {
  auto it = std::upper_bound(grid.begin(), grid.end(), z);
  std::size_t j = it == grid.begin() ? 0 : (it - grid.begin()) - 1;
  return std::min(j, grid.size() - 2);
}

double Interpolate(const std::vector<double>& grid,
                   const std::vector<double>& values, double z) {
  if (z <= grid.front()) return values.front();
  if (z >= grid.back()) return values.back();
  const std::size_t j = SegmentOf(grid, z);
  const double t = (z - grid[j]) / (grid[j + 1] - grid[j]);
  return values[j] + t * (values[j + 1] - values[j]);
}

double IntegrateFrom(const std::vector<double>& grid,
                     const std::vector<double>& values, double z) {
  z = std::clamp(z, grid.front(), grid.back());
  if (z >= grid.back()) return 0.0;
  const std::size_t j = SegmentOf(grid, z);
  double total =
      0.5 * (grid[j + 1] - z) * (Interpolate(grid, values, z) + values[j + 1]);
  for (std::size_t i = j + 1; i + 1 < grid.size(); ++i) {
    total += 0.5 * (grid[i + 1] - grid[i]) * (values[i] + values[i + 1]);
  }
  return total;
}

// Same integral on every other node, for the Richardson error estimate.
double CoarseIntegrateFrom(const std::vector<double>& grid,
                           const std::vector<double>& values, double z) {
  std::vector<double> coarse_grid;
  std::vector<double> coarse_values;
  for (std::size_t i = 0; i < grid.size(); i += 2) {
    coarse_grid.push_back(grid[i]);
    coarse_values.push_back(values[i]);
  }
  if (coarse_grid.back() != grid.back()) {
    coarse_grid.push_back(grid.back());
    coarse_values.push_back(values.back());
  }
  if (coarse_grid.size() < 2) return IntegrateFrom(grid, values, z);
  return IntegrateFrom(coarse_grid, coarse_values, z);
}

}  // namespace

AllocationRule JsamAllocationRule(const CostDistribution& dist,
                                  const ServerConfig& config) {
  return [dist, config](std::span<const double> costs)
             -> absl::StatusOr<std::vector<double>> {
    std::vector<double> virtual_costs(costs.size());
    for (std::size_t k = 0; k < costs.size(); ++k) {
      JSAM_ASSIGN_OR_RETURN(virtual_costs[k], VirtualCost(costs[k], dist));
    }
    JSAM_ASSIGN_OR_RETURN(MechanismOutcome outcome,
                          JsamSolve(virtual_costs, config));
    return std::move(outcome.budgets);
  };
}

bool InterimAllocation::Covers(double z) const {
  return !grid.empty() && z >= grid.front() - kCoverSlack &&
         z <= grid.back() + kCoverSlack;
}

double InterimAllocation::At(double z) const {
  return Interpolate(grid, allocation, z);
}

double InterimAllocation::IntegralFrom(double z) const {
  return IntegrateFrom(grid, allocation, z);
}

double InterimGridLower(const CostDistribution& dist) {
  if (dist.VirtualCostUnchecked(dist.lower()) > 0.0) return dist.lower();
  return dist.lower() + kLowerLift * (dist.upper() - dist.lower());
}

std::vector<double> InterimGrid(const CostDistribution& dist, int grid_size) {
  const double lo = InterimGridLower(dist);
  const double hi = dist.upper();
  if (lo == dist.lower() || grid_size < 4) {
    std::vector<double> grid(grid_size);
    for (int j = 0; j < grid_size; ++j) {
      grid[j] =
          j + 1 == grid_size ? hi : lo + (hi - lo) * j / (grid_size - 1.0);
    }
    return grid;
  }
  // Budgets blow up like 1/z at a zero virtual cost, so half the nodes are
  // spaced geometrically inside the first uniform cell.
  const int geometric = grid_size / 2;
  const int uniform = grid_size - geometric;
  const double step = (hi - lo) / (uniform - 1.0);
  const double first = lo - dist.lower();
  const double ratio = std::pow(step / first, 1.0 / (geometric + 1));
  std::vector<double> grid;
  grid.reserve(grid_size);
  grid.push_back(lo);
  double offset = first;
  for (int i = 0; i < geometric; ++i) {
    offset *= ratio;
    grid.push_back(dist.lower() + offset);
  }
  for (int j = 1; j < uniform; ++j) {
    grid.push_back(j + 1 == uniform ? hi : lo + step * j);
  }
  return grid;
}

absl::StatusOr<InterimAllocation> ComputeInterimAllocation(
    int client, int num_clients, const CostDistribution& dist,
    const AllocationRule& rule, const InterimOptions& options) {
  if (num_clients < 1 || client < 0 || client >= num_clients) {
    return absl::InvalidArgumentError(
        absl::StrCat("client ", client, " outside [0, ", num_clients, ")"));
  }
  if (options.grid_size < 2) {
    return absl::InvalidArgumentError("interim grid needs at least 2 nodes");
  }
  if (options.samples < 1) {
    return absl::InvalidArgumentError("interim needs at least 1 sample");
  }
  const int grid_size = options.grid_size;
  const int samples = options.samples;
  const int others = num_clients - 1;

  InterimAllocation interim;
  interim.client = client;
  interim.samples = samples;
  interim.seed = options.seed;
  interim.grid = InterimGrid(dist, grid_size);

  std::vector<double> opponents(static_cast<std::size_t>(samples) * others);
  for (int s = 0; s < samples; ++s) {
    Rng rng(DeriveSeed(options.seed, {static_cast<std::uint64_t>(s)}));
    for (int i = 0; i < others; ++i) {
      opponents[static_cast<std::size_t>(s) * others + i] =
          dist.Quantile(rng.Uniform());
    }
  }

  std::vector<double> draws(samples);
  std::vector<double> profile(num_clients);
  interim.allocation.resize(grid_size);
  for (int j = 0; j < grid_size; ++j) {
    for (int s = 0; s < samples; ++s) {
      const double* row =
          opponents.data() + static_cast<std::size_t>(s) * others;
      for (int k = 0, i = 0; k < num_clients; ++k) {
        profile[k] = k == client ? interim.grid[j] : row[i++];
      }
      JSAM_ASSIGN_OR_RETURN(std::vector<double> budgets, rule(profile));
      if (budgets.size() != profile.size()) {
        return absl::InternalError("allocation rule returned wrong length");
      }
      draws[s] = budgets[client];
    }
    interim.allocation[j] = PairwiseSum(draws) / samples;
  }
  return interim;
}

absl::StatusOr<InterimAllocation> MakeInterimAllocation(
    std::vector<double> grid, std::vector<double> allocation, int samples) {
  if (grid.size() < 2 || grid.size() != allocation.size()) {
    return absl::InvalidArgumentError(
        "interim needs at least 2 nodes and one value per node");
  }
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (!(grid[j] > grid[j - 1])) {
      return absl::InvalidArgumentError("interim grid must be increasing");
    }
  }
  InterimAllocation interim;
  interim.grid = std::move(grid);
  interim.allocation = std::move(allocation);
  interim.samples = samples;
  return interim;
}

absl::StatusOr<Payment> ComputePayment(double cost,
                                       const InterimAllocation& interim,
                                       PaymentSabotage sabotage) {
  if (!interim.Covers(cost)) {
    return absl::OutOfRangeError(
        absl::StrCat("cost ", cost, " outside the interim grid [",
                     interim.grid.front(), ", ", interim.grid.back(), "]"));
  }
  const double fine = interim.IntegralFrom(cost);
  const double coarse =
      CoarseIntegrateFrom(interim.grid, interim.allocation, cost);
  const double integral =
      sabotage == PaymentSabotage::kNegatedIntegral ? -fine : fine;
  return Payment{.amount = integral + cost * interim.At(cost),
                 .quadrature_error = std::abs(fine - coarse) / 3.0};
}

double McTolerance(int samples) {
  if (samples <= 0) return 1e-12;
  return 3.0 / std::sqrt(static_cast<double>(samples));
}

absl::StatusOr<IcReport> VerifyIc(double true_cost,
                                  std::span<const double> misreports,
                                  const InterimAllocation& interim,
                                  double tolerance, PaymentSabotage sabotage) {
  JSAM_ASSIGN_OR_RETURN(Payment truthful,
                        ComputePayment(true_cost, interim, sabotage));
  const double truthful_utility =
      truthful.amount - true_cost * interim.At(true_cost);
  std::vector<double> gains;
  double quadrature = truthful.quadrature_error;
  for (double report : misreports) {
    JSAM_ASSIGN_OR_RETURN(Payment paid,
                          ComputePayment(report, interim, sabotage));
    gains.push_back(paid.amount - true_cost * interim.At(report) -
                    truthful_utility);
    quadrature = std::max(quadrature, paid.quadrature_error);
  }
  IcReport report;
  report.tolerance =
      tolerance >= 0.0 ? tolerance : McTolerance(interim.samples) + quadrature;
  report.worst_gain = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (gains[i] > report.worst_gain) {
      report.worst_gain = gains[i];
      report.worst_misreport = misreports[i];
    }
  }
  if (gains.empty()) report.worst_gain = 0.0;
  if (report.worst_gain > report.tolerance) {
    report.pass = false;
    report.violation = absl::StrCat("incentive compatibility: reporting ",
                                    report.worst_misreport, " instead of ",
                                    true_cost, " gains ", report.worst_gain,
                                    " > tolerance ", report.tolerance);
  }
  return report;
}

absl::StatusOr<IcReport> VerifyIc(int client, double true_cost,
                                  std::span<const double> misreports,
                                  int num_clients, const CostDistribution& dist,
                                  const AllocationRule& rule,
                                  const InterimOptions& options,
                                  double tolerance) {
  JSAM_ASSIGN_OR_RETURN(
      InterimAllocation interim,
      ComputeInterimAllocation(client, num_clients, dist, rule, options));
  return VerifyIc(true_cost, misreports, interim, tolerance);
}

bool VerifyIr(double cost, double payment, double budget) {
  return payment - cost * budget >= -kIrSlack;
}

MonotoneReport VerifyMonotoneAllocation(const InterimAllocation& interim,
                                        double tolerance) {
  MonotoneReport report;
  report.tolerance =
      tolerance >= 0.0 ? tolerance : McTolerance(interim.samples);
  for (std::size_t j = 0; j + 1 < interim.allocation.size(); ++j) {
    const double rise = interim.allocation[j + 1] - interim.allocation[j];
    if (rise > report.worst_rise) report.worst_rise = rise;
    if (report.pass && rise > report.tolerance) {
      report.pass = false;
      report.violation = absl::StrCat(
          "allocation monotonicity: budget rises by ", rise,
          " between reports ", interim.grid[j], " and ", interim.grid[j + 1]);
    }
  }
  return report;
}

}  // namespace jsam
