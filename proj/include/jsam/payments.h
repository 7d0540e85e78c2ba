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

#ifndef JSAM_PAYMENTS_H_
#define JSAM_PAYMENTS_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "jsam/cost_distribution.h"
#include "jsam/mechanism.h"

namespace jsam {

// Maps a full reported cost profile to the privacy budget of every client.
using AllocationRule = std::function<absl::StatusOr<std::vector<double>>(
    std::span<const double> costs)>;

// Virtual costs under `dist`, then the grid-search solver.
AllocationRule JsamAllocationRule(const CostDistribution& dist,
                                  const ServerConfig& config);

struct InterimOptions {
  int grid_size = 200;
  int samples = 200;
  std::uint64_t seed = 0;
};

// Expected budget of one client as a function of its own report, averaged
// over the other clients' costs and linearly interpolated between nodes.
struct InterimAllocation {
  int client = 0;
  std::vector<double> grid;
  std::vector<double> allocation;
  int samples = 0;
  std::uint64_t seed = 0;

  bool Covers(double z) const;
  // Piecewise-linear value; clamps to the end nodes outside the grid.
  double At(double z) const;
  // Exact integral of the interpolant from z to the last node.
  double IntegralFrom(double z) const;
};

// Lowest report the grid starts at. Lifted slightly above the support's
// lower bound when the virtual cost vanishes there, since budgets diverge
// as the virtual cost goes to zero.
double InterimGridLower(const CostDistribution& dist);

// Report nodes: uniform over [InterimGridLower, upper], with half of them
// moved into a geometric cluster next to the lower bound when it was lifted.
std::vector<double> InterimGrid(const CostDistribution& dist, int grid_size);

// Common random numbers: sample s redraws the same opponent profile at
// every grid node.
absl::StatusOr<InterimAllocation> ComputeInterimAllocation(
    int client, int num_clients, const CostDistribution& dist,
    const AllocationRule& rule, const InterimOptions& options);

// Wraps a tabulated curve, e.g. a closed-form rule.
absl::StatusOr<InterimAllocation> MakeInterimAllocation(
    std::vector<double> grid, std::vector<double> allocation, int samples = 0);

struct Payment {
  double amount = 0.0;
  // Richardson estimate from halving the node set.
  double quadrature_error = 0.0;
};

// Deliberate payment defects used to prove the audit can fail.
enum class PaymentSabotage { kNone, kNegatedIntegral };

// pi(c) = integral_c^{c_max} e(z) dz + c e(c).
absl::StatusOr<Payment> ComputePayment(
    double cost, const InterimAllocation& interim,
    PaymentSabotage sabotage = PaymentSabotage::kNone);

// Monte-Carlo slack for an interim built from `samples` draws.
double McTolerance(int samples);

struct IcReport {
  bool pass = true;
  double tolerance = 0.0;
  // Largest (misreport utility - truthful utility) seen.
  double worst_gain = 0.0;
  double worst_misreport = 0.0;
  std::string violation;
};

// A negative tolerance selects 3/sqrt(S) plus the payments' quadrature error.
absl::StatusOr<IcReport> VerifyIc(
    double true_cost, std::span<const double> misreports,
    const InterimAllocation& interim, double tolerance = -1.0,
    PaymentSabotage sabotage = PaymentSabotage::kNone);

absl::StatusOr<IcReport> VerifyIc(int client, double true_cost,
                                  std::span<const double> misreports,
                                  int num_clients, const CostDistribution& dist,
                                  const AllocationRule& rule,
                                  const InterimOptions& options,
                                  double tolerance = -1.0);

bool VerifyIr(double cost, double payment, double budget);

struct MonotoneReport {
  bool pass = true;
  double tolerance = 0.0;
  // Largest increase between consecutive nodes.
  double worst_rise = 0.0;
  std::string violation;
};

// A negative tolerance selects 3/sqrt(S).
MonotoneReport VerifyMonotoneAllocation(const InterimAllocation& interim,
                                        double tolerance = -1.0);

}  // namespace jsam

#endif  // JSAM_PAYMENTS_H_
