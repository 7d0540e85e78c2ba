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

#ifndef JSAM_CLI_COMMANDS_H_
#define JSAM_CLI_COMMANDS_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "jsam/cli/config.h"
#include "jsam/flsim/baselines.h"
#include "jsam/flsim/partition.h"
#include "jsam/flsim/task.h"
#include "jsam/flsim/trainer.h"
#include "jsam/random.h"

namespace jsam::cli {

// Every random stream is DeriveSeed(root, {purpose, seed[, mechanism]}).
// Task, costs, partition and initial model are shared by all mechanisms of
// one seed; schedule, noise and payment draws are per mechanism.
std::uint64_t StreamSeed(const ExperimentConfig& config, SeedPurpose purpose,
                         std::uint64_t seed, std::string_view mechanism = "");

// Everything one seed shares across mechanisms and eta values.
struct Scenario {
  flsim::SyntheticTask task;
  flsim::PartitionPlan partition;
  std::vector<double> costs;
  Eigen::VectorXd initial_weights;
  // Loss of the initial model on each client's shard.
  std::vector<double> client_losses;
};

absl::StatusOr<Scenario> BuildScenario(const ExperimentConfig& config,
                                       std::uint64_t seed);

absl::StatusOr<flsim::Plan> PlanFor(const ExperimentConfig& config,
                                    const Scenario& scenario,
                                    const flsim::MechanismSpec& spec,
                                    double eta, std::uint64_t seed);

absl::StatusOr<flsim::RunRecord> RunPlan(const ExperimentConfig& config,
                                         const Scenario& scenario,
                                         const flsim::MechanismSpec& spec,
                                         const flsim::Plan& plan, double eta,
                                         std::uint64_t seed);

// One record per (mechanism, seed, eta), mechanism-major.
absl::StatusOr<std::vector<flsim::RunRecord>> Simulate(
    const ExperimentConfig& config);

struct SweepRow {
  double eta = 0.0;
  std::string mechanism;
  // Means over seeds.
  double total_budget = 0.0;
  double monetary_cost = 0.0;
  double selected_clients = 0.0;
  // NaN when training is switched off.
  double final_accuracy = 0.0;
};

absl::StatusOr<std::vector<SweepRow>> Sweep(const ExperimentConfig& config);

struct AuditCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

absl::StatusOr<std::vector<AuditCheck>> Audit(const ExperimentConfig& config);

absl::Status CmdSolve(const ExperimentConfig& config, std::ostream& out);
absl::Status CmdSimulate(const ExperimentConfig& config, std::ostream& out);
// False when any audit check fails.
absl::StatusOr<bool> CmdAudit(const ExperimentConfig& config,
                              std::ostream& out);
absl::Status CmdSweep(const ExperimentConfig& config, std::ostream& out);

}  // namespace jsam::cli

#endif  // JSAM_CLI_COMMANDS_H_
