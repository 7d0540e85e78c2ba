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

#ifndef JSAM_CLI_CONFIG_H_
#define JSAM_CLI_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "jsam/cost_distribution.h"
#include "jsam/flsim/task.h"
#include "jsam/flsim/trainer.h"
#include "jsam/mechanism.h"

namespace jsam::cli {

struct CostSpec {
  // "uniform" or "truncated_gaussian".
  std::string kind = "uniform";
  double lower = 0.0;
  double upper = 1.0;
  double mean = 0.5;
  double stddev = 0.2;

  friend bool operator==(const CostSpec&, const CostSpec&) = default;
};

struct AuditSpec {
  int clients = 3;
  int cross_check_instances = 5;
  double simplex_step = 0.02;
  int true_costs = 10;
  int misreports = 5;
  int ir_profiles = 20;
  int identity_triples = 1000;
  // "none", "negated_integral" or "increasing_allocation".
  std::string sabotage = "none";

  friend bool operator==(const AuditSpec&, const AuditSpec&) = default;
};

struct ExperimentConfig {
  int num_clients = 100;
  CostSpec costs;

  // One entry per sweep point; solve and simulate use every entry too.
  std::vector<double> eta = {1.0};
  // Explicit Q; when absent Q is derived from c2, delta, the model size,
  // the round count and `smoothness`.
  std::optional<double> q;
  double smoothness = 1.0;
  double grid_delta = 1e-3;
  ObjectiveForm objective_form = ObjectiveForm::kExactL1;
  // Fixes B = sum_k v_k eps_k for every mechanism (equal expected spend).
  std::optional<double> budget;

  flsim::RunConfig run;
  int similarity = 30;
  flsim::TaskSpec task;

  std::vector<std::string> mechanisms = {"jsam"};
  std::vector<std::uint64_t> seeds = {0};
  std::uint64_t root_seed = 0;
  int payment_grid = 50;
  int payment_samples = 100;
  bool sweep_train = true;
  AuditSpec audit;
  std::string output;

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

// Unknown keys and out-of-range values are errors naming the field.
absl::StatusOr<ExperimentConfig> ParseConfig(const std::string& json_text);
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);
std::string SerializeConfig(const ExperimentConfig& config);

absl::Status ValidateConfig(const ExperimentConfig& config);

absl::StatusOr<CostDistribution> MakeDistribution(const CostSpec& spec);

// Q for the config: the explicit value or the derived coefficient.
absl::StatusOr<double> ResolveQ(const ExperimentConfig& config);

absl::StatusOr<ServerConfig> MakeServerConfig(const ExperimentConfig& config,
                                              double eta);

}  // namespace jsam::cli

#endif  // JSAM_CLI_CONFIG_H_
