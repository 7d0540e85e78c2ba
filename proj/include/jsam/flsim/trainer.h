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

#ifndef JSAM_FLSIM_TRAINER_H_
#define JSAM_FLSIM_TRAINER_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "jsam/flsim/partition.h"
#include "jsam/flsim/schedule.h"
#include "jsam/flsim/task.h"

namespace jsam::flsim {

struct RunConfig {
  int rounds = 1000;
  int per_round = 10;
  double clip_norm = 6.0;
  double learning_rate = 0.1;
  double delta = 1e-5;
  double c2 = 1.0;
  // Std-dev of the random initial weights.
  double init_scale = 0.1;
  // When false the calibrated sigmas are still reported but not applied.
  bool add_noise = true;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct RoundMetrics {
  int round = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
};

struct RunRecord {
  std::string run_id;
  std::string mechanism;
  std::uint64_t seed = 0;
  int similarity = 0;
  double eta = 0.0;
  // Up-front payments of the plan; constant over rounds.
  double monetary_cost = 0.0;
  std::vector<RoundMetrics> rounds;
  // Per-client noise multiplier; 0 for clients that never train.
  std::vector<double> sigmas;
  std::vector<int> participation;
  bool diverged = false;

  double FinalAccuracy() const;
};

// Runs the pre-drawn schedule: each round the scheduled clients send clipped,
// noised mean gradients and the server steps along their average.
absl::StatusOr<RunRecord> Train(const SyntheticTask& task,
                                const PartitionPlan& partition,
                                std::span<const double> budgets,
                                const SelectionSchedule& schedule,
                                const RunConfig& config,
                                const Eigen::VectorXd& initial_weights,
                                std::uint64_t noise_seed);

void WriteCsvHeader(std::ostream& out);
void WriteCsvRows(const RunRecord& record, std::ostream& out);

}  // namespace jsam::flsim

#endif  // JSAM_FLSIM_TRAINER_H_
