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

#ifndef JSAM_FLSIM_TASK_H_
#define JSAM_FLSIM_TASK_H_

#include <cstdint>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"

namespace jsam::flsim {

struct TaskSpec {
  int dimension = 10;
  int classes = 4;
  // Class centers are drawn N(0, center_scale^2 I).
  double center_scale = 1.0;
  // Per-sample spread around the class center.
  double noise_std = 1.0;
  int samples_per_client = 50;
  int test_size = 2000;
  // Extra pool samples beyond N * M, absorbed when the non-IID dealer has to
  // skip a partial class block.
  int pool_surplus = 0;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

// Row i of `features` is one example; labels are in [0, classes).
struct Dataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;

  int size() const { return static_cast<int>(labels.size()); }
};

struct SyntheticTask {
  TaskSpec spec;
  Eigen::MatrixXd centers;
  Dataset pool;
  Dataset test;
};

// Gaussian blobs with balanced labels; the pool holds N * M + surplus rows.
absl::StatusOr<SyntheticTask> MakeSyntheticTask(const TaskSpec& spec,
                                                int num_clients,
                                                std::uint64_t seed);

}  // namespace jsam::flsim

#endif  // JSAM_FLSIM_TASK_H_
