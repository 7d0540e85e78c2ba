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

#include "jsam/flsim/task.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "jsam/random.h"

namespace jsam::flsim {
namespace {

// Balanced labels in shuffled order, then features around each center.
Dataset SampleBlobs(const Eigen::MatrixXd& centers, double noise_std, int rows,
                    Rng& rng) {
  const int classes = static_cast<int>(centers.rows());
  Dataset data;
  data.labels.resize(rows);
  for (int i = 0; i < rows; ++i) data.labels[i] = i % classes;
  std::shuffle(data.labels.begin(), data.labels.end(), rng.engine());
  data.features.resize(rows, centers.cols());
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < centers.cols(); ++j) {
      data.features(i, j) =
          centers(data.labels[i], j) + noise_std * rng.Normal();
    }
  }
  return data;
}

}  // namespace

absl::StatusOr<SyntheticTask> MakeSyntheticTask(const TaskSpec& spec,
                                                int num_clients,
                                                std::uint64_t seed) {
  if (spec.classes < 2) {
    return absl::InvalidArgumentError("task needs at least 2 classes");
  }
  if (spec.dimension < 1 || spec.samples_per_client < 1 || spec.test_size < 1 ||
      spec.pool_surplus < 0 || num_clients < 1) {
    return absl::InvalidArgumentError(
        "dimension, samples_per_client, test_size and client count must be "
        "positive");
  }
  if (!(spec.center_scale > 0.0) || !(spec.noise_std > 0.0)) {
    return absl::InvalidArgumentError(
        "center_scale and noise_std must be positive");
  }
  const long pool_rows =
      static_cast<long>(num_clients) * spec.samples_per_client +
      spec.pool_surplus;
  if (pool_rows < spec.classes) {
    return absl::InvalidArgumentError(absl::StrCat("pool of ", pool_rows,
                                                   " rows cannot cover ",
                                                   spec.classes, " classes"));
  }
  Rng rng(seed);
  SyntheticTask task;
  task.spec = spec;
  task.centers.resize(spec.classes, spec.dimension);
  for (int c = 0; c < spec.classes; ++c) {
    for (int j = 0; j < spec.dimension; ++j) {
      task.centers(c, j) = spec.center_scale * rng.Normal();
    }
  }
  task.pool = SampleBlobs(task.centers, spec.noise_std,
                          static_cast<int>(pool_rows), rng);
  task.test = SampleBlobs(task.centers, spec.noise_std, spec.test_size, rng);
  return task;
}

}  // namespace jsam::flsim
