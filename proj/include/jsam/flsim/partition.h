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

#ifndef JSAM_FLSIM_PARTITION_H_
#define JSAM_FLSIM_PARTITION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace jsam::flsim {

struct PartitionPlan {
  // Percentage of each shard drawn uniformly from the pool.
  int similarity = 0;
  int uniform_per_client = 0;
  // Pool row indices; the first `uniform_per_client` of each shard are the
  // uniform draws, the rest the label-sorted block.
  std::vector<std::vector<int>> shards;
};

// Two-stage non-IID split. Stage 1 gives every client ceil(s M / 100) rows
// drawn uniformly without replacement. Stage 2 sorts what is left by label
// and deals contiguous blocks so each block spans at most two labels.
absl::StatusOr<PartitionPlan> PartitionNonIid(std::span<const int> labels,
                                              int num_clients,
                                              int samples_per_client,
                                              int similarity,
                                              std::uint64_t seed);

}  // namespace jsam::flsim

#endif  // JSAM_FLSIM_PARTITION_H_
