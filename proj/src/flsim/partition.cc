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

#include "jsam/flsim/partition.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "jsam/random.h"

namespace jsam::flsim {

absl::StatusOr<PartitionPlan> PartitionNonIid(std::span<const int> labels,
                                              int num_clients,
                                              int samples_per_client,
                                              int similarity,
                                              std::uint64_t seed) {
  if (similarity < 0 || similarity > 100) {
    return absl::InvalidArgumentError(
        absl::StrCat("similarity must lie in [0, 100], got ", similarity));
  }
  if (num_clients < 1 || samples_per_client < 1) {
    return absl::InvalidArgumentError(
        "client count and samples per client must be positive");
  }
  const long needed = static_cast<long>(num_clients) * samples_per_client;
  if (static_cast<long>(labels.size()) < needed) {
    return absl::FailedPreconditionError(absl::StrCat(
        "pool of ", labels.size(), " rows is smaller than N * M = ", needed));
  }
  const int uniform_count = (similarity * samples_per_client + 99) / 100;
  const int block = samples_per_client - uniform_count;

  PartitionPlan plan;
  plan.similarity = similarity;
  plan.uniform_per_client = uniform_count;
  plan.shards.assign(num_clients, {});

  std::vector<int> rows(labels.size());
  std::iota(rows.begin(), rows.end(), 0);
  Rng rng(seed);
  std::shuffle(rows.begin(), rows.end(), rng.engine());
  std::size_t next = 0;
  for (int k = 0; k < num_clients; ++k) {
    plan.shards[k].assign(rows.begin() + next,
                          rows.begin() + next + uniform_count);
    next += uniform_count;
  }

  std::vector<int> rest(rows.begin() + next, rows.end());
  std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
    return labels[a] != labels[b] ? labels[a] < labels[b] : a < b;
  });
  std::size_t cursor = 0;
  for (int k = 0; k < num_clients && block > 0; ++k) {
    while (true) {
      if (cursor + block > rest.size()) {
        return absl::FailedPreconditionError(
            absl::StrCat("pool exhausted while dealing label blocks to client ",
                         k, "; increase pool_surplus"));
      }
      int distinct = 1;
      std::size_t second_start = 0;
      for (std::size_t i = cursor + 1; i < cursor + block; ++i) {
        if (labels[rest[i]] != labels[rest[i - 1]]) {
          if (++distinct == 2) second_start = i;
        }
      }
      if (distinct <= 2) break;
      // The block would straddle three labels: restart at the next label.
      cursor = second_start;
    }
    plan.shards[k].insert(plan.shards[k].end(), rest.begin() + cursor,
                          rest.begin() + cursor + block);
    cursor += block;
  }
  return plan;
}

}  // namespace jsam::flsim
