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

#include "jsam/flsim/schedule.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "jsam/random.h"

namespace jsam::flsim {

absl::StatusOr<SelectionSchedule> BuildSchedule(
    std::span<const double> probabilities, int rounds, int per_round,
    std::uint64_t seed) {
  if (probabilities.empty()) {
    return absl::InvalidArgumentError("empty selection plan");
  }
  if (rounds < 1 || per_round < 1) {
    return absl::InvalidArgumentError("rounds and per_round must be >= 1");
  }
  std::vector<double> cumulative(probabilities.size());
  double total = 0.0;
  int last_positive = -1;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] < 0.0) {
      return absl::InvalidArgumentError("negative selection probability");
    }
    total += probabilities[k];
    cumulative[k] = total;
    if (probabilities[k] > 0.0) last_positive = static_cast<int>(k);
  }
  if (last_positive < 0 || std::abs(total - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("selection probabilities sum to ", total, ", not 1"));
  }

  SelectionSchedule schedule;
  schedule.seed = seed;
  schedule.rounds.assign(rounds, std::vector<int>(per_round));
  schedule.participation.assign(probabilities.size(), 0);
  Rng rng(seed);
  for (auto& round : schedule.rounds) {
    for (int& client : round) {
      const double u = rng.Uniform() * total;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      client =
          std::min(static_cast<int>(it - cumulative.begin()), last_positive);
      ++schedule.participation[client];
    }
  }
  return schedule;
}

SelectionSchedule FullParticipationSchedule(int num_clients, int rounds) {
  SelectionSchedule schedule;
  std::vector<int> everyone(num_clients);
  for (int k = 0; k < num_clients; ++k) everyone[k] = k;
  schedule.rounds.assign(rounds, everyone);
  schedule.participation.assign(num_clients, rounds);
  return schedule;
}

}  // namespace jsam::flsim
