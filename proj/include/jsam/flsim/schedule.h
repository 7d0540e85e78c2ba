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

#ifndef JSAM_FLSIM_SCHEDULE_H_
#define JSAM_FLSIM_SCHEDULE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace jsam::flsim {

// Every round's participants, fixed before training starts.
struct SelectionSchedule {
  std::vector<std::vector<int>> rounds;
  // Realized participation count T_k per client.
  std::vector<int> participation;
  std::uint64_t seed = 0;
};

// `per_round` i.i.d. draws from `probabilities` per round, with replacement.
absl::StatusOr<SelectionSchedule> BuildSchedule(
    std::span<const double> probabilities, int rounds, int per_round,
    std::uint64_t seed);

// Every client in every round.
SelectionSchedule FullParticipationSchedule(int num_clients, int rounds);

}  // namespace jsam::flsim

#endif  // JSAM_FLSIM_SCHEDULE_H_
