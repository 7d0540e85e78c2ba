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

#ifndef JSAM_FLSIM_PRIVACY_H_
#define JSAM_FLSIM_PRIVACY_H_

#include "Eigen/Dense"
#include "absl/status/statusor.h"

namespace jsam::flsim {

// Gaussian-mechanism noise multiplier for a client that takes part in
// `participations` rounds under budget `budget`:
//   sigma = c2 sqrt(T_k ln(1/delta)) / eps_k.
absl::StatusOr<double> NoiseSigma(int participations, double budget,
                                  double delta, double c2);

// Inverse of NoiseSigma in the budget.
absl::StatusOr<double> RecoverEpsilon(int participations, double sigma,
                                      double delta, double c2);

// g / max(1, |g| / C).
Eigen::VectorXd Clip(const Eigen::VectorXd& gradient, double clip_norm);

}  // namespace jsam::flsim

#endif  // JSAM_FLSIM_PRIVACY_H_
