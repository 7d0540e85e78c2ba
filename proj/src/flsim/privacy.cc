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

#include "jsam/flsim/privacy.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace jsam::flsim {
namespace {

absl::Status CheckAccounting(int participations, double delta, double c2) {
  if (participations < 1) {
    return absl::InvalidArgumentError("participation count must be >= 1");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (!(c2 > 0.0)) return absl::InvalidArgumentError("c2 must be > 0");
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> NoiseSigma(int participations, double budget,
                                  double delta, double c2) {
  if (absl::Status s = CheckAccounting(participations, delta, c2); !s.ok()) {
    return s;
  }
  if (!(budget > 0.0)) {
    return absl::FailedPreconditionError(
        absl::StrCat("selected client with privacy budget ", budget,
                     " cannot be calibrated"));
  }
  return c2 * std::sqrt(participations * std::log(1.0 / delta)) / budget;
}

absl::StatusOr<double> RecoverEpsilon(int participations, double sigma,
                                      double delta, double c2) {
  if (absl::Status s = CheckAccounting(participations, delta, c2); !s.ok()) {
    return s;
  }
  if (!(sigma > 0.0)) return absl::InvalidArgumentError("sigma must be > 0");
  return c2 * std::sqrt(participations * std::log(1.0 / delta)) / sigma;
}

Eigen::VectorXd Clip(const Eigen::VectorXd& gradient, double clip_norm) {
  return gradient / std::max(1.0, gradient.norm() / clip_norm);
}

}  // namespace jsam::flsim
