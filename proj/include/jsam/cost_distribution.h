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

#ifndef JSAM_COST_DISTRIBUTION_H_
#define JSAM_COST_DISTRIBUTION_H_

#include "absl/status/statusor.h"

namespace jsam {

// Prior over a client's privacy sensitivity (per-unit cost of privacy
// leakage). Construction rejects distributions whose virtual cost
// c + F(c)/f(c) is not strictly increasing on the support.
class CostDistribution {
 public:
  enum class Kind { kUniform, kTruncatedGaussian };

  static absl::StatusOr<CostDistribution> Uniform(double lower, double upper);
  static absl::StatusOr<CostDistribution> TruncatedGaussian(double mean,
                                                            double stddev,
                                                            double lower,
                                                            double upper);

  Kind kind() const { return kind_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  // Location and scale of the untruncated gaussian; unused for uniform.
  double mean() const { return mean_; }
  double stddev() const { return stddev_; }

  bool InSupport(double c) const;
  // Density and distribution function; 0 / clamped outside the support.
  double Pdf(double c) const;
  double Cdf(double c) const;
  // Inverse of Cdf for u in [0, 1].
  double Quantile(double u) const;
  // c + F(c)/f(c) without the support check.
  double VirtualCostUnchecked(double c) const;

  friend bool operator==(const CostDistribution&,
                         const CostDistribution&) = default;

 private:
  CostDistribution(Kind kind, double lower, double upper, double mean,
                   double stddev);
  absl::Status CheckRegularity() const;

  Kind kind_;
  double lower_;
  double upper_;
  double mean_;
  double stddev_;
  // Standard-normal cdf at the truncation bounds.
  double cdf_lower_ = 0.0;
  double cdf_mass_ = 1.0;
};

// v = c + F(c)/f(c). Uniform(a, b) gives 2c - a exactly.
absl::StatusOr<double> VirtualCost(double c, const CostDistribution& dist);

}  // namespace jsam

#endif  // JSAM_COST_DISTRIBUTION_H_
