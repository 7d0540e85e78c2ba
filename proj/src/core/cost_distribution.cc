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

#include "jsam/cost_distribution.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "jsam/numeric.h"
#include "jsam/status_macros.h"

namespace jsam {
namespace {

constexpr int kRegularityGridPoints = 1000;

double SupportSlack(double lower, double upper) {
  return 1e-12 * std::max(1.0, upper - lower);
}

}  // namespace

CostDistribution::CostDistribution(Kind kind, double lower, double upper,
                                   double mean, double stddev)
    : kind_(kind), lower_(lower), upper_(upper), mean_(mean), stddev_(stddev) {
  if (kind_ == Kind::kTruncatedGaussian) {
    cdf_lower_ = NormalCdf((lower_ - mean_) / stddev_);
    cdf_mass_ = NormalCdf((upper_ - mean_) / stddev_) - cdf_lower_;
  }
}

absl::StatusOr<CostDistribution> CostDistribution::Uniform(double lower,
                                                           double upper) {
  if (!(lower >= 0.0) || !(upper > lower) || !std::isfinite(upper)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "uniform cost distribution needs 0 <= lower < upper, got [", lower,
        ", ", upper, "]"));
  }
  CostDistribution dist(Kind::kUniform, lower, upper, 0.0, 0.0);
  JSAM_RETURN_IF_ERROR(dist.CheckRegularity());
  return dist;
}

absl::StatusOr<CostDistribution> CostDistribution::TruncatedGaussian(
    double mean, double stddev, double lower, double upper) {
  if (!(lower >= 0.0) || !(upper > lower) || !std::isfinite(upper)) {
    return absl::InvalidArgumentError(
        absl::StrCat("truncated gaussian needs 0 <= lower < upper, got [",
                     lower, ", ", upper, "]"));
  }
  if (!(stddev > 0.0) || !std::isfinite(mean)) {
    return absl::InvalidArgumentError(
        absl::StrCat("truncated gaussian needs stddev > 0, got ", stddev));
  }
  CostDistribution dist(Kind::kTruncatedGaussian, lower, upper, mean, stddev);
  if (!(dist.cdf_mass_ > 0.0)) {
    return absl::InvalidArgumentError(
        "truncated gaussian has no probability mass on its support");
  }
  JSAM_RETURN_IF_ERROR(dist.CheckRegularity());
  return dist;
}

bool CostDistribution::InSupport(double c) const {
  const double slack = SupportSlack(lower_, upper_);
  return c >= lower_ - slack && c <= upper_ + slack;
}

double CostDistribution::Pdf(double c) const {
  if (!InSupport(c)) return 0.0;
  switch (kind_) {
    case Kind::kUniform:
      return 1.0 / (upper_ - lower_);
    case Kind::kTruncatedGaussian:
      return NormalPdf((c - mean_) / stddev_) / (stddev_ * cdf_mass_);
  }
  return 0.0;
}

double CostDistribution::Cdf(double c) const {
  if (c <= lower_) return 0.0;
  if (c >= upper_) return 1.0;
  switch (kind_) {
    case Kind::kUniform:
      return (c - lower_) / (upper_ - lower_);
    case Kind::kTruncatedGaussian:
      return (NormalCdf((c - mean_) / stddev_) - cdf_lower_) / cdf_mass_;
  }
  return 0.0;
}

double CostDistribution::Quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  if (kind_ == Kind::kUniform) return lower_ + u * (upper_ - lower_);
  double lo = lower_;
  double hi = upper_;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, hi);
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (Cdf(mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double CostDistribution::VirtualCostUnchecked(double c) const {
  switch (kind_) {
    case Kind::kUniform:
      return 2.0 * c - lower_;
    case Kind::kTruncatedGaussian: {
      // The truncation mass cancels in F/f.
      const double z = (c - mean_) / stddev_;
      const double numerator = NormalCdf(z) - cdf_lower_;
      return c + stddev_ * std::max(numerator, 0.0) / NormalPdf(z);
    }
  }
  return c;
}

absl::Status CostDistribution::CheckRegularity() const {
  double previous = -INFINITY;
  for (int i = 0; i < kRegularityGridPoints; ++i) {
    const double c =
        lower_ + (upper_ - lower_) * i / (kRegularityGridPoints - 1);
    if (!(Pdf(c) > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("cost density vanishes at c=", c));
    }
    const double v = VirtualCostUnchecked(c);
    if (!std::isfinite(v) || !(v > previous)) {
      return absl::InvalidArgumentError(
          absl::StrCat("virtual cost is not strictly increasing near c=", c));
    }
    previous = v;
  }
  return absl::OkStatus();
}

absl::StatusOr<double> VirtualCost(double c, const CostDistribution& dist) {
  if (!dist.InSupport(c)) {
    return absl::OutOfRangeError(
        absl::StrCat("sensitivity ", c, " outside support [", dist.lower(),
                     ", ", dist.upper(), "]"));
  }
  return dist.VirtualCostUnchecked(std::clamp(c, dist.lower(), dist.upper()));
}

}  // namespace jsam
