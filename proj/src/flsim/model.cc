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

#include "jsam/flsim/model.h"

#include <cmath>

#include "jsam/flsim/privacy.h"

namespace jsam::flsim {
namespace {

using WeightMap = Eigen::Map<const Eigen::MatrixXd>;

WeightMap AsMatrix(const Eigen::VectorXd& weights, int classes) {
  return WeightMap(weights.data(), classes, weights.size() / classes);
}

int ClassesOf(const Eigen::VectorXd& weights, const Dataset& data) {
  return static_cast<int>(weights.size() / (data.features.cols() + 1));
}

Eigen::VectorXd Logits(const Eigen::VectorXd& weights, const Dataset& data,
                       int row) {
  const int classes = ClassesOf(weights, data);
  const WeightMap w = AsMatrix(weights, classes);
  const int d = static_cast<int>(data.features.cols());
  return w.leftCols(d) * data.features.row(row).transpose() + w.col(d);
}

double LogSumExp(const Eigen::VectorXd& z) {
  const double top = z.maxCoeff();
  return top + std::log((z.array() - top).exp().sum());
}

// Row-wise logits for every example at once.
Eigen::MatrixXd AllLogits(const Eigen::VectorXd& weights, const Dataset& data) {
  const int classes = ClassesOf(weights, data);
  const WeightMap w = AsMatrix(weights, classes);
  const int d = static_cast<int>(data.features.cols());
  Eigen::MatrixXd z = data.features * w.leftCols(d).transpose();
  z.rowwise() += w.col(d).transpose();
  return z;
}

}  // namespace

int ParameterCount(int dimension, int classes) {
  return classes * (dimension + 1);
}

Eigen::VectorXd InitialWeights(int dimension, int classes, double scale,
                               std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd w(ParameterCount(dimension, classes));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = scale * rng.Normal();
  return w;
}

double ExampleLoss(const Eigen::VectorXd& weights, const Dataset& data,
                   int row) {
  const Eigen::VectorXd z = Logits(weights, data, row);
  return LogSumExp(z) - z[data.labels[row]];
}

Eigen::VectorXd ExampleGradient(const Eigen::VectorXd& weights,
                                const Dataset& data, int row) {
  const Eigen::VectorXd z = Logits(weights, data, row);
  Eigen::VectorXd residual = (z.array() - LogSumExp(z)).exp().matrix();
  residual[data.labels[row]] -= 1.0;
  const int d = static_cast<int>(data.features.cols());
  Eigen::VectorXd input(d + 1);
  input.head(d) = data.features.row(row).transpose();
  input[d] = 1.0;
  Eigen::MatrixXd grad = residual * input.transpose();
  return Eigen::Map<Eigen::VectorXd>(grad.data(), grad.size());
}

double MeanLoss(const Eigen::VectorXd& weights, const Dataset& data,
                std::span<const int> rows) {
  double total = 0.0;
  for (int row : rows) total += ExampleLoss(weights, data, row);
  return total / rows.size();
}

double MeanLoss(const Eigen::VectorXd& weights, const Dataset& data) {
  const Eigen::MatrixXd z = AllLogits(weights, data);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    total += LogSumExp(z.row(i).transpose()) - z(i, data.labels[i]);
  }
  return total / z.rows();
}

double Accuracy(const Eigen::VectorXd& weights, const Dataset& data) {
  const Eigen::MatrixXd z = AllLogits(weights, data);
  int correct = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    Eigen::Index best = 0;
    z.row(i).maxCoeff(&best);
    correct += best == data.labels[i];
  }
  return static_cast<double>(correct) / z.rows();
}

Eigen::VectorXd ClippedMeanGradient(const Eigen::VectorXd& weights,
                                    const Dataset& data,
                                    std::span<const int> rows,
                                    double clip_norm) {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(weights.size());
  for (int row : rows) {
    total += Clip(ExampleGradient(weights, data, row), clip_norm);
  }
  return total / static_cast<double>(rows.size());
}

absl::StatusOr<Eigen::VectorXd> LocalNoisyGradient(
    const Eigen::VectorXd& weights, const Dataset& data,
    std::span<const int> shard, double clip_norm, double sigma, Rng& rng) {
  if (shard.empty()) return absl::InvalidArgumentError("empty shard");
  Eigen::VectorXd g = ClippedMeanGradient(weights, data, shard, clip_norm);
  if (sigma > 0.0) {
    const double scale = sigma * clip_norm;
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] += scale * rng.Normal();
  }
  return g;
}

}  // namespace jsam::flsim
