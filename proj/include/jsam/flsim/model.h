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

#ifndef JSAM_FLSIM_MODEL_H_
#define JSAM_FLSIM_MODEL_H_

#include <cstdint>
#include <span>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "jsam/flsim/task.h"
#include "jsam/random.h"

namespace jsam::flsim {

// Multinomial logistic regression. Weights are a K x (d + 1) matrix stored
// column-major in one vector; the last column is the bias.
int ParameterCount(int dimension, int classes);

Eigen::VectorXd InitialWeights(int dimension, int classes, double scale,
                               std::uint64_t seed);

double ExampleLoss(const Eigen::VectorXd& weights, const Dataset& data,
                   int row);
Eigen::VectorXd ExampleGradient(const Eigen::VectorXd& weights,
                                const Dataset& data, int row);

double MeanLoss(const Eigen::VectorXd& weights, const Dataset& data,
                std::span<const int> rows);
double MeanLoss(const Eigen::VectorXd& weights, const Dataset& data);
double Accuracy(const Eigen::VectorXd& weights, const Dataset& data);

// Mean of per-example gradients, each clipped to `clip_norm`.
Eigen::VectorXd ClippedMeanGradient(const Eigen::VectorXd& weights,
                                    const Dataset& data,
                                    std::span<const int> rows,
                                    double clip_norm);

// Clipped mean gradient plus N(0, sigma^2 C^2 I).
absl::StatusOr<Eigen::VectorXd> LocalNoisyGradient(
    const Eigen::VectorXd& weights, const Dataset& data,
    std::span<const int> shard, double clip_norm, double sigma, Rng& rng);

}  // namespace jsam::flsim

#endif  // JSAM_FLSIM_MODEL_H_
