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

#include "jsam/flsim/trainer.h"

#include <cmath>
#include <cstdio>

#include "absl/strings/str_cat.h"
#include "jsam/flsim/model.h"
#include "jsam/flsim/privacy.h"
#include "jsam/random.h"

namespace jsam::flsim {
namespace {

Dataset SelectRows(const Dataset& data, const PartitionPlan& partition) {
  std::size_t total = 0;
  for (const auto& shard : partition.shards) total += shard.size();
  Dataset out;
  out.features.resize(total, data.features.cols());
  out.labels.reserve(total);
  Eigen::Index i = 0;
  for (const auto& shard : partition.shards) {
    for (int row : shard) {
      out.features.row(i++) = data.features.row(row);
      out.labels.push_back(data.labels[row]);
    }
  }
  return out;
}

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

}  // namespace

double RunRecord::FinalAccuracy() const {
  return rounds.empty() ? 0.0 : rounds.back().test_accuracy;
}

absl::StatusOr<RunRecord> Train(const SyntheticTask& task,
                                const PartitionPlan& partition,
                                std::span<const double> budgets,
                                const SelectionSchedule& schedule,
                                const RunConfig& config,
                                const Eigen::VectorXd& initial_weights,
                                std::uint64_t noise_seed) {
  const std::size_t n = partition.shards.size();
  if (budgets.size() != n || schedule.participation.size() != n) {
    return absl::InvalidArgumentError(
        "budgets, schedule and partition disagree on the client count");
  }
  if (initial_weights.size() !=
      ParameterCount(task.spec.dimension, task.spec.classes)) {
    return absl::InvalidArgumentError("initial weights have the wrong size");
  }
  if (!(config.clip_norm > 0.0) || config.learning_rate < 0.0) {
    return absl::InvalidArgumentError(
        "clip_norm must be > 0 and learning_rate >= 0");
  }

  RunRecord record;
  record.participation = schedule.participation;
  record.sigmas.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (schedule.participation[k] == 0) continue;
    auto sigma = NoiseSigma(schedule.participation[k], budgets[k], config.delta,
                            config.c2);
    if (!sigma.ok()) {
      return absl::FailedPreconditionError(
          absl::StrCat("client ", k, ": ", sigma.status().message()));
    }
    record.sigmas[k] = *sigma;
  }

  const Dataset train = SelectRows(task.pool, partition);
  Eigen::VectorXd w = initial_weights;
  Rng rng(noise_seed);
  record.rounds.reserve(schedule.rounds.size());
  for (std::size_t t = 0; t < schedule.rounds.size(); ++t) {
    const auto& selected = schedule.rounds[t];
    Eigen::VectorXd step = Eigen::VectorXd::Zero(w.size());
    for (int k : selected) {
      const double sigma = config.add_noise ? record.sigmas[k] : 0.0;
      auto g = LocalNoisyGradient(w, task.pool, partition.shards[k],
                                  config.clip_norm, sigma, rng);
      if (!g.ok()) return g.status();
      step += *g;
    }
    if (!selected.empty()) {
      w -= config.learning_rate * step / static_cast<double>(selected.size());
    }
    RoundMetrics metrics;
    metrics.round = static_cast<int>(t) + 1;
    metrics.train_loss = MeanLoss(w, train);
    metrics.test_loss = MeanLoss(w, task.test);
    metrics.test_accuracy = Accuracy(w, task.test);
    if (!std::isfinite(metrics.train_loss) ||
        !std::isfinite(metrics.test_loss)) {
      record.diverged = true;
    }
    record.rounds.push_back(metrics);
  }
  return record;
}

void WriteCsvHeader(std::ostream& out) {
  out << "run_id,mechanism,seed,s,eta,round,train_loss,test_loss,"
         "test_accuracy,cumulative_monetary_cost\n";
}

void WriteCsvRows(const RunRecord& record, std::ostream& out) {
  const std::string prefix =
      absl::StrCat(record.run_id, ",", record.mechanism, ",", record.seed, ",",
                   record.similarity, ",", FormatDouble(record.eta), ",");
  const std::string cost = FormatDouble(record.monetary_cost);
  for (const RoundMetrics& m : record.rounds) {
    out << prefix << m.round << "," << FormatDouble(m.train_loss) << ","
        << FormatDouble(m.test_loss) << "," << FormatDouble(m.test_accuracy)
        << "," << cost << "\n";
  }
}

}  // namespace jsam::flsim
