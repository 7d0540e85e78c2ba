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

#include "jsam/cli/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "jsam/flsim/baselines.h"
#include "jsam/flsim/model.h"
#include "jsam/status_macros.h"
#include "json.hpp"

namespace jsam::cli {
namespace {

using nlohmann::json;

absl::Status FieldError(absl::string_view field, absl::string_view problem) {
  return absl::InvalidArgumentError(
      absl::StrCat("invalid config field '", field, "': ", problem));
}

absl::Status CheckKeys(const json& obj, absl::string_view where,
                       const std::set<std::string>& allowed) {
  if (!obj.is_object()) return FieldError(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      return FieldError(where.empty() ? key : absl::StrCat(where, ".", key),
                        "unknown field");
    }
  }
  return absl::OkStatus();
}

std::string Join(absl::string_view prefix, absl::string_view key) {
  return prefix.empty() ? std::string(key) : absl::StrCat(prefix, ".", key);
}

absl::Status ReadDouble(const json& obj, absl::string_view prefix,
                        const char* key, double& out) {
  if (!obj.contains(key)) return absl::OkStatus();
  const json& value = obj.at(key);
  if (!value.is_number())
    return FieldError(Join(prefix, key), "expected a number");
  out = value.get<double>();
  return absl::OkStatus();
}

absl::Status ReadInt(const json& obj, absl::string_view prefix, const char* key,
                     int& out) {
  if (!obj.contains(key)) return absl::OkStatus();
  const json& value = obj.at(key);
  if (!value.is_number_integer()) {
    return FieldError(Join(prefix, key), "expected an integer");
  }
  out = value.get<int>();
  return absl::OkStatus();
}

absl::Status ReadU64(const json& obj, const char* key, std::uint64_t& out) {
  if (!obj.contains(key)) return absl::OkStatus();
  const json& value = obj.at(key);
  if (!value.is_number_unsigned()) {
    return FieldError(key, "expected a non-negative integer");
  }
  out = value.get<std::uint64_t>();
  return absl::OkStatus();
}

absl::Status ReadBool(const json& obj, const char* key, bool& out) {
  if (!obj.contains(key)) return absl::OkStatus();
  if (!obj.at(key).is_boolean())
    return FieldError(key, "expected true or false");
  out = obj.at(key).get<bool>();
  return absl::OkStatus();
}

absl::Status ReadString(const json& obj, absl::string_view prefix,
                        const char* key, std::string& out) {
  if (!obj.contains(key)) return absl::OkStatus();
  if (!obj.at(key).is_string()) {
    return FieldError(Join(prefix, key), "expected a string");
  }
  out = obj.at(key).get<std::string>();
  return absl::OkStatus();
}

absl::Status ReadOptionalDouble(const json& obj, const char* key,
                                std::optional<double>& out) {
  if (!obj.contains(key)) return absl::OkStatus();
  const json& value = obj.at(key);
  if (value.is_null()) {
    out.reset();
    return absl::OkStatus();
  }
  if (!value.is_number()) return FieldError(key, "expected a number or null");
  out = value.get<double>();
  return absl::OkStatus();
}

absl::Status ParseInto(const json& root, ExperimentConfig& config) {
  JSAM_RETURN_IF_ERROR(CheckKeys(root, "",
                                 {"num_clients",
                                  "cost_distribution",
                                  "eta",
                                  "q",
                                  "smoothness",
                                  "grid_delta",
                                  "objective_form",
                                  "budget",
                                  "rounds",
                                  "per_round",
                                  "clip_norm",
                                  "learning_rate",
                                  "delta",
                                  "c2",
                                  "init_scale",
                                  "add_noise",
                                  "similarity",
                                  "task",
                                  "mechanisms",
                                  "seeds",
                                  "seed",
                                  "payment_grid",
                                  "payment_samples",
                                  "sweep_train",
                                  "audit",
                                  "output"}));
  JSAM_RETURN_IF_ERROR(ReadInt(root, "", "num_clients", config.num_clients));

  if (root.contains("cost_distribution")) {
    const json& costs = root.at("cost_distribution");
    JSAM_RETURN_IF_ERROR(
        CheckKeys(costs, "cost_distribution",
                  {"kind", "lower", "upper", "mean", "stddev"}));
    JSAM_RETURN_IF_ERROR(
        ReadString(costs, "cost_distribution", "kind", config.costs.kind));
    JSAM_RETURN_IF_ERROR(
        ReadDouble(costs, "cost_distribution", "lower", config.costs.lower));
    JSAM_RETURN_IF_ERROR(
        ReadDouble(costs, "cost_distribution", "upper", config.costs.upper));
    JSAM_RETURN_IF_ERROR(
        ReadDouble(costs, "cost_distribution", "mean", config.costs.mean));
    JSAM_RETURN_IF_ERROR(
        ReadDouble(costs, "cost_distribution", "stddev", config.costs.stddev));
  }

  if (root.contains("eta")) {
    const json& eta = root.at("eta");
    config.eta.clear();
    if (eta.is_number()) {
      config.eta.push_back(eta.get<double>());
    } else if (eta.is_array()) {
      for (const json& e : eta) {
        if (!e.is_number()) return FieldError("eta", "expected numbers");
        config.eta.push_back(e.get<double>());
      }
    } else {
      return FieldError("eta", "expected a number or an array of numbers");
    }
  }
  JSAM_RETURN_IF_ERROR(ReadOptionalDouble(root, "q", config.q));
  JSAM_RETURN_IF_ERROR(ReadDouble(root, "", "smoothness", config.smoothness));
  JSAM_RETURN_IF_ERROR(ReadDouble(root, "", "grid_delta", config.grid_delta));
  if (root.contains("objective_form")) {
    std::string form;
    JSAM_RETURN_IF_ERROR(ReadString(root, "", "objective_form", form));
    auto parsed = ParseObjectiveForm(form);
    if (!parsed.ok())
      return FieldError("objective_form", parsed.status().message());
    config.objective_form = *parsed;
  }
  JSAM_RETURN_IF_ERROR(ReadOptionalDouble(root, "budget", config.budget));

  JSAM_RETURN_IF_ERROR(ReadInt(root, "", "rounds", config.run.rounds));
  JSAM_RETURN_IF_ERROR(ReadInt(root, "", "per_round", config.run.per_round));
  JSAM_RETURN_IF_ERROR(ReadDouble(root, "", "clip_norm", config.run.clip_norm));
  JSAM_RETURN_IF_ERROR(
      ReadDouble(root, "", "learning_rate", config.run.learning_rate));
  JSAM_RETURN_IF_ERROR(ReadDouble(root, "", "delta", config.run.delta));
  JSAM_RETURN_IF_ERROR(ReadDouble(root, "", "c2", config.run.c2));
  JSAM_RETURN_IF_ERROR(
      ReadDouble(root, "", "init_scale", config.run.init_scale));
  JSAM_RETURN_IF_ERROR(ReadBool(root, "add_noise", config.run.add_noise));
  JSAM_RETURN_IF_ERROR(ReadInt(root, "", "similarity", config.similarity));

  if (root.contains("task")) {
    const json& task = root.at("task");
    JSAM_RETURN_IF_ERROR(
        CheckKeys(task, "task",
                  {"dimension", "classes", "center_scale", "noise_std",
                   "samples_per_client", "test_size", "pool_surplus"}));
    JSAM_RETURN_IF_ERROR(
        ReadInt(task, "task", "dimension", config.task.dimension));
    JSAM_RETURN_IF_ERROR(ReadInt(task, "task", "classes", config.task.classes));
    JSAM_RETURN_IF_ERROR(
        ReadDouble(task, "task", "center_scale", config.task.center_scale));
    JSAM_RETURN_IF_ERROR(
        ReadDouble(task, "task", "noise_std", config.task.noise_std));
    JSAM_RETURN_IF_ERROR(ReadInt(task, "task", "samples_per_client",
                                 config.task.samples_per_client));
    JSAM_RETURN_IF_ERROR(
        ReadInt(task, "task", "test_size", config.task.test_size));
    JSAM_RETURN_IF_ERROR(
        ReadInt(task, "task", "pool_surplus", config.task.pool_surplus));
  }

  if (root.contains("mechanisms")) {
    const json& list = root.at("mechanisms");
    if (!list.is_array()) return FieldError("mechanisms", "expected an array");
    config.mechanisms.clear();
    for (const json& m : list) {
      if (!m.is_string()) return FieldError("mechanisms", "expected strings");
      config.mechanisms.push_back(m.get<std::string>());
    }
  }
  if (root.contains("seeds")) {
    const json& list = root.at("seeds");
    if (!list.is_array()) return FieldError("seeds", "expected an array");
    config.seeds.clear();
    for (const json& s : list) {
      if (!s.is_number_unsigned()) {
        return FieldError("seeds", "expected non-negative integers");
      }
      config.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  JSAM_RETURN_IF_ERROR(ReadU64(root, "seed", config.root_seed));
  JSAM_RETURN_IF_ERROR(ReadInt(root, "", "payment_grid", config.payment_grid));
  JSAM_RETURN_IF_ERROR(
      ReadInt(root, "", "payment_samples", config.payment_samples));
  JSAM_RETURN_IF_ERROR(ReadBool(root, "sweep_train", config.sweep_train));

  if (root.contains("audit")) {
    const json& audit = root.at("audit");
    JSAM_RETURN_IF_ERROR(CheckKeys(
        audit, "audit",
        {"clients", "cross_check_instances", "simplex_step", "true_costs",
         "misreports", "ir_profiles", "identity_triples", "sabotage"}));
    AuditSpec& a = config.audit;
    JSAM_RETURN_IF_ERROR(ReadInt(audit, "audit", "clients", a.clients));
    JSAM_RETURN_IF_ERROR(ReadInt(audit, "audit", "cross_check_instances",
                                 a.cross_check_instances));
    JSAM_RETURN_IF_ERROR(
        ReadDouble(audit, "audit", "simplex_step", a.simplex_step));
    JSAM_RETURN_IF_ERROR(ReadInt(audit, "audit", "true_costs", a.true_costs));
    JSAM_RETURN_IF_ERROR(ReadInt(audit, "audit", "misreports", a.misreports));
    JSAM_RETURN_IF_ERROR(ReadInt(audit, "audit", "ir_profiles", a.ir_profiles));
    JSAM_RETURN_IF_ERROR(
        ReadInt(audit, "audit", "identity_triples", a.identity_triples));
    JSAM_RETURN_IF_ERROR(ReadString(audit, "audit", "sabotage", a.sabotage));
  }
  JSAM_RETURN_IF_ERROR(ReadString(root, "", "output", config.output));
  return absl::OkStatus();
}

bool Positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

absl::StatusOr<CostDistribution> MakeDistribution(const CostSpec& spec) {
  if (spec.kind == "uniform") {
    return CostDistribution::Uniform(spec.lower, spec.upper);
  }
  if (spec.kind == "truncated_gaussian") {
    return CostDistribution::TruncatedGaussian(spec.mean, spec.stddev,
                                               spec.lower, spec.upper);
  }
  return FieldError("cost_distribution.kind",
                    "expected uniform or truncated_gaussian");
}

absl::Status ValidateConfig(const ExperimentConfig& config) {
  if (config.num_clients < 1) return FieldError("num_clients", "must be >= 1");
  if (auto dist = MakeDistribution(config.costs); !dist.ok()) {
    return FieldError("cost_distribution", dist.status().message());
  }
  if (config.eta.empty()) return FieldError("eta", "must not be empty");
  for (double eta : config.eta) {
    if (!std::isfinite(eta) || eta < 0.0) {
      return FieldError("eta",
                        absl::StrCat("must be finite and >= 0, got ", eta));
    }
  }
  if (config.q.has_value() && !Positive(*config.q)) {
    return FieldError("q", "must be > 0");
  }
  if (!Positive(config.smoothness))
    return FieldError("smoothness", "must be > 0");
  if (!Positive(config.grid_delta) ||
      config.grid_delta > 1.0 / config.num_clients + 1e-12) {
    return FieldError("grid_delta", "must lie in (0, 1/num_clients]");
  }
  if (config.budget.has_value() && !Positive(*config.budget)) {
    return FieldError("budget", "must be > 0");
  }
  const flsim::RunConfig& run = config.run;
  if (run.rounds < 1) return FieldError("rounds", "must be >= 1");
  if (run.per_round < 1) return FieldError("per_round", "must be >= 1");
  if (!Positive(run.clip_norm)) return FieldError("clip_norm", "must be > 0");
  if (!std::isfinite(run.learning_rate) || run.learning_rate < 0.0) {
    return FieldError("learning_rate", "must be >= 0");
  }
  if (!(run.delta > 0.0 && run.delta < 1.0)) {
    return FieldError("delta", "must lie in (0, 1)");
  }
  if (!Positive(run.c2)) return FieldError("c2", "must be > 0");
  if (!std::isfinite(run.init_scale) || run.init_scale < 0.0) {
    return FieldError("init_scale", "must be >= 0");
  }
  if (config.similarity < 0 || config.similarity > 100) {
    return FieldError("similarity", "must lie in [0, 100]");
  }
  const flsim::TaskSpec& task = config.task;
  if (task.dimension < 1) return FieldError("task.dimension", "must be >= 1");
  if (task.classes < 2) return FieldError("task.classes", "must be >= 2");
  if (!Positive(task.center_scale)) {
    return FieldError("task.center_scale", "must be > 0");
  }
  if (!Positive(task.noise_std))
    return FieldError("task.noise_std", "must be > 0");
  if (task.samples_per_client < 1) {
    return FieldError("task.samples_per_client", "must be >= 1");
  }
  if (task.test_size < 1) return FieldError("task.test_size", "must be >= 1");
  if (task.pool_surplus < 0)
    return FieldError("task.pool_surplus", "must be >= 0");
  if (config.mechanisms.empty())
    return FieldError("mechanisms", "must not be empty");
  for (const std::string& m : config.mechanisms) {
    auto spec = flsim::ParseMechanismSpec(m);
    if (!spec.ok()) return FieldError("mechanisms", spec.status().message());
    if (spec->subset_size > config.num_clients) {
      return FieldError("mechanisms", "fsbm subset larger than num_clients");
    }
  }
  if (config.seeds.empty()) return FieldError("seeds", "must not be empty");
  if (config.payment_grid < 2)
    return FieldError("payment_grid", "must be >= 2");
  if (config.payment_samples < 1) {
    return FieldError("payment_samples", "must be >= 1");
  }
  const AuditSpec& audit = config.audit;
  if (audit.clients < 1 || audit.clients > 4) {
    return FieldError("audit.clients", "must lie in [1, 4]");
  }
  if (!(audit.simplex_step >= 1e-3 && audit.simplex_step <= 1.0)) {
    return FieldError("audit.simplex_step", "must lie in [1e-3, 1]");
  }
  if (audit.cross_check_instances < 0 || audit.true_costs < 0 ||
      audit.misreports < 0 || audit.ir_profiles < 0 ||
      audit.identity_triples < 0) {
    return FieldError("audit", "counts must be >= 0");
  }
  if (audit.sabotage != "none" && audit.sabotage != "negated_integral" &&
      audit.sabotage != "increasing_allocation") {
    return FieldError(
        "audit.sabotage",
        "expected none, negated_integral or increasing_allocation");
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseConfig(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config is not valid JSON: ", e.what()));
  }
  ExperimentConfig config;
  try {
    JSAM_RETURN_IF_ERROR(ParseInto(root, config));
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config has an out-of-range value: ", e.what()));
  }
  JSAM_RETURN_IF_ERROR(ValidateConfig(config));
  return config;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    return absl::NotFoundError(absl::StrCat("cannot open config ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

std::string SerializeConfig(const ExperimentConfig& config) {
  json root;
  root["num_clients"] = config.num_clients;
  root["cost_distribution"] = {{"kind", config.costs.kind},
                               {"lower", config.costs.lower},
                               {"upper", config.costs.upper},
                               {"mean", config.costs.mean},
                               {"stddev", config.costs.stddev}};
  root["eta"] = config.eta;
  root["q"] = config.q.has_value() ? json(*config.q) : json(nullptr);
  root["smoothness"] = config.smoothness;
  root["grid_delta"] = config.grid_delta;
  root["objective_form"] =
      std::string(ObjectiveFormName(config.objective_form));
  root["budget"] =
      config.budget.has_value() ? json(*config.budget) : json(nullptr);
  root["rounds"] = config.run.rounds;
  root["per_round"] = config.run.per_round;
  root["clip_norm"] = config.run.clip_norm;
  root["learning_rate"] = config.run.learning_rate;
  root["delta"] = config.run.delta;
  root["c2"] = config.run.c2;
  root["init_scale"] = config.run.init_scale;
  root["add_noise"] = config.run.add_noise;
  root["similarity"] = config.similarity;
  root["task"] = {{"dimension", config.task.dimension},
                  {"classes", config.task.classes},
                  {"center_scale", config.task.center_scale},
                  {"noise_std", config.task.noise_std},
                  {"samples_per_client", config.task.samples_per_client},
                  {"test_size", config.task.test_size},
                  {"pool_surplus", config.task.pool_surplus}};
  root["mechanisms"] = config.mechanisms;
  root["seeds"] = config.seeds;
  root["seed"] = config.root_seed;
  root["payment_grid"] = config.payment_grid;
  root["payment_samples"] = config.payment_samples;
  root["sweep_train"] = config.sweep_train;
  root["audit"] = {
      {"clients", config.audit.clients},
      {"cross_check_instances", config.audit.cross_check_instances},
      {"simplex_step", config.audit.simplex_step},
      {"true_costs", config.audit.true_costs},
      {"misreports", config.audit.misreports},
      {"ir_profiles", config.audit.ir_profiles},
      {"identity_triples", config.audit.identity_triples},
      {"sabotage", config.audit.sabotage}};
  root["output"] = config.output;
  return root.dump(2) + "\n";
}

absl::StatusOr<double> ResolveQ(const ExperimentConfig& config) {
  if (config.q.has_value()) return *config.q;
  PrivacyConstants constants;
  constants.c2 = config.run.c2;
  constants.delta = config.run.delta;
  constants.dimension =
      flsim::ParameterCount(config.task.dimension, config.task.classes);
  constants.iterations = config.run.rounds;
  constants.smoothness = config.smoothness;
  return DpLossCoefficient(constants);
}

absl::StatusOr<ServerConfig> MakeServerConfig(const ExperimentConfig& config,
                                              double eta) {
  ServerConfig server;
  server.eta = eta;
  JSAM_ASSIGN_OR_RETURN(server.q, ResolveQ(config));
  server.grid_delta = config.grid_delta;
  server.objective_form = config.objective_form;
  JSAM_RETURN_IF_ERROR(ValidateServerConfig(server));
  return server;
}

}  // namespace jsam::cli
