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

#include "jsam/cli/commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "absl/strings/str_cat.h"
#include "jsam/flsim/model.h"
#include "jsam/flsim/privacy.h"
#include "jsam/flsim/schedule.h"
#include "jsam/mechanism.h"
#include "jsam/oracle.h"
#include "jsam/payments.h"
#include "jsam/status_macros.h"
#include "json.hpp"

namespace jsam::cli {
namespace {

using nlohmann::json;

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

std::vector<double> DrawCosts(const CostDistribution& dist, int n,
                              std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> costs(n);
  for (double& c : costs) c = dist.Quantile(rng.Uniform());
  return costs;
}

std::string RunId(const std::string& mechanism, std::uint64_t seed,
                  double eta) {
  return absl::StrCat(mechanism, "-seed", seed, "-eta", FormatDouble(eta));
}

absl::StatusOr<std::vector<flsim::MechanismSpec>> Mechanisms(
    const ExperimentConfig& config) {
  std::vector<flsim::MechanismSpec> specs;
  for (const std::string& name : config.mechanisms) {
    JSAM_ASSIGN_OR_RETURN(flsim::MechanismSpec spec,
                          flsim::ParseMechanismSpec(name));
    specs.push_back(spec);
  }
  return specs;
}

}  // namespace

std::uint64_t StreamSeed(const ExperimentConfig& config, SeedPurpose purpose,
                         std::uint64_t seed, std::string_view mechanism) {
  if (mechanism.empty())
    return DeriveSeed(config.root_seed, {Tag(purpose), seed});
  return DeriveSeed(config.root_seed, {Tag(purpose), seed, HashTag(mechanism)});
}

absl::StatusOr<Scenario> BuildScenario(const ExperimentConfig& config,
                                       std::uint64_t seed) {
  JSAM_ASSIGN_OR_RETURN(CostDistribution dist, MakeDistribution(config.costs));
  Scenario scenario;
  JSAM_ASSIGN_OR_RETURN(
      scenario.task,
      flsim::MakeSyntheticTask(config.task, config.num_clients,
                               StreamSeed(config, SeedPurpose::kTask, seed)));
  JSAM_ASSIGN_OR_RETURN(scenario.partition,
                        flsim::PartitionNonIid(
                            scenario.task.pool.labels, config.num_clients,
                            config.task.samples_per_client, config.similarity,
                            StreamSeed(config, SeedPurpose::kPartition, seed)));
  scenario.costs = DrawCosts(dist, config.num_clients,
                             StreamSeed(config, SeedPurpose::kCosts, seed));
  scenario.initial_weights = flsim::InitialWeights(
      config.task.dimension, config.task.classes, config.run.init_scale,
      StreamSeed(config, SeedPurpose::kInitialModel, seed));
  for (const auto& shard : scenario.partition.shards) {
    scenario.client_losses.push_back(
        flsim::MeanLoss(scenario.initial_weights, scenario.task.pool, shard));
  }
  return scenario;
}

absl::StatusOr<flsim::Plan> PlanFor(const ExperimentConfig& config,
                                    const Scenario& scenario,
                                    const flsim::MechanismSpec& spec,
                                    double eta, std::uint64_t seed) {
  JSAM_ASSIGN_OR_RETURN(CostDistribution dist, MakeDistribution(config.costs));
  flsim::PlanOptions options;
  JSAM_ASSIGN_OR_RETURN(options.server, MakeServerConfig(config, eta));
  options.budget_override = config.budget;
  options.client_losses = scenario.client_losses;
  options.payments.grid_size = config.payment_grid;
  options.payments.samples = config.payment_samples;
  // Shared across eta so payment curves along a sweep use the same draws.
  options.payments.seed =
      StreamSeed(config, SeedPurpose::kPayments, seed, spec.Name());
  return flsim::BaselinePlan(spec, scenario.costs, dist, options);
}

absl::StatusOr<flsim::RunRecord> RunPlan(const ExperimentConfig& config,
                                         const Scenario& scenario,
                                         const flsim::MechanismSpec& spec,
                                         const flsim::Plan& plan, double eta,
                                         std::uint64_t seed) {
  const std::string name = spec.Name();
  JSAM_ASSIGN_OR_RETURN(
      flsim::SelectionSchedule schedule,
      flsim::BuildSchedule(
          plan.probabilities, config.run.rounds, config.run.per_round,
          StreamSeed(config, SeedPurpose::kSchedule, seed, name)));
  JSAM_ASSIGN_OR_RETURN(
      flsim::RunRecord record,
      flsim::Train(scenario.task, scenario.partition, plan.budgets, schedule,
                   config.run, scenario.initial_weights,
                   StreamSeed(config, SeedPurpose::kNoise, seed, name)));
  record.run_id = RunId(name, seed, eta);
  record.mechanism = name;
  record.seed = seed;
  record.similarity = config.similarity;
  record.eta = eta;
  record.monetary_cost = plan.monetary_cost;
  return record;
}

absl::StatusOr<std::vector<flsim::RunRecord>> Simulate(
    const ExperimentConfig& config) {
  JSAM_RETURN_IF_ERROR(ValidateConfig(config));
  JSAM_ASSIGN_OR_RETURN(auto specs, Mechanisms(config));
  std::vector<Scenario> scenarios;
  for (std::uint64_t seed : config.seeds) {
    JSAM_ASSIGN_OR_RETURN(Scenario scenario, BuildScenario(config, seed));
    scenarios.push_back(std::move(scenario));
  }
  std::vector<flsim::RunRecord> records;
  for (const auto& spec : specs) {
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
      for (double eta : config.eta) {
        JSAM_ASSIGN_OR_RETURN(
            flsim::Plan plan,
            PlanFor(config, scenarios[i], spec, eta, config.seeds[i]));
        JSAM_ASSIGN_OR_RETURN(
            flsim::RunRecord record,
            RunPlan(config, scenarios[i], spec, plan, eta, config.seeds[i]));
        records.push_back(std::move(record));
      }
    }
  }
  return records;
}

absl::StatusOr<std::vector<SweepRow>> Sweep(const ExperimentConfig& config) {
  JSAM_RETURN_IF_ERROR(ValidateConfig(config));
  JSAM_ASSIGN_OR_RETURN(auto specs, Mechanisms(config));
  std::vector<Scenario> scenarios;
  for (std::uint64_t seed : config.seeds) {
    JSAM_ASSIGN_OR_RETURN(Scenario scenario, BuildScenario(config, seed));
    scenarios.push_back(std::move(scenario));
  }
  std::vector<SweepRow> rows;
  const double seeds = static_cast<double>(config.seeds.size());
  for (double eta : config.eta) {
    for (const auto& spec : specs) {
      SweepRow row;
      row.eta = eta;
      row.mechanism = spec.Name();
      for (std::size_t i = 0; i < config.seeds.size(); ++i) {
        JSAM_ASSIGN_OR_RETURN(
            flsim::Plan plan,
            PlanFor(config, scenarios[i], spec, eta, config.seeds[i]));
        row.total_budget += plan.total_budget / seeds;
        row.monetary_cost += plan.monetary_cost / seeds;
        row.selected_clients += plan.SelectedCount() / seeds;
        if (config.sweep_train) {
          JSAM_ASSIGN_OR_RETURN(
              flsim::RunRecord record,
              RunPlan(config, scenarios[i], spec, plan, eta, config.seeds[i]));
          row.final_accuracy += record.FinalAccuracy() / seeds;
        }
      }
      if (!config.sweep_train) {
        row.final_accuracy = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

absl::StatusOr<std::vector<AuditCheck>> Audit(const ExperimentConfig& config) {
  JSAM_RETURN_IF_ERROR(ValidateConfig(config));
  JSAM_ASSIGN_OR_RETURN(CostDistribution dist, MakeDistribution(config.costs));
  JSAM_ASSIGN_OR_RETURN(ServerConfig server,
                        MakeServerConfig(config, config.eta.front()));
  const AuditSpec& spec = config.audit;
  const int n = spec.clients;
  const std::uint64_t base = config.seeds.front();
  if (server.grid_delta > 1.0 / n) server.grid_delta = 1.0 / n;
  std::vector<AuditCheck> checks;

  {
    AuditCheck check{.name = "cross_check", .pass = true, .detail = ""};
    for (int i = 0; i < spec.cross_check_instances && check.pass; ++i) {
      const std::vector<double> costs =
          DrawCosts(dist, n,
                    DeriveSeed(StreamSeed(config, SeedPurpose::kAudit, base),
                               {1, static_cast<std::uint64_t>(i)}));
      std::vector<double> v(n);
      for (int k = 0; k < n; ++k) {
        JSAM_ASSIGN_OR_RETURN(v[k], VirtualCost(costs[k], dist));
      }
      JSAM_ASSIGN_OR_RETURN(CrossCheckReport report,
                            CrossCheck(v, server, spec.simplex_step));
      const StructureReport shape =
          VerifyStructure(report.brute_force.probabilities,
                          SortByVirtualCost(v), spec.simplex_step);
      if (!report.pass) {
        check.pass = false;
        check.detail = absl::StrCat("instance ", i, ": grid search ",
                                    report.jsam_objective, " vs brute force ",
                                    report.brute_force_objective);
      } else if (!shape.pass) {
        check.pass = false;
        check.detail = absl::StrCat("instance ", i,
                                    ": brute-force optimum breaks the "
                                    "threshold shape: ",
                                    shape.violation);
      }
    }
    if (check.pass) {
      check.detail = absl::StrCat(spec.cross_check_instances, " instances");
    }
    checks.push_back(check);
  }

  AllocationRule rule = JsamAllocationRule(dist, server);
  PaymentSabotage payment_sabotage = PaymentSabotage::kNone;
  if (spec.sabotage == "negated_integral") {
    payment_sabotage = PaymentSabotage::kNegatedIntegral;
  } else if (spec.sabotage == "increasing_allocation") {
    // Steep enough to clear the Monte-Carlo tolerance on any sane grid.
    rule = [](std::span<const double> costs)
        -> absl::StatusOr<std::vector<double>> {
      std::vector<double> budgets(costs.begin(), costs.end());
      for (double& eps : budgets) eps *= 100.0;
      return budgets;
    };
  }
  InterimOptions options{
      .grid_size = config.payment_grid,
      .samples = config.payment_samples,
      .seed = DeriveSeed(StreamSeed(config, SeedPurpose::kAudit, base), {2})};
  JSAM_ASSIGN_OR_RETURN(InterimAllocation interim,
                        ComputeInterimAllocation(0, n, dist, rule, options));
  const double lo = interim.grid.front();
  const double hi = interim.grid.back();
  Rng rng(DeriveSeed(StreamSeed(config, SeedPurpose::kAudit, base), {3}));
  auto draw_report = [&] {
    return std::clamp(dist.Quantile(rng.Uniform()), lo, hi);
  };

  {
    AuditCheck check{
        .name = "incentive_compatibility", .pass = true, .detail = ""};
    for (int i = 0; i < spec.true_costs && check.pass; ++i) {
      const double truth = draw_report();
      std::vector<double> misreports(spec.misreports);
      for (double& m : misreports) m = draw_report();
      JSAM_ASSIGN_OR_RETURN(
          IcReport report,
          VerifyIc(truth, misreports, interim, -1.0, payment_sabotage));
      if (!report.pass) {
        check.pass = false;
        check.detail = report.violation;
      }
    }
    if (check.pass) {
      check.detail = absl::StrCat(spec.true_costs, " true costs x ",
                                  spec.misreports, " misreports");
    }
    checks.push_back(check);
  }

  {
    AuditCheck check{
        .name = "individual_rationality", .pass = true, .detail = ""};
    for (int i = 0; i < spec.ir_profiles * n && check.pass; ++i) {
      const double c = draw_report();
      JSAM_ASSIGN_OR_RETURN(Payment paid,
                            ComputePayment(c, interim, payment_sabotage));
      if (!VerifyIr(c, paid.amount, interim.At(c))) {
        check.pass = false;
        check.detail = absl::StrCat("cost ", c, ": payment ", paid.amount,
                                    " below cost ", c * interim.At(c));
      }
    }
    if (check.pass) {
      check.detail = absl::StrCat(spec.ir_profiles * n, " sampled clients");
    }
    checks.push_back(check);
  }

  {
    const MonotoneReport report = VerifyMonotoneAllocation(interim);
    checks.push_back(
        {.name = "allocation_monotonicity",
         .pass = report.pass,
         .detail = report.pass ? absl::StrCat("worst rise ", report.worst_rise,
                                              " within ", report.tolerance)
                               : report.violation});
  }

  {
    AuditCheck check{.name = "budget_identity", .pass = true, .detail = ""};
    double worst = 0.0;
    for (int i = 0; i < spec.identity_triples; ++i) {
      const int size = 1 + static_cast<int>(rng.Below(8));
      std::vector<double> p(size);
      std::vector<double> v(size);
      double total = 0.0;
      for (int k = 0; k < size; ++k) {
        p[k] = rng.Uniform();
        v[k] = 0.01 + 2.0 * rng.Uniform();
        total += p[k];
      }
      for (double& x : p) x /= total;
      const double budget = 0.1 + 10.0 * rng.Uniform();
      JSAM_ASSIGN_OR_RETURN(std::vector<double> eps,
                            OptimalEpsilon(p, budget, v));
      double spend = 0.0;
      for (int k = 0; k < size; ++k) spend += v[k] * eps[k];
      worst = std::max(worst, std::abs(spend - budget) / budget);
    }
    check.pass = worst <= 1e-9;
    check.detail = absl::StrCat("worst relative gap ", worst);
    checks.push_back(check);
  }

  {
    AuditCheck check{.name = "noise_calibration", .pass = true, .detail = ""};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const int t = 1 + static_cast<int>(rng.Below(1000));
      const double eps = 0.01 + 10.0 * rng.Uniform();
      JSAM_ASSIGN_OR_RETURN(
          double sigma,
          flsim::NoiseSigma(t, eps, config.run.delta, config.run.c2));
      JSAM_ASSIGN_OR_RETURN(
          double back,
          flsim::RecoverEpsilon(t, sigma, config.run.delta, config.run.c2));
      worst = std::max(worst, std::abs(back - eps) / eps);
    }
    check.pass = worst <= 1e-9;
    check.detail = absl::StrCat("worst relative gap ", worst);
    checks.push_back(check);
  }
  return checks;
}

absl::Status CmdSolve(const ExperimentConfig& config, std::ostream& out) {
  JSAM_RETURN_IF_ERROR(ValidateConfig(config));
  JSAM_ASSIGN_OR_RETURN(auto specs, Mechanisms(config));
  JSAM_ASSIGN_OR_RETURN(CostDistribution dist, MakeDistribution(config.costs));
  JSAM_ASSIGN_OR_RETURN(double q, ResolveQ(config));
  json plans = json::array();
  for (std::uint64_t seed : config.seeds) {
    JSAM_ASSIGN_OR_RETURN(Scenario scenario, BuildScenario(config, seed));
    std::vector<double> virtual_costs;
    for (double c : scenario.costs) {
      JSAM_ASSIGN_OR_RETURN(double v, VirtualCost(c, dist));
      virtual_costs.push_back(v);
    }
    for (const auto& spec : specs) {
      for (double eta : config.eta) {
        JSAM_ASSIGN_OR_RETURN(flsim::Plan plan,
                              PlanFor(config, scenario, spec, eta, seed));
        const std::vector<double>& ranking =
            spec.kind == flsim::MechanismKind::kJsamCi ? scenario.costs
                                                       : virtual_costs;
        const StructureReport shape =
            VerifyStructure(plan.probabilities, SortByVirtualCost(ranking));
        plans.push_back({{"mechanism", plan.mechanism},
                         {"seed", seed},
                         {"eta", eta},
                         {"q", q},
                         {"costs", scenario.costs},
                         {"virtual_costs", virtual_costs},
                         {"probabilities", plan.probabilities},
                         {"budgets", plan.budgets},
                         {"payments", plan.payments},
                         {"total_budget", plan.total_budget},
                         {"monetary_cost", plan.monetary_cost},
                         {"threshold", plan.threshold},
                         {"selected_clients", plan.SelectedCount()},
                         {"objective", plan.objective},
                         {"threshold_shape",
                          shape.pass ? std::string("pass") : shape.violation}});
      }
    }
  }
  out << json{{"plans", plans}}.dump(2) << "\n";
  return absl::OkStatus();
}

absl::Status CmdSimulate(const ExperimentConfig& config, std::ostream& out) {
  JSAM_ASSIGN_OR_RETURN(std::vector<flsim::RunRecord> records,
                        Simulate(config));
  flsim::WriteCsvHeader(out);
  for (const flsim::RunRecord& record : records) {
    flsim::WriteCsvRows(record, out);
    if (record.diverged) {
      std::fprintf(stderr, "warning: run %s diverged\n", record.run_id.c_str());
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<bool> CmdAudit(const ExperimentConfig& config,
                              std::ostream& out) {
  JSAM_ASSIGN_OR_RETURN(std::vector<AuditCheck> checks, Audit(config));
  bool all = true;
  for (const AuditCheck& check : checks) {
    out << (check.pass ? "PASS " : "FAIL ") << check.name << ": "
        << check.detail << "\n";
    all = all && check.pass;
  }
  return all;
}

absl::Status CmdSweep(const ExperimentConfig& config, std::ostream& out) {
  JSAM_ASSIGN_OR_RETURN(std::vector<SweepRow> rows, Sweep(config));
  out << "eta,mechanism,total_budget,monetary_cost,selected_clients,"
         "final_accuracy\n";
  for (const SweepRow& row : rows) {
    out << FormatDouble(row.eta) << "," << row.mechanism << ","
        << FormatDouble(row.total_budget) << ","
        << FormatDouble(row.monetary_cost) << ","
        << FormatDouble(row.selected_clients) << ","
        << FormatDouble(row.final_accuracy) << "\n";
  }
  return absl::OkStatus();
}

}  // namespace jsam::cli
