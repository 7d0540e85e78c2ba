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

// Command-line entry point: jsam {solve,simulate,audit,sweep} [flags].

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jsam/cli/commands.h"
#include "jsam/cli/config.h"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> mechanisms;
  std::string objective_form;
};

absl::StatusOr<jsam::cli::ExperimentConfig> Resolve(const Flags& flags) {
  jsam::cli::ExperimentConfig config;
  if (!flags.config_path.empty()) {
    auto loaded = jsam::cli::LoadConfig(flags.config_path);
    if (!loaded.ok()) return loaded.status();
    config = *std::move(loaded);
  }
  if (flags.seed.has_value()) config.root_seed = *flags.seed;
  if (!flags.out.empty()) config.output = flags.out;
  if (!flags.mechanisms.empty()) config.mechanisms = flags.mechanisms;
  if (!flags.objective_form.empty()) {
    auto form = jsam::ParseObjectiveForm(flags.objective_form);
    if (!form.ok()) return form.status();
    config.objective_form = *form;
  }
  if (absl::Status s = jsam::cli::ValidateConfig(config); !s.ok()) return s;
  return config;
}

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status.message() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint client selection and privacy compensation for DP-FL"};
  app.require_subcommand(1);
  Flags flags;
  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "JSON experiment config");
    sub->add_option("--seed", flags.seed, "Root seed (overrides the config)");
    sub->add_option("--out", flags.out, "Output path (default stdout)");
    sub->add_option("--mechanism", flags.mechanisms,
                    "Mechanisms: jsam, usbm, fsbm:<M>, bbm, jsam_ci")
        ->delimiter(',');
    sub->add_option("--objective-form", flags.objective_form,
                    "exact_l1 or paper_literal");
  };
  CLI::App* solve = app.add_subcommand("solve", "Solve and write the plans");
  CLI::App* simulate =
      app.add_subcommand("simulate", "Train under each plan; CSV rows");
  CLI::App* audit =
      app.add_subcommand("audit", "Oracle, incentive and accounting checks");
  CLI::App* sweep = app.add_subcommand("sweep", "Per-eta summary table");
  for (CLI::App* sub : {solve, simulate, audit, sweep}) add_flags(sub);
  CLI11_PARSE(app, argc, argv);

  auto config = Resolve(flags);
  if (!config.ok()) return Fail(config.status());

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!config->output.empty()) {
    file.open(config->output);
    if (!file) {
      return Fail(absl::InvalidArgumentError("cannot open " + config->output));
    }
    out = &file;
  }

  absl::Status status;
  if (solve->parsed()) {
    status = jsam::cli::CmdSolve(*config, *out);
  } else if (simulate->parsed()) {
    status = jsam::cli::CmdSimulate(*config, *out);
  } else if (sweep->parsed()) {
    status = jsam::cli::CmdSweep(*config, *out);
  } else {
    auto passed = jsam::cli::CmdAudit(*config, *out);
    if (!passed.ok()) return Fail(passed.status());
    return *passed ? 0 : 1;
  }
  if (!status.ok()) return Fail(status);
  return 0;
}
