// Copyright 2026 The threelike Authors
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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

void add_run_options(CLI::App* cmd, threelike::cli::RunArgs& args, bool config_required) {
  cmd->add_option("data", args.data_path, "CSV record, one row per time step")
      ->required()
      ->check(CLI::ExistingFile);
  auto* config = cmd->add_option("--config", args.config_path, "JSON run configuration");
  if (config_required) config->required();
  cmd->add_option("--output", args.output_dir, "output directory (overrides the config)");
  cmd->add_option("--grid-points", args.grid_points, "frequency grid size (overrides the config)");
  cmd->add_option("--seed", args.seed, "probe seed (overrides the config)");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = threelike::cli;
  CLI::App app{"threelike: moment-constrained spectral estimation"};
  app.require_subcommand(1);

  cli::RunArgs estimate_args;
  auto* estimate = app.add_subcommand("estimate", "solve for the spectrum closest to the prior");
  add_run_options(estimate, estimate_args, true);
  estimate->add_flag("--timing", estimate_args.timing, "record solver wall time in report.json");

  cli::RunArgs verify_args;
  auto* verify = app.add_subcommand("verify", "check the dual and prediction-error identities");
  add_run_options(verify, verify_args, true);

  cli::RunArgs correlogram_args;
  auto* corr = app.add_subcommand("correlogram", "dump the windowed correlogram only");
  add_run_options(corr, correlogram_args, false);

  cli::DivergenceArgs div_args;
  auto* div = app.add_subcommand("divergence", "divergence between two sampled spectra");
  div->add_option("first", div_args.first, "spectrum JSON (Phi)")->required();
  div->add_option("second", div_args.second, "spectrum JSON (Psi)")->required();
  div->add_option("--family", div_args.family,
                  "kl, is, alpha, beta, tau, b1_weighted, b2_weighted, kl1_weighted, "
                  "kl2_weighted or is_weighted")
      ->required();
  div->add_option("--parameter", div_args.parameter, "family parameter");
  div->add_option("--key", div_args.key, "sample array to read from each file")
      ->capture_default_str();
  div->add_option("--weight", div_args.weight, "spectrum JSON holding the weight Q");
  div->add_option("--factor", div_args.factor, "spectrum JSON holding the weight factor W");

  CLI11_PARSE(app, argc, argv);

  if (*estimate) return cli::run_estimate(estimate_args, std::cout, std::cerr);
  if (*verify) return cli::run_verify(verify_args, std::cout, std::cerr);
  if (*corr) return cli::run_correlogram(correlogram_args, std::cout, std::cerr);
  return cli::run_divergence(div_args, std::cout, std::cerr);
}
