// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The airfeel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace airfeel::cli;
    CLI::App app{"airfeel: over-the-air federated edge learning simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", AIRFEEL_VERSION);

    CommandOptions opts;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "JSON config or manifest.json")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out_dir, std::string("output directory (default $") + kOutDirEnv + ")");
        sub->add_option("--seed", opts.seed, "override the config seed");
        sub->add_option("--workers", opts.workers, "worker threads")->check(CLI::PositiveNumber);
    };
    CLI::App* simulate = app.add_subcommand("simulate", "run T rounds and write metrics.csv");
    common(simulate);
    CLI::App* bound = app.add_subcommand("bound", "evaluate the convergence bound and write bounds.csv");
    common(bound);
    CLI::App* verify = app.add_subcommand("verify", "Monte Carlo checks of the estimator moments, verify.json");
    common(verify);
    verify->add_option("--trials", opts.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    CLI::App* sweep = app.add_subcommand("sweep", "paired runs over one key, sweep.csv");
    common(sweep);
    sweep->add_option("--key", opts.sweep_key, "k, sigma_z2, sigma_ht2 or tau")->required();
    sweep->add_option("--values", opts.sweep_values, "sweep values")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (*simulate) return run_simulate(opts, std::cerr);
    if (*bound) return run_bound(opts, std::cerr);
    if (*verify) return run_verify(opts, std::cerr);
    return run_sweep(opts, std::cerr);
}
