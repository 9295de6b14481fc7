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
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "airfeel/bounds.hpp"
#include "airfeel/task.hpp"
#include "run_config.hpp"

namespace airfeel::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kVerifyFailed = 2, kNumericalAbort = 3 };

struct CommandOptions {
    std::string config_path;
    std::string out_dir;  // empty: $AIRFEEL_OUT_DIR, else ./airfeel_out
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
    std::optional<std::size_t> trials;
    std::string sweep_key;
    std::vector<std::string> sweep_values;
};

inline const char* kOutDirEnv = "AIRFEEL_OUT_DIR";

std::string resolve_out_dir(const std::string& requested);

/// Each command writes its outputs plus manifest.json into the output
/// directory, reports problems on `err` and returns an ExitCode.
int run_simulate(const CommandOptions& opts, std::ostream& err);
int run_bound(const CommandOptions& opts, std::ostream& err);
int run_verify(const CommandOptions& opts, std::ostream& err);
int run_sweep(const CommandOptions& opts, std::ostream& err);

/// Bound inputs: pinned config values first, then task constants, then the
/// empirical squared-gradient maximum `g2_estimate` for G2. Throws ConfigError
/// when a value is missing and cannot be derived.
BoundParams resolve_bound_params(const RunConfig& cfg, const FederatedTask* task,
                                 std::optional<double> g2_estimate);

/// Applies a sweep value to the config. Throws std::invalid_argument for an
/// unknown key or a value that does not fit it.
void apply_sweep_value(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace airfeel::cli
