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
#include <string>
#include <vector>

#include <json.hpp>

#include "airfeel/bounds.hpp"
#include "airfeel/config.hpp"
#include "airfeel/model_vector.hpp"
#include "airfeel/simulation.hpp"
#include "airfeel/task.hpp"

namespace airfeel::cli {

struct TaskSection {
    TaskSpec spec;
    std::string data_path;  // non-empty: ingest a delimited file instead of generating
};

/// Bound inputs the user may pin; unset ones are derived from the task.
struct BoundSection {
    std::optional<double> mu;
    std::optional<double> L;
    std::optional<double> G2;
    std::optional<double> Gamma;
    std::optional<double> init_gap;
    std::vector<std::size_t> k_values;
};

struct VerifySection {
    std::size_t trials = 1'000'000;
    double alpha = 1.0;
    std::vector<ModelVector> updates;  // empty: device m sends the unit vector e_{m mod d}
};

struct RunSection {
    bool error_free_baseline = true;
    ChannelMode channel_mode = ChannelMode::random;
};

struct RunConfig {
    SimConfig sim;
    TaskSection task;
    BoundSection bound;
    VerifySection verify;
    RunSection run;
    bool batch_size_given = false;
};

/// Parses a JSON config (or a manifest.json, whose "config" member is used).
/// Errors carry "path:line:" of the offending key. Throws ConfigError.
RunConfig load_config(const std::string& path);

/// Same, from text; `origin` names the source in messages.
RunConfig parse_config(const std::string& text, const std::string& origin);

/// Fully resolved config: every key present, defaults filled in. Parsing
/// this back yields an identical RunConfig.
nlohmann::json to_json(const RunConfig& cfg);

/// 64-bit FNV-1a of the compact dump of to_json(cfg), as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// The learning task described by cfg (generated or ingested and partitioned).
FederatedTask build_task(const RunConfig& cfg);

}  // namespace airfeel::cli
