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
#include <optional>
#include <string>
#include <vector>

#include "airfeel/config.hpp"
#include "airfeel/learner.hpp"
#include "airfeel/model_vector.hpp"
#include "airfeel/task.hpp"
#include "airfeel/transceiver.hpp"

namespace airfeel {

enum class ChannelMode { random, deterministic };

std::string to_string(ChannelMode mode);
ChannelMode parse_channel_mode(const std::string& text);

struct SimOptions {
    bool error_free_baseline = false;
    std::size_t workers = 1;
    // deterministic: every gain equals sqrt(sigma_h2) (exact-arithmetic test hook).
    ChannelMode channel_mode = ChannelMode::random;
};

/// State after `round` global updates; alpha and eta are the values used in
/// the update that produced it.
struct MetricsRow {
    std::string link;  // "ota" or "error_free"
    std::size_t round = 0;
    double alpha = 0.0;
    double eta = 0.0;
    double loss = 0.0;
    double loss_gap = 0.0;
    double dist2 = 0.0;
    double estimate_mse = 0.0;  // |estimate - average update|^2 of this round
    double avg_power_max = 0.0;
    double avg_power_mean = 0.0;
    std::optional<double> test_accuracy;
};

struct SimResult {
    std::vector<MetricsRow> rows;
    std::vector<MetricsRow> baseline_rows;
    PowerLedger ledger;
    GradNormStats grad_stats;
    GradNormStats baseline_grad_stats;
    double initial_loss = 0.0;
    double initial_dist2 = 0.0;
    ModelVector final_theta;
    // Shards of unequal size: the uniform 1/M aggregation no longer matches
    // the B_m/B weights of the objective.
    bool unequal_shards = false;
};

/// Runs cfg.rounds rounds of local SGD + over-the-air aggregation from theta0
/// (zeros when empty). Round t draws from RngStream(cfg.seed).derive(round, t):
/// device m's mini-batches from .derive(device, m).derive(minibatch, 0), the
/// channel, noise and CSI error from .derive(channel|noise|csi_error, 0). The
/// error-free baseline reuses the same mini-batch streams.
/// Throws ConfigError on an invalid configuration and NumericalAbort (with the
/// row index) when the model stops being finite.
SimResult simulate(const SimConfig& cfg, const FederatedTask& task, const SimOptions& options = {},
                   ModelVector theta0 = {});

}  // namespace airfeel
