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
#include "airfeel/config.hpp"

#include <algorithm>
#include <cmath>

#include "airfeel/errors.hpp"

namespace airfeel {

std::string to_string(PartitionMode mode) {
    return mode == PartitionMode::iid ? "iid" : "non_iid";
}

PartitionMode parse_partition_mode(const std::string& text) {
    if (text == "iid") return PartitionMode::iid;
    if (text == "non_iid" || text == "non-iid" || text == "noniid") return PartitionMode::non_iid;
    throw ConfigError("partition_mode must be \"iid\" or \"non_iid\", got \"" + text + "\"");
}

void validate(const SimConfig& cfg) {
    auto positive = [](std::size_t v, const char* name) {
        if (v == 0) throw ConfigError(std::string(name) + " must be a positive integer");
    };
    positive(cfg.devices, "m");
    positive(cfg.antennas, "k");
    positive(cfg.dim, "d");
    positive(cfg.subchannels, "s");
    positive(cfg.local_steps, "tau");
    positive(cfg.rounds, "t_rounds");
    positive(cfg.batch_size, "batch_size");
    if (cfg.subchannels > cfg.dim) throw ConfigError("s must not exceed d");
    if (!(cfg.sigma_h2 > 0.0) || !std::isfinite(cfg.sigma_h2))
        throw ConfigError("sigma_h2 must be positive and finite");
    if (!(cfg.sigma_z2 >= 0.0) || !std::isfinite(cfg.sigma_z2))
        throw ConfigError("sigma_z2 must be non-negative and finite");
    if (!(cfg.sigma_ht2 >= 0.0) || !std::isfinite(cfg.sigma_ht2))
        throw ConfigError("sigma_ht2 must be non-negative and finite");
    for (std::size_t t = 0; t <= cfg.rounds; ++t) {
        // The table schedules only need entries for rounds actually simulated.
        if (t == cfg.rounds && cfg.alpha.kind == PowerSchedule::Kind::table) break;
        eval_alpha(cfg.alpha, static_cast<std::int64_t>(t));
    }
    for (std::size_t t = 0; t <= cfg.rounds; ++t) {
        if (t == cfg.rounds && cfg.eta.kind == LearningRateSchedule::Kind::table) break;
        eval_eta(cfg.eta, static_cast<std::int64_t>(t));
    }
}

void validate_eta_for_bound(const LearningRateSchedule& eta, double mu, std::size_t tau,
                            std::size_t last_round) {
    if (!(mu > 0.0)) throw ConfigError("mu must be positive for a bound evaluation");
    if (tau == 0) throw ConfigError("tau must be positive");
    const double cap = std::min(1.0, 1.0 / (mu * static_cast<double>(tau)));
    for (std::size_t t = 0; t <= last_round; ++t) {
        const double value = eval_eta(eta, static_cast<std::int64_t>(t));
        // Allow a few ulps so c0 = 1/(mu tau) itself is accepted.
        if (value > cap * (1.0 + 4e-16))
            throw ConfigError("eta(" + std::to_string(t) + ") = " + std::to_string(value) +
                              " exceeds min{1, 1/(mu tau)} = " + std::to_string(cap));
    }
}

}  // namespace airfeel
