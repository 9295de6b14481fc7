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
#include <string>

#include "airfeel/schedule.hpp"

namespace airfeel {

enum class PartitionMode { iid, non_iid };

std::string to_string(PartitionMode mode);
PartitionMode parse_partition_mode(const std::string& text);

/// Every scalar of one over-the-air federated run.
struct SimConfig {
    std::size_t devices = 1;        // M
    std::size_t antennas = 1;       // K
    std::size_t dim = 2;            // d
    std::size_t subchannels = 1;    // s
    double sigma_h2 = 1.0;          // channel gain variance
    double sigma_z2 = 0.0;          // receiver noise variance
    double sigma_ht2 = 0.0;         // CSI estimation error variance
    std::size_t local_steps = 1;    // tau
    std::size_t rounds = 1;         // T
    PowerSchedule alpha;
    LearningRateSchedule eta;
    std::uint64_t seed = 0;
    PartitionMode partition_mode = PartitionMode::iid;
    std::size_t batch_size = 1;

    /// Number of OFDM symbols per device per round, ceil(d / 2s).
    [[nodiscard]] std::size_t symbols() const { return (dim + 2 * subchannels - 1) / (2 * subchannels); }
};

/// Throws ConfigError naming the first violated constraint. Schedules are
/// checked for positivity on rounds 0..T.
void validate(const SimConfig& cfg);

/// Checks 0 < eta(t) <= min{1, 1/(mu tau)} on rounds [0, last_round]; the
/// message names the first offending round.
void validate_eta_for_bound(const LearningRateSchedule& eta, double mu, std::size_t tau,
                            std::size_t last_round);

}  // namespace airfeel
