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
#include <span>

#include "airfeel/model_vector.hpp"
#include "airfeel/rng.hpp"
#include "airfeel/task.hpp"

namespace airfeel {

/// Squared norms of the stochastic gradients seen during local steps.
struct GradNormStats {
    double max_sq = 0.0;
    double mean_sq = 0.0;
    std::size_t count = 0;

    void observe(double sq);
    void merge(const GradNormStats& other);
};

struct LocalUpdate {
    ModelVector delta;  // theta_m^{tau+1} - theta(t)
    std::size_t device = 0;
    GradNormStats grad_norm_stats;
};

/// tau local SGD steps on device m starting at theta:
///     delta = -eta_t * sum_l g_l,  g_l = mini-batch average gradient at theta_m^l.
/// batch_size == B_m uses the whole shard each step; smaller batches are drawn
/// uniformly with replacement from `rng`.
/// Throws std::invalid_argument if eta_t <= 0, tau == 0, batch_size == 0 or
/// batch_size > B_m.
LocalUpdate local_sgd(const ModelVector& theta, const FederatedTask& task, std::size_t device,
                      std::size_t tau, double eta_t, std::size_t batch_size, RngEngine& rng);

/// Entrywise mean of exactly M updates, accumulated in the given order.
ModelVector aggregate_error_free(std::span<const LocalUpdate> updates, std::size_t devices);

/// theta + estimate.
ModelVector global_step(const ModelVector& theta, const ModelVector& estimate);

}  // namespace airfeel
