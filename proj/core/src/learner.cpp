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
#include "airfeel/learner.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace airfeel {

void GradNormStats::observe(double sq) {
    max_sq = std::max(max_sq, sq);
    ++count;
    mean_sq += (sq - mean_sq) / static_cast<double>(count);
}

void GradNormStats::merge(const GradNormStats& other) {
    if (other.count == 0) return;
    max_sq = std::max(max_sq, other.max_sq);
    const double total = static_cast<double>(count + other.count);
    mean_sq = (mean_sq * static_cast<double>(count) + other.mean_sq * static_cast<double>(other.count)) / total;
    count += other.count;
}

LocalUpdate local_sgd(const ModelVector& theta, const FederatedTask& task, std::size_t device,
                      std::size_t tau, double eta_t, std::size_t batch_size, RngEngine& rng) {
    if (!(eta_t > 0.0)) throw std::invalid_argument("local_sgd: eta_t must be positive");
    if (tau == 0) throw std::invalid_argument("local_sgd: tau must be at least 1");
    if (theta.size() != task.dim()) throw std::invalid_argument("local_sgd: theta length mismatch");
    const std::size_t shard = task.shard(device).size();
    if (batch_size == 0 || batch_size > shard)
        throw std::invalid_argument("local_sgd: batch_size " + std::to_string(batch_size) +
                                    " outside [1, B_m=" + std::to_string(shard) + "]");

    const Eigen::VectorXd start = as_eigen(theta);
    Eigen::VectorXd local = start;
    Eigen::VectorXd grad_sum = Eigen::VectorXd::Zero(start.size());
    Eigen::VectorXd grad(start.size());
    std::vector<std::size_t> rows(batch_size);
    const bool full = batch_size == shard;
    if (full) std::iota(rows.begin(), rows.end(), 0);

    LocalUpdate out;
    out.device = device;
    for (std::size_t l = 0; l < tau; ++l) {
        if (!full)
            for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform_index(shard));
        batch_gradient(task, device, local, rows, grad);
        out.grad_norm_stats.observe(grad.squaredNorm());
        grad_sum += grad;
        local.noalias() -= eta_t * grad;
    }
    out.delta = to_model(-eta_t * grad_sum);
    return out;
}

ModelVector aggregate_error_free(std::span<const LocalUpdate> updates, std::size_t devices) {
    if (updates.size() != devices || devices == 0)
        throw std::invalid_argument("aggregate_error_free: expected " + std::to_string(devices) +
                                    " updates, got " + std::to_string(updates.size()));
    const std::size_t d = updates.front().delta.size();
    ModelVector sum(d);
    for (const auto& u : updates) {
        require_same_length(sum, u.delta, "aggregate_error_free");
        for (std::size_t j = 0; j < d; ++j) sum[j] += u.delta[j];
    }
    const double inv = 1.0 / static_cast<double>(devices);
    for (std::size_t j = 0; j < d; ++j) sum[j] *= inv;
    return sum;
}

ModelVector global_step(const ModelVector& theta, const ModelVector& estimate) {
    require_same_length(theta, estimate, "global_step");
    ModelVector out = theta;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += estimate[j];
    return out;
}

}  // namespace airfeel
