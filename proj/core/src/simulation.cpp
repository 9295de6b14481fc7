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
#include "airfeel/simulation.hpp"

#include <cmath>
#include <string>

#include "airfeel/channel.hpp"
#include "airfeel/errors.hpp"
#include "airfeel/packing.hpp"
#include "airfeel/parallel.hpp"
#include "airfeel/rng.hpp"

namespace airfeel {
namespace {

MetricsRow measure(const FederatedTask& task, const ModelVector& theta, std::string link, std::size_t round,
                   double alpha, double eta) {
    MetricsRow row;
    row.link = std::move(link);
    row.round = round;
    row.alpha = alpha;
    row.eta = eta;
    row.loss = loss(task, theta);
    row.loss_gap = row.loss - task.constants().f_star;
    row.dist2 = squared_distance(theta, task.constants().theta_star);
    if (task.test_set()) row.test_accuracy = accuracy(theta, *task.test_set());
    return row;
}

void require_finite(const ModelVector& theta, const std::string& link, std::size_t round) {
    if (!theta.all_finite())
        throw NumericalAbort("non-finite model in " + link + " run after round " + std::to_string(round), round);
}

void require_finite(const MetricsRow& row) {
    if (!std::isfinite(row.loss) || !std::isfinite(row.dist2) || !std::isfinite(row.estimate_mse) ||
        !std::isfinite(row.avg_power_max))
        throw NumericalAbort("metrics overflowed in " + row.link + " run after round " + std::to_string(row.round) +
                                 " (loss " + std::to_string(row.loss) + ")",
                             row.round);
}

std::vector<LocalUpdate> local_round(const SimConfig& cfg, const FederatedTask& task, const ModelVector& theta,
                                     const RngStream& round_stream, double eta, std::size_t workers) {
    std::vector<LocalUpdate> updates(cfg.devices);
    parallel_for(workers, cfg.devices, [&](std::size_t m) {
        RngEngine rng(round_stream.derive(StreamLabel::device, m).derive(StreamLabel::minibatch, 0));
        updates[m] = local_sgd(theta, task, m, cfg.local_steps, eta, cfg.batch_size, rng);
    });
    return updates;
}

}  // namespace

std::string to_string(ChannelMode mode) { return mode == ChannelMode::random ? "random" : "deterministic"; }

ChannelMode parse_channel_mode(const std::string& text) {
    if (text == "random") return ChannelMode::random;
    if (text == "deterministic") return ChannelMode::deterministic;
    throw ConfigError("run.channel_mode must be \"random\" or \"deterministic\", got \"" + text + "\"");
}

SimResult simulate(const SimConfig& cfg, const FederatedTask& task, const SimOptions& options, ModelVector theta0) {
    validate(cfg);
    if (task.devices() != cfg.devices)
        throw ConfigError("task has " + std::to_string(task.devices()) + " devices, configuration has M=" +
                          std::to_string(cfg.devices));
    if (task.dim() != cfg.dim)
        throw ConfigError("task dimension " + std::to_string(task.dim()) + " differs from d=" +
                          std::to_string(cfg.dim));
    for (std::size_t m = 0; m < task.devices(); ++m)
        if (cfg.batch_size > task.shard(m).size())
            throw ConfigError("batch_size " + std::to_string(cfg.batch_size) + " exceeds B_m=" +
                              std::to_string(task.shard(m).size()) + " on device " + std::to_string(m));
    if (theta0.size() == 0) theta0 = ModelVector(cfg.dim);
    if (theta0.size() != cfg.dim) throw ConfigError("initial model length differs from d");

    const std::size_t workers = std::max<std::size_t>(1, options.workers);
    const RngStream root = RngStream::from_seed(cfg.seed);
    const std::size_t N = cfg.symbols();

    SimResult res;
    res.ledger = PowerLedger(cfg.devices, N);
    res.unequal_shards = !task.equal_shards();
    res.initial_loss = loss(task, theta0);
    res.initial_dist2 = squared_distance(theta0, task.constants().theta_star);

    ModelVector theta = theta0;
    ModelVector theta_ef = theta0;
    for (std::size_t t = 0; t < cfg.rounds; ++t) {
        const auto ti = static_cast<std::int64_t>(t);
        const double alpha = eval_alpha(cfg.alpha, ti);
        const double eta = eval_eta(cfg.eta, ti);
        const RngStream R = root.derive(StreamLabel::round, t);

        const std::vector<LocalUpdate> updates = local_round(cfg, task, theta, R, eta, workers);
        std::vector<SymbolBlocks> tx(cfg.devices);
        for (std::size_t m = 0; m < cfg.devices; ++m) {
            res.grad_stats.merge(updates[m].grad_norm_stats);
            const SymbolBlocks blocks = pack_update(updates[m].delta, cfg.subchannels);
            res.ledger.record(m, alpha, blocks);
            tx[m] = transmit(blocks, alpha);
        }
        const ChannelTensor channel = options.channel_mode == ChannelMode::random
                                          ? sample_channel(cfg, R.derive(StreamLabel::channel, 0), workers)
                                          : deterministic_channel(cfg, cplx(std::sqrt(cfg.sigma_h2), 0.0));
        const NoiseTensor noise = sample_noise(cfg, R.derive(StreamLabel::noise, 0));
        const CsiTensor csi = sample_csi(channel, cfg, R.derive(StreamLabel::csi_error, 0));
        const ReceivedTensor rx = propagate(tx, channel, noise, workers);
        const ComplexGrid combined = combine(rx, csi, cfg.antennas, workers);
        const ModelVector estimate = estimate_average_update(combined, alpha, cfg.devices, cfg.sigma_h2, cfg.dim);
        const ModelVector exact = aggregate_error_free(updates, cfg.devices);

        theta = global_step(theta, estimate);
        require_finite(theta, "ota", t + 1);
        MetricsRow row = measure(task, theta, "ota", t + 1, alpha, eta);
        row.estimate_mse = squared_distance(estimate, exact);
        row.avg_power_max = res.ledger.max_average_power();
        row.avg_power_mean = res.ledger.mean_average_power();
        require_finite(row);
        res.rows.push_back(std::move(row));

        if (options.error_free_baseline) {
            const std::vector<LocalUpdate> ef_updates = local_round(cfg, task, theta_ef, R, eta, workers);
            for (const auto& u : ef_updates) res.baseline_grad_stats.merge(u.grad_norm_stats);
            theta_ef = global_step(theta_ef, aggregate_error_free(ef_updates, cfg.devices));
            require_finite(theta_ef, "error_free", t + 1);
            res.baseline_rows.push_back(measure(task, theta_ef, "error_free", t + 1, alpha, eta));
            require_finite(res.baseline_rows.back());
        }
    }
    res.final_theta = theta;
    return res;
}

}  // namespace airfeel
