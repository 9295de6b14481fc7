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
#include "airfeel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "airfeel/channel.hpp"
#include "airfeel/packing.hpp"
#include "airfeel/parallel.hpp"
#include "airfeel/rng.hpp"
#include "airfeel/transceiver.hpp"

namespace airfeel {
namespace {

constexpr std::size_t kChunk = 4096;

// Running mean and M2 of a fixed number of quantities.
struct Moments {
    std::size_t count = 0;
    std::vector<double> mean;
    std::vector<double> m2;

    explicit Moments(std::size_t q = 0) : mean(q, 0.0), m2(q, 0.0) {}

    void add(std::span<const double> x) {
        ++count;
        const double n = static_cast<double>(count);
        for (std::size_t j = 0; j < mean.size(); ++j) {
            const double delta = x[j] - mean[j];
            mean[j] += delta / n;
            m2[j] += delta * (x[j] - mean[j]);
        }
    }

    void merge(const Moments& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
        const double n = na + nb;
        for (std::size_t j = 0; j < mean.size(); ++j) {
            const double delta = o.mean[j] - mean[j];
            mean[j] += delta * nb / n;
            m2[j] += o.m2[j] + delta * delta * na * nb / n;
        }
        count += o.count;
    }

    [[nodiscard]] double std_error(std::size_t j) const {
        if (count < 2) return 0.0;
        const double n = static_cast<double>(count);
        return std::sqrt(m2[j] / (n - 1.0) / n);
    }
};

// Runs `trial(j, out)` for j < trials in fixed chunks and merges the chunk
// statistics in chunk order.
Moments run_trials(std::size_t trials, std::size_t quantities, std::size_t workers,
                   const std::function<void(std::size_t, std::vector<double>&)>& trial) {
    const std::size_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<Moments> partial(chunks, Moments(quantities));
    parallel_for(workers, chunks, [&](std::size_t c) {
        std::vector<double> x(quantities);
        const std::size_t end = std::min(trials, (c + 1) * kChunk);
        for (std::size_t j = c * kChunk; j < end; ++j) {
            trial(j, x);
            partial[c].add(x);
        }
    });
    Moments total(quantities);
    for (const auto& p : partial) total.merge(p);
    return total;
}

void check_inputs(const SimConfig& cfg, std::span<const ModelVector> updates, double alpha) {
    if (updates.size() != cfg.devices)
        throw std::invalid_argument("verify: expected " + std::to_string(cfg.devices) + " updates, got " +
                                    std::to_string(updates.size()));
    for (const auto& u : updates)
        if (u.size() != cfg.dim) throw std::invalid_argument("verify: update length differs from d");
    if (!(alpha > 0.0)) throw std::invalid_argument("verify: alpha must be positive");
    validate(cfg);
}

double sum_sq_norms(std::span<const ModelVector> updates) {
    double s = 0.0;
    for (const auto& u : updates) s += squared_norm(u);
    return s;
}

ModelVector average(std::span<const ModelVector> updates) {
    ModelVector avg(updates.front().size());
    for (const auto& u : updates)
        for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += u[j];
    for (std::size_t j = 0; j < avg.size(); ++j) avg[j] /= static_cast<double>(updates.size());
    return avg;
}

// Per-trial estimate decomposition under fresh channel, noise and CSI error.
TermDecomposition draw_terms(const SimConfig& cfg, const std::vector<SymbolBlocks>& blocks, double alpha,
                             const RngStream& trial) {
    const ChannelTensor ch = sample_channel(cfg, trial.derive(StreamLabel::channel, 0));
    const NoiseTensor z = sample_noise(cfg, trial.derive(StreamLabel::noise, 0));
    const CsiTensor csi = sample_csi(ch, cfg, trial.derive(StreamLabel::csi_error, 0));
    return decompose_received(blocks, ch, csi, z, alpha, cfg.devices, cfg.sigma_h2);
}

VerificationEntry relative_entry(std::string name, double closed, const Moments& m, std::size_t j,
                                 std::size_t trials) {
    VerificationEntry e;
    e.name = std::move(name);
    e.closed_form = closed;
    e.estimate = m.mean[j];
    e.std_error = m.std_error(j);
    e.trials = trials;
    if (closed == 0.0) {
        e.criterion = VerificationEntry::Criterion::exact_zero;
        e.pass = m.mean[j] == 0.0 && m.m2[j] == 0.0;
    } else {
        e.criterion = VerificationEntry::Criterion::relative;
        e.tolerance = kMomentTolerance;
        e.pass = std::abs(e.estimate - closed) <= kMomentTolerance * std::abs(closed);
        e.insufficient_trials = trials < kMinTrialsMoments;
    }
    return e;
}

VerificationEntry mean_entry(std::string name, double closed, const Moments& m, std::size_t j,
                             std::size_t trials) {
    VerificationEntry e;
    e.name = std::move(name);
    e.closed_form = closed;
    e.estimate = m.mean[j];
    e.std_error = m.std_error(j);
    e.trials = trials;
    e.criterion = VerificationEntry::Criterion::standard_errors;
    e.tolerance = kMeanStdErrors;
    e.pass = std::abs(e.estimate - closed) <= kMeanStdErrors * e.std_error;
    e.insufficient_trials = trials < kMinTrialsUnbiased;
    return e;
}

}  // namespace

std::string to_string(VerificationEntry::Criterion c) {
    switch (c) {
        case VerificationEntry::Criterion::relative: return "relative";
        case VerificationEntry::Criterion::standard_errors: return "standard_errors";
        case VerificationEntry::Criterion::exact_zero: return "exact_zero";
    }
    return "unknown";
}

bool VerificationReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const VerificationEntry& e) { return e.pass || e.insufficient_trials; });
}

void VerificationReport::append(const VerificationReport& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

std::array<double, 5> term_moment_closed_forms(const SimConfig& cfg, std::span<const ModelVector> updates,
                                               double alpha) {
    check_inputs(cfg, updates, alpha);
    const double M = static_cast<double>(cfg.devices), K = static_cast<double>(cfg.antennas);
    const double d = static_cast<double>(cfg.dim);
    const double sh = cfg.sigma_h2, sz = cfg.sigma_z2, st = cfg.sigma_ht2;
    const double norms = sum_sq_norms(updates);
    return {norms / (K * M * M),
            (M - 1.0) * norms / (K * M * M),
            sz * d / (2.0 * alpha * alpha * K * M * sh),
            st * norms / (K * M * M * sh),
            st * sz * d / (2.0 * alpha * alpha * K * M * M * sh * sh)};
}

double total_mse_closed_form(const SimConfig& cfg, std::span<const ModelVector> updates, double alpha) {
    check_inputs(cfg, updates, alpha);
    const double M = static_cast<double>(cfg.devices), K = static_cast<double>(cfg.antennas);
    const double r = cfg.sigma_ht2 / (M * cfg.sigma_h2);
    return (1.0 + r) * (sum_sq_norms(updates) / (K * M) +
                        cfg.sigma_z2 * static_cast<double>(cfg.dim) / (2.0 * alpha * alpha * K * M * cfg.sigma_h2));
}

VerificationReport mc_verify_unbiased(const SimConfig& cfg, std::span<const ModelVector> updates,
                                      std::size_t trials, double alpha, std::size_t workers) {
    check_inputs(cfg, updates, alpha);
    std::vector<SymbolBlocks> blocks;
    for (const auto& u : updates) blocks.push_back(pack_update(u, cfg.subchannels));
    const RngStream root = RngStream::from_seed(cfg.seed);
    const Moments m = run_trials(trials, cfg.dim, workers, [&](std::size_t j, std::vector<double>& x) {
        const ModelVector est = draw_terms(cfg, blocks, alpha, root.derive(StreamLabel::trial, j)).estimate_total();
        std::copy(est.begin(), est.end(), x.begin());
    });
    const ModelVector avg = average(updates);
    VerificationReport rep;
    for (std::size_t j = 0; j < cfg.dim; ++j)
        rep.entries.push_back(mean_entry("unbiased[" + std::to_string(j) + "]", avg[j], m, j, trials));
    return rep;
}

VerificationReport mc_verify_term_moments(const SimConfig& cfg, std::span<const ModelVector> updates,
                                          std::size_t trials, double alpha, std::size_t workers) {
    const auto closed = term_moment_closed_forms(cfg, updates, alpha);
    const double total_closed = total_mse_closed_form(cfg, updates, alpha);
    std::vector<SymbolBlocks> blocks;
    for (const auto& u : updates) blocks.push_back(pack_update(u, cfg.subchannels));
    const ModelVector avg = average(updates);
    const RngStream root = RngStream::from_seed(cfg.seed);
    const Moments m = run_trials(trials, 6, workers, [&](std::size_t j, std::vector<double>& x) {
        const TermDecomposition dec = draw_terms(cfg, blocks, alpha, root.derive(StreamLabel::trial, j));
        x[0] = squared_distance(dec.estimates[0], avg);
        for (std::size_t l = 1; l < TermDecomposition::kTerms; ++l) x[l] = squared_norm(dec.estimates[l]);
        x[5] = squared_distance(dec.estimate_total(), avg);
    });
    static const std::array<const char*, 5> names = {"signal_error", "interference", "channel_noise",
                                                     "csi_error_interference", "csi_error_noise"};
    VerificationReport rep;
    for (std::size_t l = 0; l < 5; ++l) rep.entries.push_back(relative_entry(names[l], closed[l], m, l, trials));
    rep.entries.push_back(relative_entry("total_mse", total_closed, m, 5, trials));
    return rep;
}

VerificationReport mc_verify_interference(const SimConfig& cfg, std::size_t trials, std::size_t workers) {
    validate(cfg);
    const RngStream root = RngStream::from_seed(cfg.seed);
    const Moments m = run_trials(trials, 4, workers, [&](std::size_t j, std::vector<double>& x) {
        const RngStream t = root.derive(StreamLabel::trial, j);
        const ChannelTensor ch = sample_channel(cfg, t.derive(StreamLabel::channel, 0));
        const cplx g = interference_gain(ch, 0, 0, 0);
        x[0] = g.real();
        x[1] = g.imag();
        x[2] = std::norm(g);
        if (cfg.sigma_ht2 > 0.0) {
            const CsiTensor csi = sample_csi(ch, cfg, t.derive(StreamLabel::csi_error, 0));
            x[3] = std::norm(csi_error_gain(ch, csi, 0, 0, 0));
        } else {
            x[3] = 0.0;
        }
    });
    const double M = static_cast<double>(cfg.devices), K = static_cast<double>(cfg.antennas);
    VerificationReport rep;
    rep.entries.push_back(mean_entry("interference_gain_mean_re", 0.0, m, 0, trials));
    rep.entries.push_back(mean_entry("interference_gain_mean_im", 0.0, m, 1, trials));
    rep.entries.push_back(
        relative_entry("interference_gain_second_moment", (M - 1.0) * cfg.sigma_h2 * cfg.sigma_h2 / K, m, 2, trials));
    rep.entries.push_back(
        relative_entry("csi_error_gain_second_moment", cfg.sigma_ht2 * cfg.sigma_h2 / K, m, 3, trials));
    if (cfg.devices == 1) {
        // No interferers: the gain is identically zero, the mean checks are exact.
        rep.entries[0].criterion = rep.entries[1].criterion = VerificationEntry::Criterion::exact_zero;
        rep.entries[0].pass = m.mean[0] == 0.0 && m.m2[0] == 0.0;
        rep.entries[1].pass = m.mean[1] == 0.0 && m.m2[1] == 0.0;
    }
    return rep;
}

}  // namespace airfeel
