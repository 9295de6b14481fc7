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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "airfeel/channel.hpp"
#include "airfeel/model_vector.hpp"
#include "airfeel/packing.hpp"

namespace airfeel {

/// Device-side analog transmission: every sample scaled by alpha_t.
/// Throws std::invalid_argument unless alpha_t > 0.
SymbolBlocks transmit(const SymbolBlocks& update_blocks, double alpha_t);

/// Running per-device transmit energy, sum_t alpha_t^2 sum_n ||x_m^n||^2.
///
/// The average power (energy / (N * rounds)) is audited, never enforced:
/// alpha_t is fixed in advance by the schedule, so a device above the
/// budget is reported through violations() rather than clipped.
class PowerLedger {
public:
    PowerLedger() = default;
    PowerLedger(std::size_t devices, std::size_t symbols);

    void record(std::size_t device, double alpha_t, const SymbolBlocks& update_blocks);

    /// Folds another ledger covering the same devices into this one.
    void merge(const PowerLedger& other);

    [[nodiscard]] std::size_t devices() const { return energy_.size(); }
    [[nodiscard]] std::size_t symbols() const { return symbols_; }
    [[nodiscard]] double energy(std::size_t device) const { return energy_.at(device); }
    [[nodiscard]] std::size_t rounds(std::size_t device) const { return rounds_.at(device); }

    /// 0 before the first recorded round.
    [[nodiscard]] double average_power(std::size_t device) const;
    [[nodiscard]] double max_average_power() const;
    [[nodiscard]] double mean_average_power() const;

    /// Devices whose average power exceeds p_bar.
    [[nodiscard]] std::vector<std::size_t> violations(double p_bar) const;

private:
    std::vector<double> energy_;
    std::vector<std::size_t> rounds_;
    std::size_t symbols_ = 0;
};

/// Functional form of PowerLedger::record.
PowerLedger record_power(PowerLedger ledger, std::size_t device, double alpha_t,
                         const SymbolBlocks& update_blocks);

/// Receive combining with the estimated channel sum:
///     out(n, i) = (1/K) sum_k conj(csi[k,n,i]) * y[k,n,i].
ComplexGrid combine(const ReceivedTensor& received, const CsiTensor& csi, std::size_t antennas,
                    std::size_t workers = 1);

/// Estimate of the average update: the real and imaginary parts of each
/// combined sample divided by alpha_t M sigma_h2, laid out as in
/// pack_update and truncated to d.
ModelVector estimate_average_update(const ComplexGrid& combined, double alpha_t, std::size_t devices,
                                    double sigma_h2, std::size_t d);

/// The combined signal split into its five additive contributions:
///   0 signal, 1 inter-device interference, 2 channel noise,
///   3 CSI-error interference, 4 CSI-error noise.
struct TermDecomposition {
    static constexpr std::size_t kTerms = 5;

    std::array<ComplexGrid, kTerms> terms;
    std::array<ModelVector, kTerms> estimates;

    [[nodiscard]] ComplexGrid combined_total() const;
    [[nodiscard]] ModelVector estimate_total() const;
};

/// `update_blocks` are the unscaled packed updates (before transmit()); the
/// decomposition applies alpha_t itself. Throws std::invalid_argument on
/// inconsistent shapes.
TermDecomposition decompose_received(std::span<const SymbolBlocks> update_blocks,
                                     const ChannelTensor& channel, const CsiTensor& csi,
                                     const NoiseTensor& noise, double alpha_t, std::size_t devices,
                                     double sigma_h2);

/// Effective interference gain seen by device m:
///     (1/K) sum_k h[m,k,n,i] * conj(sum_{m' != m} h[m',k,n,i]).
cplx interference_gain(const ChannelTensor& channel, std::size_t m, std::size_t n, std::size_t i);

/// CSI-error coupling of device m: (1/K) sum_k conj(err[k,n,i]) * h[m,k,n,i].
cplx csi_error_gain(const ChannelTensor& channel, const CsiTensor& csi, std::size_t m, std::size_t n,
                    std::size_t i);

}  // namespace airfeel
