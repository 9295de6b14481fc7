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
#include "airfeel/transceiver.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "airfeel/parallel.hpp"

namespace airfeel {

SymbolBlocks transmit(const SymbolBlocks& update_blocks, double alpha_t) {
    if (!(alpha_t > 0.0))
        throw std::invalid_argument("transmit: alpha_t must be positive, got " + std::to_string(alpha_t));
    SymbolBlocks out = update_blocks;
    for (cplx& v : out.grid.data) v *= alpha_t;
    return out;
}

PowerLedger::PowerLedger(std::size_t devices, std::size_t symbols)
    : energy_(devices, 0.0), rounds_(devices, 0), symbols_(symbols) {}

void PowerLedger::record(std::size_t device, double alpha_t, const SymbolBlocks& update_blocks) {
    if (device >= energy_.size())
        throw std::invalid_argument("PowerLedger: device " + std::to_string(device) + " out of range");
    if (update_blocks.symbols() != symbols_)
        throw std::invalid_argument("PowerLedger: block count does not match N");
    energy_[device] += alpha_t * alpha_t * airfeel::energy(update_blocks.grid);
    ++rounds_[device];
}

void PowerLedger::merge(const PowerLedger& other) {
    if (other.energy_.size() != energy_.size() || other.symbols_ != symbols_)
        throw std::invalid_argument("PowerLedger: merging ledgers of different shape");
    for (std::size_t m = 0; m < energy_.size(); ++m) {
        energy_[m] += other.energy_[m];
        rounds_[m] += other.rounds_[m];
    }
}

double PowerLedger::average_power(std::size_t device) const {
    const std::size_t r = rounds_.at(device);
    if (r == 0) return 0.0;
    return energy_[device] / (static_cast<double>(symbols_) * static_cast<double>(r));
}

double PowerLedger::max_average_power() const {
    double best = 0.0;
    for (std::size_t m = 0; m < energy_.size(); ++m) best = std::max(best, average_power(m));
    return best;
}

double PowerLedger::mean_average_power() const {
    if (energy_.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t m = 0; m < energy_.size(); ++m) sum += average_power(m);
    return sum / static_cast<double>(energy_.size());
}

std::vector<std::size_t> PowerLedger::violations(double p_bar) const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < energy_.size(); ++m)
        if (average_power(m) > p_bar) out.push_back(m);
    return out;
}

PowerLedger record_power(PowerLedger ledger, std::size_t device, double alpha_t,
                         const SymbolBlocks& update_blocks) {
    ledger.record(device, alpha_t, update_blocks);
    return ledger;
}

ComplexGrid combine(const ReceivedTensor& received, const CsiTensor& csi, std::size_t antennas,
                    std::size_t workers) {
    const AntennaTensor& y = received.samples;
    const AntennaTensor& h = csi.estimates;
    if (antennas == 0) throw std::invalid_argument("combine: K must be positive");
    if (!y.same_shape(h) || y.antennas != antennas)
        throw std::invalid_argument("combine: received/CSI shapes disagree or K mismatch");

    ComplexGrid out(y.subchannels, y.symbols);
    const double inv_k = 1.0 / static_cast<double>(antennas);
    parallel_for(workers, y.symbols, [&](std::size_t n) {
        for (std::size_t i = 0; i < y.subchannels; ++i) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < antennas; ++k) acc += std::conj(h.at(k, n, i)) * y.at(k, n, i);
            out.at(n, i) = acc * inv_k;
        }
    });
    return out;
}

ModelVector estimate_average_update(const ComplexGrid& combined, double alpha_t, std::size_t devices,
                                    double sigma_h2, std::size_t d) {
    if (!(alpha_t > 0.0) || devices == 0 || !(sigma_h2 > 0.0))
        throw std::invalid_argument("estimate_average_update: need alpha_t > 0, M >= 1, sigma_h2 > 0");
    if (2 * combined.subchannels * combined.symbols < d)
        throw std::invalid_argument("estimate_average_update: combined grid too small for d");
    const double scale = alpha_t * static_cast<double>(devices) * sigma_h2;
    const std::size_t s = combined.subchannels;
    ModelVector out(d);
    for (std::size_t n = 0; n < combined.symbols; ++n)
        for (std::size_t i = 0; i < s; ++i) {
            const std::size_t re = 2 * n * s + i;
            const std::size_t im = (2 * n + 1) * s + i;
            if (re < d) out[re] = combined.at(n, i).real() / scale;
            if (im < d) out[im] = combined.at(n, i).imag() / scale;
        }
    return out;
}

ComplexGrid TermDecomposition::combined_total() const {
    ComplexGrid total = terms[0];
    for (std::size_t l = 1; l < kTerms; ++l)
        for (std::size_t e = 0; e < total.data.size(); ++e) total.data[e] += terms[l].data[e];
    return total;
}

ModelVector TermDecomposition::estimate_total() const {
    ModelVector total = estimates[0];
    for (std::size_t l = 1; l < kTerms; ++l)
        for (std::size_t e = 0; e < total.size(); ++e) total[e] += estimates[l][e];
    return total;
}

TermDecomposition decompose_received(std::span<const SymbolBlocks> update_blocks,
                                     const ChannelTensor& channel, const CsiTensor& csi,
                                     const NoiseTensor& noise, double alpha_t, std::size_t devices,
                                     double sigma_h2) {
    const std::size_t M = channel.devices, K = channel.antennas;
    const std::size_t S = channel.subchannels, N = channel.symbols;
    if (update_blocks.size() != M || devices != M)
        throw std::invalid_argument("decompose_received: device count mismatch");
    if (update_blocks.empty()) throw std::invalid_argument("decompose_received: no devices");
    for (const auto& b : update_blocks)
        if (b.subchannels() != S || b.symbols() != N || b.d_orig != update_blocks[0].d_orig)
            throw std::invalid_argument("decompose_received: update block shape mismatch");
    const AntennaTensor& err = csi.errors;
    const AntennaTensor& z = noise.samples;
    if (err.antennas != K || err.subchannels != S || err.symbols != N || !z.same_shape(err))
        throw std::invalid_argument("decompose_received: CSI/noise shape mismatch");

    TermDecomposition out;
    for (auto& term : out.terms) term = ComplexGrid(S, N);
    const double inv_k = 1.0 / static_cast<double>(K);

    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t i = 0; i < S; ++i) {
            cplx signal = 0.0, interference = 0.0, chan_noise = 0.0, csi_itf = 0.0, csi_noise = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const cplx zk = z.at(k, n, i);
                const cplx ek = err.at(k, n, i);
                for (std::size_t m = 0; m < M; ++m) {
                    const cplx hm = channel.at(m, k, n, i);
                    const cplx xm = update_blocks[m].grid.at(n, i);
                    signal += std::norm(hm) * xm;
                    for (std::size_t mp = 0; mp < M; ++mp) {
                        if (mp == m) continue;
                        interference += std::conj(hm) * channel.at(mp, k, n, i) * update_blocks[mp].grid.at(n, i);
                    }
                    chan_noise += std::conj(hm) * zk;
                    csi_itf += std::conj(ek) * hm * xm;
                }
                csi_noise += std::conj(ek) * zk;
            }
            out.terms[0].at(n, i) = alpha_t * inv_k * signal;
            out.terms[1].at(n, i) = alpha_t * inv_k * interference;
            out.terms[2].at(n, i) = inv_k * chan_noise;
            out.terms[3].at(n, i) = alpha_t * inv_k * csi_itf;
            out.terms[4].at(n, i) = inv_k * csi_noise;
        }

    const std::size_t d = update_blocks[0].d_orig;
    for (std::size_t l = 0; l < TermDecomposition::kTerms; ++l)
        out.estimates[l] = estimate_average_update(out.terms[l], alpha_t, M, sigma_h2, d);
    return out;
}

cplx interference_gain(const ChannelTensor& channel, std::size_t m, std::size_t n, std::size_t i) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < channel.antennas; ++k) {
        cplx others = 0.0;
        for (std::size_t mp = 0; mp < channel.devices; ++mp)
            if (mp != m) others += channel.at(mp, k, n, i);
        acc += channel.at(m, k, n, i) * std::conj(others);
    }
    return acc / static_cast<double>(channel.antennas);
}

cplx csi_error_gain(const ChannelTensor& channel, const CsiTensor& csi, std::size_t m, std::size_t n,
                    std::size_t i) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < channel.antennas; ++k)
        acc += std::conj(csi.errors.at(k, n, i)) * channel.at(m, k, n, i);
    return acc / static_cast<double>(channel.antennas);
}

}  // namespace airfeel
