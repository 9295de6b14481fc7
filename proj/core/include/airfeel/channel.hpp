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
#include <vector>

#include "airfeel/config.hpp"
#include "airfeel/packing.hpp"
#include "airfeel/rng.hpp"

namespace airfeel {

/// Complex array indexed by (antenna k, symbol n, subchannel i). Used for the
/// receiver noise, the PS-side CSI and the received signal.
struct AntennaTensor {
    std::size_t antennas = 0;
    std::size_t subchannels = 0;
    std::size_t symbols = 0;
    std::vector<cplx> data;

    AntennaTensor() = default;
    AntennaTensor(std::size_t k, std::size_t s, std::size_t n)
        : antennas(k), subchannels(s), symbols(n), data(k * s * n) {}

    [[nodiscard]] std::size_t index(std::size_t k, std::size_t n, std::size_t i) const {
        return (k * symbols + n) * subchannels + i;
    }
    cplx& at(std::size_t k, std::size_t n, std::size_t i) { return data[index(k, n, i)]; }
    [[nodiscard]] cplx at(std::size_t k, std::size_t n, std::size_t i) const { return data[index(k, n, i)]; }

    [[nodiscard]] bool same_shape(const AntennaTensor& o) const {
        return antennas == o.antennas && subchannels == o.subchannels && symbols == o.symbols;
    }

    friend bool operator==(const AntennaTensor&, const AntennaTensor&) = default;
};

/// Fading gains h_{m,k,i}^n for one round.
struct ChannelTensor {
    std::size_t devices = 0;
    std::size_t antennas = 0;
    std::size_t subchannels = 0;
    std::size_t symbols = 0;
    std::vector<cplx> gains;
    // Set by deterministic_channel(); statistical checks must skip such tensors.
    bool deterministic = false;

    [[nodiscard]] std::size_t index(std::size_t m, std::size_t k, std::size_t n, std::size_t i) const {
        return ((m * antennas + k) * symbols + n) * subchannels + i;
    }
    cplx& at(std::size_t m, std::size_t k, std::size_t n, std::size_t i) { return gains[index(m, k, n, i)]; }
    [[nodiscard]] cplx at(std::size_t m, std::size_t k, std::size_t n, std::size_t i) const {
        return gains[index(m, k, n, i)];
    }

    friend bool operator==(const ChannelTensor&, const ChannelTensor&) = default;
};

struct NoiseTensor {
    AntennaTensor samples;
};

/// PS-side estimate of the summed channel per antenna, and the estimation
/// error it contains: estimates = sum_m gains + errors.
struct CsiTensor {
    AntennaTensor estimates;
    AntennaTensor errors;
};

struct ReceivedTensor {
    AntennaTensor samples;
};

/// iid CN(0, sigma_h2) gains of shape (M, K, N, s). Element e uses counter e of
/// `rng`, so the worker count never changes the draw.
ChannelTensor sample_channel(const SimConfig& cfg, const RngStream& rng, std::size_t workers = 1);

/// Test hook: every gain equals `gain`; the tensor is flagged deterministic.
ChannelTensor deterministic_channel(const SimConfig& cfg, cplx gain);

/// iid CN(0, sigma_z2) noise of shape (K, N, s); exactly zero when sigma_z2 == 0.
NoiseTensor sample_noise(const SimConfig& cfg, const RngStream& rng);

/// Adds an independent CN(0, sigma_ht2) error to the per-antenna channel sum.
CsiTensor sample_csi(const ChannelTensor& channel, const SimConfig& cfg, const RngStream& rng);

/// y[k,n,i] = sum_m h[m,k,n,i] * tx[m](n,i) + z[k,n,i]. `tx` already carries
/// the alpha_t scaling. Throws std::invalid_argument on shape mismatch.
ReceivedTensor propagate(std::span<const SymbolBlocks> tx, const ChannelTensor& channel,
                         const NoiseTensor& noise, std::size_t workers = 1);

}  // namespace airfeel
