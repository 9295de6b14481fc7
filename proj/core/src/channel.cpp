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
#include "airfeel/channel.hpp"

#include <stdexcept>
#include <string>

#include "airfeel/parallel.hpp"

namespace airfeel {

ChannelTensor sample_channel(const SimConfig& cfg, const RngStream& rng, std::size_t workers) {
    ChannelTensor ch;
    ch.devices = cfg.devices;
    ch.antennas = cfg.antennas;
    ch.subchannels = cfg.subchannels;
    ch.symbols = cfg.symbols();
    ch.gains.resize(ch.devices * ch.antennas * ch.subchannels * ch.symbols);

    const std::size_t per_device = ch.antennas * ch.symbols * ch.subchannels;
    parallel_for(workers, ch.devices, [&](std::size_t m) {
        const std::size_t base = m * per_device;
        for (std::size_t e = base; e < base + per_device; ++e)
            ch.gains[e] = rng.complex_normal(e, cfg.sigma_h2);
    });
    return ch;
}

ChannelTensor deterministic_channel(const SimConfig& cfg, cplx gain) {
    ChannelTensor ch;
    ch.devices = cfg.devices;
    ch.antennas = cfg.antennas;
    ch.subchannels = cfg.subchannels;
    ch.symbols = cfg.symbols();
    ch.gains.assign(ch.devices * ch.antennas * ch.subchannels * ch.symbols, gain);
    ch.deterministic = true;
    return ch;
}

NoiseTensor sample_noise(const SimConfig& cfg, const RngStream& rng) {
    NoiseTensor noise{AntennaTensor(cfg.antennas, cfg.subchannels, cfg.symbols())};
    if (cfg.sigma_z2 == 0.0) return noise;
    for (std::size_t e = 0; e < noise.samples.data.size(); ++e)
        noise.samples.data[e] = rng.complex_normal(e, cfg.sigma_z2);
    return noise;
}

CsiTensor sample_csi(const ChannelTensor& channel, const SimConfig& cfg, const RngStream& rng) {
    if (channel.devices != cfg.devices || channel.antennas != cfg.antennas ||
        channel.subchannels != cfg.subchannels || channel.symbols != cfg.symbols())
        throw std::invalid_argument("sample_csi: channel shape does not match configuration");

    CsiTensor csi{AntennaTensor(channel.antennas, channel.subchannels, channel.symbols),
                  AntennaTensor(channel.antennas, channel.subchannels, channel.symbols)};
    for (std::size_t k = 0; k < channel.antennas; ++k)
        for (std::size_t n = 0; n < channel.symbols; ++n)
            for (std::size_t i = 0; i < channel.subchannels; ++i) {
                cplx sum = 0.0;
                for (std::size_t m = 0; m < channel.devices; ++m) sum += channel.at(m, k, n, i);
                const std::size_t e = csi.errors.index(k, n, i);
                const cplx err = cfg.sigma_ht2 == 0.0 ? cplx(0.0) : rng.complex_normal(e, cfg.sigma_ht2);
                csi.errors.data[e] = err;
                csi.estimates.data[e] = sum + err;
            }
    return csi;
}

ReceivedTensor propagate(std::span<const SymbolBlocks> tx, const ChannelTensor& channel,
                         const NoiseTensor& noise, std::size_t workers) {
    if (tx.size() != channel.devices)
        throw std::invalid_argument("propagate: " + std::to_string(tx.size()) +
                                    " transmitters for a channel with " +
                                    std::to_string(channel.devices) + " devices");
    for (const auto& blocks : tx)
        if (blocks.subchannels() != channel.subchannels || blocks.symbols() != channel.symbols)
            throw std::invalid_argument("propagate: transmitted block shape does not match channel");
    const AntennaTensor& z = noise.samples;
    if (z.antennas != channel.antennas || z.subchannels != channel.subchannels ||
        z.symbols != channel.symbols)
        throw std::invalid_argument("propagate: noise shape does not match channel");

    ReceivedTensor rx{AntennaTensor(channel.antennas, channel.subchannels, channel.symbols)};
    parallel_for(workers, channel.antennas, [&](std::size_t k) {
        for (std::size_t n = 0; n < channel.symbols; ++n)
            for (std::size_t i = 0; i < channel.subchannels; ++i) {
                cplx acc = 0.0;
                for (std::size_t m = 0; m < channel.devices; ++m)
                    acc += channel.at(m, k, n, i) * tx[m].grid.at(n, i);
                rx.samples.at(k, n, i) = acc + z.at(k, n, i);
            }
    });
    return rx;
}

}  // namespace airfeel
