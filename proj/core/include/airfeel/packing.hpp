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

#include <complex>
#include <cstddef>
#include <vector>

#include "airfeel/model_vector.hpp"

namespace airfeel {

using cplx = std::complex<double>;

/// N OFDM symbols of s complex samples, stored symbol-major:
/// element (n, i) lives at data[n * s + i].
struct ComplexGrid {
    std::size_t subchannels = 0;
    std::size_t symbols = 0;
    std::vector<cplx> data;

    ComplexGrid() = default;
    ComplexGrid(std::size_t s, std::size_t n) : subchannels(s), symbols(n), data(s * n) {}

    cplx& at(std::size_t n, std::size_t i) { return data[n * subchannels + i]; }
    [[nodiscard]] cplx at(std::size_t n, std::size_t i) const { return data[n * subchannels + i]; }

    [[nodiscard]] bool same_shape(const ComplexGrid& o) const {
        return subchannels == o.subchannels && symbols == o.symbols;
    }

    friend bool operator==(const ComplexGrid&, const ComplexGrid&) = default;
};

/// A real update vector laid out as complex baseband symbols. Carries the
/// original length so the zero padding can be dropped on the way back.
struct SymbolBlocks {
    ComplexGrid grid;
    std::size_t d_orig = 0;

    [[nodiscard]] std::size_t subchannels() const { return grid.subchannels; }
    [[nodiscard]] std::size_t symbols() const { return grid.symbols; }

    friend bool operator==(const SymbolBlocks&, const SymbolBlocks&) = default;
};

[[nodiscard]] inline std::size_t symbols_for(std::size_t d, std::size_t s) {
    return (d + 2 * s - 1) / (2 * s);
}

/// Zero-pads `update` to length 2sN and maps it onto N symbols. With 0-based
/// indices, symbol n subchannel i carries
///     update[2ns + i] + j * update[(2n+1)s + i],
/// which is the 1-based rule  dtheta_{2(n-1)s+i} + j dtheta_{(2n-1)s+i}.
/// Throws std::invalid_argument when s == 0 or the update is empty.
SymbolBlocks pack_update(const ModelVector& update, std::size_t s);

/// Inverse of pack_update; drops the padded tail. Throws std::invalid_argument
/// when the grid shape does not match ceil(d_orig / 2s) symbols.
ModelVector unpack_blocks(const SymbolBlocks& blocks);

/// Sum over all samples of |x|^2.
double energy(const ComplexGrid& grid);

}  // namespace airfeel
