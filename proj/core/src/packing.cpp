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
#include "airfeel/packing.hpp"

#include <stdexcept>
#include <string>

namespace airfeel {

SymbolBlocks pack_update(const ModelVector& update, std::size_t s) {
    if (s == 0) throw std::invalid_argument("pack_update: subchannel count must be positive");
    if (update.empty()) throw std::invalid_argument("pack_update: empty update");
    const std::size_t d = update.size();
    const std::size_t n_sym = symbols_for(d, s);

    SymbolBlocks out{ComplexGrid(s, n_sym), d};
    auto entry = [&](std::size_t idx) { return idx < d ? update[idx] : 0.0; };
    for (std::size_t n = 0; n < n_sym; ++n) {
        const std::size_t re_base = 2 * n * s;
        const std::size_t im_base = (2 * n + 1) * s;
        for (std::size_t i = 0; i < s; ++i)
            out.grid.at(n, i) = cplx(entry(re_base + i), entry(im_base + i));
    }
    return out;
}

ModelVector unpack_blocks(const SymbolBlocks& blocks) {
    const std::size_t s = blocks.subchannels();
    const std::size_t d = blocks.d_orig;
    if (s == 0 || d == 0) throw std::invalid_argument("unpack_blocks: empty block shape");
    if (blocks.grid.data.size() != s * blocks.symbols())
        throw std::invalid_argument("unpack_blocks: sample count does not match s * N");
    if (blocks.symbols() != symbols_for(d, s))
        throw std::invalid_argument("unpack_blocks: " + std::to_string(blocks.symbols()) +
                                    " symbols cannot hold d=" + std::to_string(d) +
                                    " with s=" + std::to_string(s));

    ModelVector out(d);
    for (std::size_t n = 0; n < blocks.symbols(); ++n) {
        const std::size_t re_base = 2 * n * s;
        const std::size_t im_base = (2 * n + 1) * s;
        for (std::size_t i = 0; i < s; ++i) {
            const cplx v = blocks.grid.at(n, i);
            if (re_base + i < d) out[re_base + i] = v.real();
            if (im_base + i < d) out[im_base + i] = v.imag();
        }
    }
    return out;
}

double energy(const ComplexGrid& grid) {
    double e = 0.0;
    for (const cplx& v : grid.data) e += std::norm(v);
    return e;
}

}  // namespace airfeel
