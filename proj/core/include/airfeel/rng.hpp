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
#include <complex>
#include <cstdint>

namespace airfeel {

// Roles used when splitting a random stream. The numeric values are part of
// the reproducibility contract: changing them changes every simulated output.
enum class StreamLabel : std::uint32_t {
    round = 1,
    device = 2,
    antenna = 3,
    trial = 4,
    channel = 5,
    noise = 6,
    csi_error = 7,
    minibatch = 8,
    task = 9,
    partition = 10,
    init = 11,
    sweep = 12,
    features = 13,
    targets = 14,
    spectrum = 15,
};

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// A stream is identified by a 64-bit key derived from the root seed and the
/// path of (label, index) pairs used to reach it. Draws are a pure function of
/// (key, counter), so any element of a sampled tensor can be regenerated from
/// its flat index without touching its neighbours. That is what makes
/// parallel sampling bit-identical to sequential sampling.
class RngStream {
public:
    static RngStream from_seed(std::uint64_t seed);

    [[nodiscard]] RngStream derive(StreamLabel label, std::uint64_t index) const;

    [[nodiscard]] std::uint64_t key() const { return key_; }

    [[nodiscard]] std::array<std::uint32_t, 4> block(std::uint64_t counter) const;

    /// Two uniforms in (0, 1] with 53-bit resolution.
    [[nodiscard]] std::array<double, 2> uniform_pair(std::uint64_t counter) const;

    /// Two independent N(0, 1) draws (Box-Muller on uniform_pair).
    [[nodiscard]] std::array<double, 2> normal_pair(std::uint64_t counter) const;

    /// CN(0, variance): real and imaginary parts are independent N(0, variance/2).
    [[nodiscard]] std::complex<double> complex_normal(std::uint64_t counter,
                                                      double variance) const;

    friend bool operator==(const RngStream&, const RngStream&) = default;

private:
    explicit RngStream(std::uint64_t key) : key_(key) {}

    std::uint64_t key_;
};

/// Sequential view over an RngStream for code that consumes draws one at a
/// time (mini-batch sampling, shuffles, dataset generation).
class RngEngine {
public:
    explicit RngEngine(RngStream stream) : stream_(stream) {}

    std::uint64_t next_u64();
    double uniform();  // (0, 1]
    double normal();
    std::complex<double> complex_normal(double variance);

    /// Unbiased integer in [0, bound); bound must be positive.
    std::uint64_t uniform_index(std::uint64_t bound);

    [[nodiscard]] std::uint64_t draws() const { return counter_; }

private:
    RngStream stream_;
    std::uint64_t counter_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// In-place Fisher-Yates shuffle driven by an RngEngine.
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, RngEngine& rng) {
    const auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
        const auto j = static_cast<decltype(i)>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
        using std::swap;
        swap(first[i], first[j]);
    }
}

}  // namespace airfeel
