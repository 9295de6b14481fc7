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
#include "airfeel/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace airfeel {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

// Tag in the last counter word separates key derivation from value draws.
constexpr std::uint32_t kDeriveTag = 0x5EEDC0DEu;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::array<std::uint32_t, 2> split_key(std::uint64_t key) {
    return {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
}

inline double to_unit_interval(std::uint64_t bits) {
    // (bits >> 11) in [0, 2^53); shift by one so 0 is excluded and 1 included.
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

RngStream RngStream::from_seed(std::uint64_t seed) { return RngStream(splitmix64(seed)); }

RngStream RngStream::derive(StreamLabel label, std::uint64_t index) const {
    const auto out = philox4x32({static_cast<std::uint32_t>(index),
                                 static_cast<std::uint32_t>(index >> 32),
                                 static_cast<std::uint32_t>(label), kDeriveTag},
                                split_key(key_));
    return RngStream((static_cast<std::uint64_t>(out[1]) << 32) | out[0]);
}

std::array<std::uint32_t, 4> RngStream::block(std::uint64_t counter) const {
    return philox4x32({static_cast<std::uint32_t>(counter),
                       static_cast<std::uint32_t>(counter >> 32), 0u, 0u},
                      split_key(key_));
}

std::array<double, 2> RngStream::uniform_pair(std::uint64_t counter) const {
    const auto b = block(counter);
    const std::uint64_t a = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
    const std::uint64_t c = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
    return {to_unit_interval(a), to_unit_interval(c)};
}

std::array<double, 2> RngStream::normal_pair(std::uint64_t counter) const {
    const auto u = uniform_pair(counter);
    const double radius = std::sqrt(-2.0 * std::log(u[0]));
    const double angle = 2.0 * std::numbers::pi * u[1];
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::complex<double> RngStream::complex_normal(std::uint64_t counter, double variance) const {
    const auto n = normal_pair(counter);
    const double scale = std::sqrt(0.5 * variance);
    return {scale * n[0], scale * n[1]};
}

std::uint64_t RngEngine::next_u64() {
    const auto b = stream_.block(counter_++);
    return (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
}

double RngEngine::uniform() { return to_unit_interval(next_u64()); }

double RngEngine::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const auto pair = stream_.normal_pair(counter_++);
    spare_normal_ = pair[1];
    has_spare_ = true;
    return pair[0];
}

std::complex<double> RngEngine::complex_normal(double variance) {
    return stream_.complex_normal(counter_++, variance);
}

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

std::uint64_t RngEngine::uniform_index(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
    // Lemire's nearly-divisionless bounded integer with rejection.
    u128 m = static_cast<u128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<u128>(next_u64()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace airfeel
