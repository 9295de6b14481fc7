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
#include <gtest/gtest.h>

#include <cmath>

#include "airfeel/channel.hpp"
#include "airfeel/transceiver.hpp"

using namespace airfeel;

namespace {

SimConfig shape(std::size_t M, std::size_t K, std::size_t d, std::size_t s) {
    SimConfig c;
    c.devices = M;
    c.antennas = K;
    c.dim = d;
    c.subchannels = s;
    return c;
}

SymbolBlocks single(cplx v) {
    SymbolBlocks b{ComplexGrid(1, 1), 2};
    b.grid.at(0, 0) = v;
    return b;
}

}  // namespace

TEST(Transmit, Scales) {
    EXPECT_EQ(transmit(single({1, 1}), 1.0).grid.at(0, 0), cplx(1, 1));
    EXPECT_EQ(transmit(single({1, 1}), 2.0).grid.at(0, 0), cplx(2, 2));
    EXPECT_NEAR(std::abs(transmit(single({1, 0}), 1.4).grid.at(0, 0) - cplx(1.4, 0)), 0.0, 1e-15);
    EXPECT_THROW(transmit(single({1, 0}), 0.0), std::invalid_argument);
}

TEST(PowerLedger, HandEvaluations) {
    PowerLedger l(1, 1);
    l.record(0, 1.0, single({2, 0}));
    EXPECT_DOUBLE_EQ(l.average_power(0), 4.0);
    l.record(0, 2.0, single({1, 0}));
    EXPECT_DOUBLE_EQ(l.average_power(0), 4.0);  // (4 + 4) / 2
    PowerLedger z = record_power(PowerLedger(1, 1), 0, 3.0, single({0, 0}));
    EXPECT_DOUBLE_EQ(z.average_power(0), 0.0);
    EXPECT_EQ(z.rounds(0), 1u);
}

TEST(PowerLedger, ViolationsAndMerge) {
    PowerLedger a(2, 1), b(2, 1);
    a.record(0, 1.0, single({3, 0}));
    a.record(1, 1.0, single({1, 0}));
    b.record(0, 1.0, single({1, 0}));
    b.record(1, 1.0, single({1, 0}));
    a.merge(b);
    EXPECT_DOUBLE_EQ(a.average_power(0), 5.0);
    EXPECT_DOUBLE_EQ(a.average_power(1), 1.0);
    EXPECT_EQ(a.violations(2.3), std::vector<std::size_t>{0});
    EXPECT_DOUBLE_EQ(a.max_average_power(), 5.0);
    EXPECT_DOUBLE_EQ(a.mean_average_power(), 3.0);
    EXPECT_THROW(a.record(2, 1.0, single({1, 0})), std::invalid_argument);
    EXPECT_THROW(a.merge(PowerLedger(3, 1)), std::invalid_argument);
}

TEST(Combine, HandEvaluations) {
    ReceivedTensor y{AntennaTensor(1, 1, 1)};
    CsiTensor csi{AntennaTensor(1, 1, 1), AntennaTensor(1, 1, 1)};
    y.samples.at(0, 0, 0) = cplx(2, 3);
    csi.estimates.at(0, 0, 0) = cplx(1, 0);
    EXPECT_EQ(combine(y, csi, 1).at(0, 0), cplx(2, 3));

    ReceivedTensor y2{AntennaTensor(2, 1, 1)};
    CsiTensor csi2{AntennaTensor(2, 1, 1), AntennaTensor(2, 1, 1)};
    y2.samples.at(0, 0, 0) = 1.0;
    y2.samples.at(1, 0, 0) = 1.0;
    csi2.estimates.at(0, 0, 0) = cplx(1, 0);
    csi2.estimates.at(1, 0, 0) = cplx(0, 1);
    EXPECT_EQ(combine(y2, csi2, 2).at(0, 0), cplx(0.5, -0.5));

    y2.samples.at(0, 0, 0) = y2.samples.at(1, 0, 0) = 0.0;
    EXPECT_EQ(combine(y2, csi2, 2).at(0, 0), cplx(0, 0));
    EXPECT_THROW(combine(y2, csi2, 3), std::invalid_argument);
}

TEST(Estimate, DeterministicChannelGivesSum) {
    SimConfig c = shape(2, 1, 2, 1);
    const ChannelTensor h = deterministic_channel(c, cplx(1.0, 0.0));
    const NoiseTensor z = sample_noise(c, RngStream::from_seed(1));
    const CsiTensor csi = sample_csi(h, c, RngStream::from_seed(2));
    std::vector<SymbolBlocks> tx = {pack_update(ModelVector{1, 0}, 1), pack_update(ModelVector{0, 1}, 1)};
    const ModelVector est = estimate_average_update(combine(propagate(tx, h, z), csi, 1), 1.0, 2, 1.0, 2);
    EXPECT_EQ(est, (ModelVector{1, 1}));
}

TEST(Estimate, LayoutAndErrors) {
    ComplexGrid g(2, 2);
    g.at(0, 0) = {1, 3};
    g.at(0, 1) = {2, 4};
    g.at(1, 0) = {5, 7};
    const ModelVector est = estimate_average_update(g, 1.0, 1, 1.0, 5);
    EXPECT_EQ(est, (ModelVector{1, 2, 3, 4, 5}));
    EXPECT_EQ(estimate_average_update(ComplexGrid(2, 2), 2.0, 3, 1.5, 5), ModelVector(5));
    EXPECT_THROW(estimate_average_update(g, 0.0, 1, 1.0, 5), std::invalid_argument);
    EXPECT_THROW(estimate_average_update(g, 1.0, 0, 1.0, 5), std::invalid_argument);
    EXPECT_THROW(estimate_average_update(g, 1.0, 1, 0.0, 5), std::invalid_argument);
    EXPECT_THROW(estimate_average_update(g, 1.0, 1, 1.0, 9), std::invalid_argument);
}

TEST(Decompose, SumMatchesDirectPath) {
    SimConfig c = shape(3, 2, 4, 2);
    c.sigma_z2 = 0.7;
    c.sigma_ht2 = 1.3;
    const RngStream r = RngStream::from_seed(42);
    const ChannelTensor h = sample_channel(c, r.derive(StreamLabel::channel, 0));
    const NoiseTensor z = sample_noise(c, r.derive(StreamLabel::noise, 0));
    const CsiTensor csi = sample_csi(h, c, r.derive(StreamLabel::csi_error, 0));
    std::vector<SymbolBlocks> blocks = {pack_update(ModelVector{1, -2, 0.5, 3}, 2),
                                        pack_update(ModelVector{0.1, 0.2, 0.3, 0.4}, 2),
                                        pack_update(ModelVector{-1, 1, -1, 1}, 2)};
    const double alpha = 1.7;
    std::vector<SymbolBlocks> tx;
    for (const auto& b : blocks) tx.push_back(transmit(b, alpha));
    const ComplexGrid direct = combine(propagate(tx, h, z), csi, 2);
    const TermDecomposition dec = decompose_received(blocks, h, csi, z, alpha, 3, 1.0);
    const ComplexGrid total = dec.combined_total();
    for (std::size_t e = 0; e < direct.data.size(); ++e)
        EXPECT_LE(std::abs(total.data[e] - direct.data[e]), 1e-10 * std::abs(direct.data[e]));
    const ModelVector est = estimate_average_update(direct, alpha, 3, 1.0, 4);
    const ModelVector sum = dec.estimate_total();
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(sum[j], est[j], 1e-10 * (std::abs(est[j]) + 1e-300));
}

TEST(Decompose, DegenerateTermsVanish) {
    SimConfig c = shape(1, 3, 4, 1);
    const ChannelTensor h = sample_channel(c, RngStream::from_seed(3));
    const NoiseTensor z = sample_noise(c, RngStream::from_seed(4));
    const CsiTensor csi = sample_csi(h, c, RngStream::from_seed(5));
    std::vector<SymbolBlocks> blocks = {pack_update(ModelVector{1, 2, 3, 4}, 1)};
    const TermDecomposition dec = decompose_received(blocks, h, csi, z, 1.0, 1, 1.0);
    for (std::size_t l = 1; l < TermDecomposition::kTerms; ++l)
        for (const auto& v : dec.terms[l].data) EXPECT_EQ(v, cplx(0.0)) << "term " << l;
}

TEST(Decompose, TermCrossCovariancesVanish) {
    SimConfig c = shape(2, 4, 2, 1);
    c.sigma_z2 = 1.0;
    c.sigma_ht2 = 1.0;
    const std::vector<SymbolBlocks> blocks = {pack_update(ModelVector{1, 0}, 1), pack_update(ModelVector{0, 1}, 1)};
    const RngStream root = RngStream::from_seed(77);
    const int trials = 100'000;
    const ModelVector avg{0.5, 0.5};
    double sum[5][5] = {}, mean[5] = {};
    for (int t = 0; t < trials; ++t) {
        const RngStream r = root.derive(StreamLabel::trial, static_cast<std::uint64_t>(t));
        const ChannelTensor h = sample_channel(c, r.derive(StreamLabel::channel, 0));
        const NoiseTensor z = sample_noise(c, r.derive(StreamLabel::noise, 0));
        const CsiTensor csi = sample_csi(h, c, r.derive(StreamLabel::csi_error, 0));
        const TermDecomposition dec = decompose_received(blocks, h, csi, z, 1.0, 2, 1.0);
        double x[5];
        x[0] = dec.estimates[0][0] - avg[0];
        for (int l = 1; l < 5; ++l) x[l] = dec.estimates[l][0];
        for (int a = 0; a < 5; ++a) {
            mean[a] += x[a];
            for (int b = 0; b < 5; ++b) sum[a][b] += x[a] * x[b];
        }
    }
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) {
            const double cov = sum[a][b] / trials - mean[a] * mean[b] / trials / trials;
            const double sd = std::sqrt(sum[a][a] / trials * sum[b][b] / trials / trials);
            EXPECT_LT(std::abs(cov), 4.0 * sd) << "terms " << a << "," << b;
        }
}

TEST(Gains, InterferenceAndCsiErrorGainByHand) {
    SimConfig c = shape(2, 2, 2, 1);
    ChannelTensor h = deterministic_channel(c, cplx(1.0, 0.0));
    h.at(1, 0, 0, 0) = cplx(0, 1);
    h.at(1, 1, 0, 0) = cplx(2, 0);
    // (1/2)[1 * conj(j) + 1 * conj(2)] = (2 - j) / 2
    EXPECT_EQ(interference_gain(h, 0, 0, 0), cplx(1.0, -0.5));
    CsiTensor csi{AntennaTensor(2, 1, 1), AntennaTensor(2, 1, 1)};
    csi.errors.at(0, 0, 0) = cplx(0, 1);
    csi.errors.at(1, 0, 0) = cplx(1, 0);
    // (1/2)[conj(j) * j + 1 * 2] = (1 + 2) / 2
    EXPECT_EQ(csi_error_gain(h, csi, 1, 0, 0), cplx(1.5, 0.0));
}
