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
#include <benchmark/benchmark.h>

#include <vector>

#include "airfeel/bounds.hpp"
#include "airfeel/channel.hpp"
#include "airfeel/learner.hpp"
#include "airfeel/packing.hpp"
#include "airfeel/transceiver.hpp"

using namespace airfeel;

namespace {

SimConfig radio(std::size_t K) {
    SimConfig c;
    c.devices = 20;
    c.antennas = K;
    c.dim = 50;
    c.subchannels = 25;
    c.sigma_z2 = 1.0;
    c.sigma_ht2 = 10.0;
    return c;
}

void BM_SampleChannel(benchmark::State& state) {
    const SimConfig c = radio(static_cast<std::size_t>(state.range(0)));
    const RngStream rng = RngStream::from_seed(1);
    for (auto _ : state) benchmark::DoNotOptimize(sample_channel(c, rng));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * c.devices * c.antennas * c.dim / 2));
}
BENCHMARK(BM_SampleChannel)->Arg(20)->Arg(800);

void BM_PropagateCombine(benchmark::State& state) {
    const SimConfig c = radio(static_cast<std::size_t>(state.range(0)));
    const RngStream root = RngStream::from_seed(2);
    const ChannelTensor h = sample_channel(c, root.derive(StreamLabel::channel, 0));
    const NoiseTensor z = sample_noise(c, root.derive(StreamLabel::noise, 0));
    const CsiTensor csi = sample_csi(h, c, root.derive(StreamLabel::csi_error, 0));
    std::vector<SymbolBlocks> tx;
    for (std::size_t m = 0; m < c.devices; ++m) tx.push_back(pack_update(ModelVector(c.dim, 0.01 * m), c.subchannels));
    for (auto _ : state) {
        const ComplexGrid y = combine(propagate(tx, h, z), csi, c.antennas);
        benchmark::DoNotOptimize(estimate_average_update(y, 1.0, c.devices, c.sigma_h2, c.dim));
    }
}
BENCHMARK(BM_PropagateCombine)->Arg(20)->Arg(800);

void BM_LocalSgd(benchmark::State& state) {
    TaskSpec s;
    s.dim = 50;
    s.samples_per_device = 400;
    const FederatedTask task = make_task(s, 2, RngStream::from_seed(3));
    const ModelVector theta(50);
    RngEngine rng(RngStream::from_seed(4));
    const auto batch = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(local_sgd(theta, task, 0, 3, 0.1, batch, rng));
}
BENCHMARK(BM_LocalSgd)->Arg(100)->Arg(400);

void BM_BoundTrace(benchmark::State& state) {
    BoundParams p;
    p.mu = 1.0;
    p.L = 5.0;
    p.Gamma = 1.0;
    p.tau = 5;
    p.M = 20;
    p.K = 800;
    p.d = 307498;
    p.sigma_z2 = 1.0;
    p.alpha = PowerSchedule::affine(1.0, 1e-3);
    p.eta = LearningRateSchedule::inverse_affine(0.2, 1e-4);
    p.init_gap = 1e3;
    const auto T = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bound_theorem1(p, T));
}
BENCHMARK(BM_BoundTrace)->Arg(400)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
