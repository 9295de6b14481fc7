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

#include "airfeel/bounds.hpp"
#include "airfeel/rng.hpp"
#include "oracles.hpp"

using namespace airfeel;

namespace {

BoundParams wide_model(std::size_t K, double sigma_ht2) {
    BoundParams p;
    p.mu = 1.0;
    p.L = 5.0;
    p.G2 = 1.0;
    p.Gamma = 1.0;
    p.tau = 5;
    p.M = 20;
    p.K = K;
    p.d = 307498;
    p.sigma_h2 = 1.0;
    p.sigma_z2 = 1.0;
    p.sigma_ht2 = sigma_ht2;
    p.alpha = PowerSchedule::affine(1.0, 1e-3);
    p.eta = LearningRateSchedule::inverse_affine(1.0 / 5.0, 1e-4);
    p.init_gap = 1e3;
    return p;
}

BoundParams unit_case() {
    BoundParams p;
    p.mu = 1.0;
    p.L = 5.0;
    p.G2 = 1.0;
    p.tau = 1;
    p.M = 1;
    p.K = 1;
    p.eta = LearningRateSchedule::constant(1.0);
    p.init_gap = 7.0;
    return p;
}

}  // namespace

TEST(CoeffA, Examples) {
    EXPECT_DOUBLE_EQ(coeff_A(1.0, 1.0, 1), 0.0);
    // 1 - (1/5)(5 - 4/5) = 1 - 21/25
    EXPECT_NEAR(coeff_A(0.2, 1.0, 5), 4.0 / 25.0, 1e-15);
    EXPECT_LT(coeff_A(1e-12, 1.0, 3), 1.0);
    EXPECT_GT(coeff_A(1e-12, 1.0, 3), 1.0 - 1e-11);
    EXPECT_THROW(coeff_A(0.0, 1.0, 1), std::invalid_argument);
    EXPECT_THROW(coeff_A(0.25, 1.0, 5), std::invalid_argument);
    EXPECT_THROW(coeff_A(1.5, 0.1, 1), std::invalid_argument);
}

TEST(CoeffA, InUnitIntervalUnderPrecondition) {
    RngEngine r(RngStream::from_seed(3));
    for (int n = 0; n < 1000; ++n) {
        const double mu = 0.1 + 3 * r.uniform();
        const std::size_t tau = 1 + r.uniform_index(8);
        const double cap = std::min(1.0, 1.0 / (mu * static_cast<double>(tau)));
        const double a = coeff_A(cap * r.uniform(), mu, tau);
        EXPECT_GE(a, 0.0);
        EXPECT_LT(a, 1.0);
    }
}

TEST(CoeffB, HandEvaluatedExample) {
    EXPECT_DOUBLE_EQ(coeff_B(unit_case(), 0), 2.0);
}

TEST(CoeffB, DoublingKHalvesChannelTerms) {
    BoundParams p = wide_model(40, 10.0);
    const double ef = coeff_B_error_free(p, 7);
    const double ch = coeff_B(p, 7) - ef;
    p.K = 80;
    EXPECT_DOUBLE_EQ(coeff_B_error_free(p, 7), ef);
    EXPECT_NEAR(coeff_B(p, 7) - ef, ch / 2.0, 1e-12 * ch);
}

TEST(CoeffB, ErrorFreeDifferenceIsDefinitional) {
    const BoundParams p = wide_model(20, 10.0);
    const std::size_t i = 123;
    const double eta = 1.0 / (5.0 * (1e-4 * 123 + 1.0));
    const double alpha = 1.0 + 1e-3 * 123;
    const double r = 1.0 + 10.0 / 20.0;
    const double expect = r * (eta * eta * 25.0 / 20.0 + 307498.0 / (2.0 * alpha * alpha * 20.0 * 20.0));
    EXPECT_NEAR(coeff_B(p, i) - coeff_B_error_free(p, i), expect, 1e-12 * expect);
}

TEST(BoundTheorem1, FixedPointWhenAIsZero) {
    const BoundTrace tr = bound_theorem1(unit_case(), 10);
    EXPECT_DOUBLE_EQ(tr.bound[0], 7.0);
    for (std::size_t t = 1; t <= 10; ++t) EXPECT_DOUBLE_EQ(tr.bound[t], 2.0);
    EXPECT_DOUBLE_EQ(bound_loss_gap(unit_case(), 10), 2.5 * 2.0);
}

TEST(BoundTheorem1, GeometricDecayWithoutB) {
    BoundParams p = unit_case();
    p.G2 = 0.0;
    p.eta = LearningRateSchedule::constant(0.5);
    const BoundTrace tr = bound_theorem1(p, 20);
    for (std::size_t t = 0; t <= 20; ++t) EXPECT_NEAR(tr.bound[t], 7.0 * std::pow(0.5, t), 1e-15);
}

TEST(BoundTheorem1, RecursionMatchesProductSum) {
    for (std::size_t K : {20u, 800u}) {
        const BoundParams p = wide_model(K, 10.0);
        const BoundTrace tr = bound_theorem1(p, 400);
        const double ref = oracle::product_sum_bound(tr.A, tr.B, p.init_gap, 400);
        EXPECT_NEAR(tr.bound[400], ref, 1e-9 * ref);
    }
}

TEST(BoundTheorem1, ZeroRoundsIsInitialGap) {
    const BoundTrace tr = bound_theorem1(wide_model(20, 0.0), 0);
    ASSERT_EQ(tr.bound.size(), 1u);
    EXPECT_DOUBLE_EQ(tr.bound[0], 1e3);
    EXPECT_DOUBLE_EQ(tr.loss_gap_bound, 2.5e3);
}

TEST(BoundTheorem1, RejectsLargeEtaNamingRound) {
    BoundParams p = wide_model(20, 0.0);
    p.eta = LearningRateSchedule::per_round({0.2, 0.2, 0.3, 0.2});
    try {
        bound_theorem1(p, 3);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("eta(2)"), std::string::npos);
    }
    p = wide_model(20, 0.0);
    p.sigma_z2 = -1.0;
    EXPECT_THROW(bound_theorem1(p, 3), std::invalid_argument);
}

TEST(BoundTheorem1, WideModelOrderings) {
    const std::size_t M = 20;
    const std::vector<std::size_t> Ks = {M, 2 * M, 5 * M, 10 * M, 2 * M * M};
    for (double sht : {0.0, 10.0}) {
        std::vector<BoundTrace> traces;
        for (std::size_t K : Ks) traces.push_back(bound_theorem1(wide_model(K, sht), 400));
        const BoundTrace ef = bound_error_free(wide_model(M, sht), 400);
        for (std::size_t t = 1; t <= 400; ++t) {
            for (std::size_t k = 1; k < Ks.size(); ++k) EXPECT_LT(traces[k].bound[t], traces[k - 1].bound[t]);
            EXPECT_LE(ef.bound[t], traces.back().bound[t]);
        }
        const double gap_hi = traces.back().loss_gap_bound - 2.5 * ef.bound[400];
        const double gap_lo = traces.front().loss_gap_bound - 2.5 * ef.bound[400];
        EXPECT_GT(gap_lo, 10.0 * gap_hi);
    }
    for (std::size_t K : Ks) {
        const BoundTrace perfect = bound_theorem1(wide_model(K, 0.0), 400);
        const BoundTrace noisy = bound_theorem1(wide_model(K, 10.0), 400);
        for (std::size_t t = 1; t <= 400; ++t) EXPECT_LT(perfect.bound[t], noisy.bound[t]);
    }
}

TEST(BoundErrorFree, LargeKApproachesErrorFree) {
    BoundParams p = wide_model(1'000'000, 10.0);
    p.sigma_z2 = 1e-3;
    const double ef = bound_error_free(p, 400).bound[400];
    const double k = bound_theorem1(p, 400).bound[400];
    EXPECT_GE(k, ef);
    EXPECT_LT((k - ef) / ef, 1e-3);
}

TEST(BoundSimplified, MatchesRecursionOnRandomDraws) {
    RngEngine r(RngStream::from_seed(17));
    for (int n = 0; n < 50; ++n) {
        BoundParams p;
        p.mu = 0.1 + r.uniform();
        p.L = p.mu * (1.0 + 9.0 * r.uniform());
        p.G2 = 5.0 * r.uniform();
        p.Gamma = r.uniform();
        p.M = 1 + r.uniform_index(50);
        p.K = 1 + r.uniform_index(1000);
        p.d = 1 + r.uniform_index(10000);
        p.sigma_h2 = 0.5 + r.uniform();
        p.sigma_z2 = r.uniform();
        p.sigma_ht2 = r.uniform() * static_cast<double>(p.M);
        p.alpha = PowerSchedule::constant(0.5 + 2.0 * r.uniform());
        p.eta = LearningRateSchedule::constant(std::min(1.0, 1.0 / p.mu) * r.uniform());
        p.init_gap = 100.0 * r.uniform();
        const std::size_t T = 1 + r.uniform_index(500);
        const double rec = bound_loss_gap(p, T);
        EXPECT_NEAR(bound_simplified(p, T), rec, 1e-9 * rec);
    }
}

TEST(BoundSimplified, LimitsAndPreconditions) {
    BoundParams p = unit_case();
    p.eta = LearningRateSchedule::constant(0.1);
    p.K = 1'000'000'000;
    const double floor = p.L / (2 * p.mu * 0.1) * 0.01 * p.G2;
    EXPECT_NEAR(bound_simplified(p, 100000), floor, 1e-6 * floor);
    p.tau = 2;
    EXPECT_THROW(bound_simplified(p, 5), std::invalid_argument);
    p.tau = 1;
    p.alpha = PowerSchedule::affine(1.0, 0.1);
    EXPECT_THROW(bound_simplified(p, 5), std::invalid_argument);
}
