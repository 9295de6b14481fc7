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

#include "airfeel/verify.hpp"

using namespace airfeel;

namespace {

SimConfig reference(double sigma_z2 = 1.0, double sigma_ht2 = 1.0) {
    SimConfig c;
    c.devices = 2;
    c.antennas = 4;
    c.dim = 2;
    c.subchannels = 1;
    c.sigma_h2 = 1.0;
    c.sigma_z2 = sigma_z2;
    c.sigma_ht2 = sigma_ht2;
    c.seed = 11;
    return c;
}

const std::vector<ModelVector> kUnitUpdates = {{1.0, 0.0}, {0.0, 1.0}};

const VerificationEntry& find(const VerificationReport& r, const std::string& name) {
    for (const auto& e : r.entries)
        if (e.name == name) return e;
    throw std::runtime_error("no entry " + name);
}

}  // namespace

TEST(ClosedForms, ReferenceValues) {
    const auto f = term_moment_closed_forms(reference(), kUnitUpdates, 1.0);
    // Hand evaluation: sum |dtheta_m|^2 = 2, K = 4, M = 2, d = 2.
    const std::array<double, 5> expect = {2.0 / (4 * 4), 1.0 * 2.0 / (4 * 4), 2.0 / (2 * 4 * 2), 2.0 / (4 * 4),
                                          2.0 / (2 * 4 * 4)};
    for (std::size_t l = 0; l < 5; ++l) EXPECT_DOUBLE_EQ(f[l], expect[l]) << l;
    EXPECT_DOUBLE_EQ(f[0], 0.125);
    EXPECT_DOUBLE_EQ(f[4], 0.0625);
    // (1 + 1/2) (2/8 + 2/16)
    EXPECT_DOUBLE_EQ(total_mse_closed_form(reference(), kUnitUpdates, 1.0), 1.5 * (0.25 + 0.125));
}

TEST(McVerify, MomentsPassAtModerateTrials) {
    const auto rep = mc_verify_term_moments(reference(), kUnitUpdates, 200'000, 1.0);
    ASSERT_EQ(rep.entries.size(), 6u);
    for (const auto& e : rep.entries) {
        EXPECT_FALSE(e.insufficient_trials);
        EXPECT_LT(std::abs(e.estimate - e.closed_form), 0.03 * e.closed_form) << e.name;
    }
}

TEST(McVerify, UnbiasedUnderLargeCsiError) {
    const auto rep = mc_verify_unbiased(reference(1.0, 2.0), kUnitUpdates, 50'000, 1.0);
    ASSERT_EQ(rep.entries.size(), 2u);
    EXPECT_TRUE(rep.all_pass());
    EXPECT_DOUBLE_EQ(rep.entries[0].closed_form, 0.5);
}

TEST(McVerify, ZeroUpdatesGiveExactZeroSignal) {
    const std::vector<ModelVector> zeros = {{0.0, 0.0}, {0.0, 0.0}};
    const auto rep = mc_verify_term_moments(reference(0.0, 0.0), zeros, 100'000, 1.0);
    for (const auto& e : rep.entries) {
        EXPECT_EQ(e.criterion, VerificationEntry::Criterion::exact_zero) << e.name;
        EXPECT_EQ(e.estimate, 0.0);
        EXPECT_TRUE(e.pass);
    }
    const auto mean = mc_verify_unbiased(reference(0.0, 0.0), zeros, 10'000, 1.0);
    for (const auto& e : mean.entries) EXPECT_EQ(e.estimate, 0.0);
}

TEST(McVerify, PerfectCsiTermsAreExactZeroChecks) {
    const auto rep = mc_verify_term_moments(reference(1.0, 0.0), kUnitUpdates, 100'000, 1.0);
    for (const char* name : {"csi_error_interference", "csi_error_noise"}) {
        const auto& e = find(rep, name);
        EXPECT_EQ(e.criterion, VerificationEntry::Criterion::exact_zero);
        EXPECT_TRUE(e.pass);
    }
}

TEST(McVerify, TooFewTrialsFlaggedNotFailed) {
    const auto rep = mc_verify_term_moments(reference(), kUnitUpdates, 1'000, 1.0);
    for (const auto& e : rep.entries) EXPECT_TRUE(e.insufficient_trials) << e.name;
    EXPECT_TRUE(rep.all_pass());
}

TEST(McVerify, IndependentOfWorkerCount) {
    const auto a = mc_verify_term_moments(reference(), kUnitUpdates, 20'000, 1.0, 1);
    const auto b = mc_verify_term_moments(reference(), kUnitUpdates, 20'000, 1.0, 4);
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        EXPECT_EQ(a.entries[i].estimate, b.entries[i].estimate);
        EXPECT_EQ(a.entries[i].std_error, b.entries[i].std_error);
    }
}

TEST(McVerify, InterferenceGainMoments) {
    const auto rep = mc_verify_interference(reference(), 200'000);
    for (const auto& e : rep.entries) EXPECT_TRUE(e.pass) << e.name << " " << e.estimate << " vs " << e.closed_form;
}

TEST(Report, AllPassAndAppend) {
    VerificationReport r;
    EXPECT_TRUE(r.all_pass());
    VerificationEntry ok;
    ok.pass = true;
    VerificationEntry bad;
    r.entries.push_back(ok);
    VerificationReport other;
    other.entries.push_back(bad);
    r.append(other);
    EXPECT_EQ(r.entries.size(), 2u);
    EXPECT_FALSE(r.all_pass());
    r.entries[1].insufficient_trials = true;
    EXPECT_TRUE(r.all_pass());
}
