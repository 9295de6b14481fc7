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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "airfeel/errors.hpp"
#include "airfeel/task.hpp"
#include "oracles.hpp"

using namespace airfeel;

namespace {

TaskSpec quad(std::size_t d = 6, std::size_t per = 30, std::size_t clusters = 1) {
    TaskSpec s;
    s.family = LossFamily::quadratic;
    s.dim = d;
    s.samples_per_device = per;
    s.clusters = clusters;
    return s;
}

Dataset dataset_with_clusters(std::size_t n, std::size_t clusters) {
    Dataset d;
    d.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
    d.targets = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        d.features(static_cast<Eigen::Index>(j), 0) = static_cast<double>(j);
        d.clusters.push_back(j % clusters);
    }
    return d;
}

}  // namespace

TEST(Task, FamilyNames) {
    EXPECT_EQ(parse_loss_family("logistic"), LossFamily::logistic);
    EXPECT_EQ(to_string(LossFamily::quadratic), "quadratic");
    EXPECT_THROW(parse_loss_family("hinge"), ConfigError);
}

TEST(Task, RequestedSpectrumIsMet) {
    TaskSpec s = quad(10, 40);
    s.mu = 1.0;
    s.L = 5.0;
    const FederatedTask t = make_task(s, 4, RngStream::from_seed(1));
    // Independent eigen-solve of the weighted-average Hessian.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(10, 10);
    for (std::size_t m = 0; m < 4; ++m) {
        const Dataset& d = t.shard(m);
        H += t.weight(m) * d.features.transpose() * d.features / static_cast<double>(d.size());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    EXPECT_NEAR(es.eigenvalues().minCoeff(), 1.0, 0.05);
    EXPECT_NEAR(es.eigenvalues().maxCoeff(), 5.0, 0.25);
    EXPECT_NEAR(t.constants().mu, 1.0, 1e-9);
    EXPECT_NEAR(t.constants().L, 5.0, 1e-9);
}

TEST(Task, JitteredSpectraKeepExtremes) {
    TaskSpec s = quad(8, 30);
    s.spectrum_jitter = 1.0;
    const FederatedTask t = make_task(s, 3, RngStream::from_seed(2));
    for (std::size_t m = 0; m < 3; ++m) {
        const Dataset& d = t.shard(m);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.features.transpose() * d.features /
                                                          static_cast<double>(d.size()));
        EXPECT_NEAR(es.eigenvalues().minCoeff(), s.mu, 1e-9);
        EXPECT_NEAR(es.eigenvalues().maxCoeff(), s.L, 1e-9);
    }
}

TEST(Task, InfeasibleSpecs) {
    TaskSpec s = quad();
    s.mu = 6.0;
    EXPECT_THROW(make_task(s, 2, RngStream::from_seed(1)), std::invalid_argument);
    s = quad();
    s.lambda = 2.0;
    EXPECT_THROW(make_task(s, 2, RngStream::from_seed(1)), std::invalid_argument);
    s = quad(10, 5);
    EXPECT_THROW(make_task(s, 2, RngStream::from_seed(1)), std::invalid_argument);
}

TEST(Task, IdenticalDevicesHaveZeroGamma) {
    const FederatedTask base = make_task(quad(), 1, RngStream::from_seed(3));
    const FederatedTask twins(LossFamily::quadratic, 0.0, {base.shard(0), base.shard(0), base.shard(0)});
    EXPECT_NEAR(twins.constants().gamma, 0.0, 1e-12);
}

TEST(Task, GammaMatchesDirectSolve) {
    TaskSpec s = quad(4, 20, 2);
    s.partition = PartitionMode::non_iid;
    s.cluster_spread = 3.0;
    const FederatedTask t = make_task(s, 2, RngStream::from_seed(4));
    // Direct oracle: stack the normal equations of both devices.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(4, 4);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
    double fstar_avg = 0.0;
    for (std::size_t m = 0; m < 2; ++m) {
        const Dataset& d = t.shard(m);
        const double n = static_cast<double>(d.size());
        const Eigen::MatrixXd Hm = d.features.transpose() * d.features / n;
        const Eigen::VectorXd bm = d.features.transpose() * d.targets / n;
        const Eigen::VectorXd thm = Hm.colPivHouseholderQr().solve(bm);
        fstar_avg += 0.5 * t.weight(m) * (d.features * thm - d.targets).squaredNorm() / n;
        H += t.weight(m) * Hm;
        b += t.weight(m) * bm;
    }
    const Eigen::VectorXd th = H.colPivHouseholderQr().solve(b);
    double fstar = 0.0;
    for (std::size_t m = 0; m < 2; ++m) {
        const Dataset& d = t.shard(m);
        fstar += 0.5 * t.weight(m) * (d.features * th - d.targets).squaredNorm() / static_cast<double>(d.size());
    }
    EXPECT_GT(t.constants().gamma, 0.1);
    EXPECT_NEAR(t.constants().gamma, fstar - fstar_avg, 1e-9 * fstar);
    EXPECT_NEAR(t.constants().f_star, fstar, 1e-9 * fstar);
}

TEST(Task, GradientZeroAtOptimum) {
    const FederatedTask t = make_task(quad(8, 30, 2), 4, RngStream::from_seed(5));
    EXPECT_LT(std::sqrt(squared_norm(loss_and_grad(t, t.constants().theta_star).grad)), 1e-10);
    for (std::size_t m = 0; m < 4; ++m)
        EXPECT_LT(std::sqrt(squared_norm(loss_and_grad(t, t.constants().device_theta_star[m], m).grad)), 1e-10);
}

TEST(Task, EqualShardsGlobalLossIsMean) {
    const FederatedTask t = make_task(quad(5, 20), 4, RngStream::from_seed(6));
    ASSERT_TRUE(t.equal_shards());
    ModelVector th{0.3, -1.0, 2.0, 0.5, 0.0};
    double mean = 0.0;
    for (std::size_t m = 0; m < 4; ++m) mean += loss(t, th, m) / 4.0;
    EXPECT_NEAR(loss(t, th), mean, 1e-12 * mean);
}

TEST(Task, QuadraticGradientMatchesLoopOracle) {
    TaskSpec s = quad(6, 25);
    s.lambda = 0.3;
    const FederatedTask t = make_task(s, 2, RngStream::from_seed(7));
    const std::vector<double> th = {1, -2, 0.5, 0, 3, -1};
    const auto ref = oracle::quadratic_gradient_loops(t.shard(1).features, t.shard(1).targets, 0.3, th);
    const auto got = loss_and_grad(t, ModelVector(th), 1).grad;
    EXPECT_LT(oracle::relative_error(got.values(), ref), 1e-12);
}

TEST(Task, FiniteDifferenceGradients) {
    for (LossFamily f : {LossFamily::quadratic, LossFamily::logistic}) {
        TaskSpec s = quad(5, 20, 2);
        s.family = f;
        s.lambda = 0.1;
        const FederatedTask t = make_task(s, 2, RngStream::from_seed(8));
        RngEngine r(RngStream::from_seed(9));
        for (int probe = 0; probe < 20; ++probe) {
            std::vector<double> th(5);
            for (auto& v : th) v = r.normal();
            const auto fd = oracle::central_difference([&](const std::vector<double>& x) { return loss(t, ModelVector(x)); },
                                                        th, 1e-5);
            EXPECT_LT(oracle::relative_error(loss_and_grad(t, ModelVector(th)).grad.values(), fd), 1e-6);
        }
    }
}

TEST(Task, StrongConvexitySmoothnessSandwich) {
    const FederatedTask t = make_task(quad(6, 30, 2), 2, RngStream::from_seed(10));
    const double mu = t.constants().mu, L = t.constants().L;
    RngEngine r(RngStream::from_seed(11));
    for (int pair = 0; pair < 1000; ++pair) {
        ModelVector v(6), w(6);
        for (std::size_t j = 0; j < 6; ++j) {
            v[j] = 3 * r.normal();
            w[j] = 3 * r.normal();
        }
        for (std::size_t m = 0; m < 2; ++m) {
            const LossGrad lw = loss_and_grad(t, w, m);
            ModelVector diff(6);
            for (std::size_t j = 0; j < 6; ++j) diff[j] = v[j] - w[j];
            const double gap = loss(t, v, m) - lw.loss - dot(diff, lw.grad);
            const double n2 = squared_norm(diff);
            EXPECT_GE(gap, 0.5 * mu * n2 * (1 - 1e-9));
            EXPECT_LE(gap, 0.5 * L * n2 * (1 + 1e-9));
        }
    }
}

TEST(Task, LogisticConstants) {
    TaskSpec s = quad(4, 40, 2);
    s.family = LossFamily::logistic;
    s.lambda = 0.05;
    s.test_samples = 200;
    const FederatedTask t = make_task(s, 2, RngStream::from_seed(12));
    EXPECT_DOUBLE_EQ(t.constants().mu, 0.05);
    EXPECT_GT(t.constants().L, 0.05);
    EXPECT_GE(t.constants().gamma, 0.0);
    EXPECT_LT(std::sqrt(squared_norm(loss_and_grad(t, t.constants().theta_star).grad)), 1e-9);
    ASSERT_TRUE(t.test_set().has_value());
    EXPECT_GT(accuracy(t.constants().theta_star, *t.test_set()), 0.6);
    for (std::size_t m = 0; m < 2; ++m)
        for (Eigen::Index j = 0; j < t.shard(m).targets.size(); ++j)
            EXPECT_TRUE(t.shard(m).targets[j] == 1.0 || t.shard(m).targets[j] == -1.0);
}

TEST(Partition, IidEqualDisjointCover) {
    const Dataset d = dataset_with_clusters(100, 1);
    const auto shards = partition(d, 4, PartitionMode::iid, RngStream::from_seed(1));
    ASSERT_EQ(shards.size(), 4u);
    std::set<double> seen;
    for (const auto& s : shards) {
        EXPECT_EQ(s.size(), 25u);
        for (Eigen::Index j = 0; j < s.features.rows(); ++j) seen.insert(s.features(j, 0));
    }
    EXPECT_EQ(seen.size(), 100u);
}

TEST(Partition, NonIidOneClusterPerDevice) {
    const Dataset d = dataset_with_clusters(40, 2);
    const auto shards = partition(d, 2, PartitionMode::non_iid, RngStream::from_seed(1));
    for (std::size_t m = 0; m < 2; ++m)
        for (std::size_t c : shards[m].clusters) EXPECT_EQ(c, m);
    const auto four = partition(d, 4, PartitionMode::non_iid, RngStream::from_seed(1));
    for (const auto& s : four) EXPECT_EQ(s.cluster_count(), 1u);
    try {
        partition(d, 3, PartitionMode::non_iid, RngStream::from_seed(1));
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("divisible"), std::string::npos);
    }
}

TEST(LoadDelimited, ParsesAndMapsLabels) {
    const auto path = std::filesystem::temp_directory_path() / "airfeel_load_test.csv";
    {
        std::ofstream f(path);
        f << "# x1,x2,label\n1.5,2,1\n\n-1,0.25,0\n3;4;1\n";
    }
    const Dataset d = load_delimited(path.string());
    EXPECT_EQ(d.size(), 3u);
    EXPECT_EQ(d.dim(), 2u);
    EXPECT_DOUBLE_EQ(d.features(1, 1), 0.25);
    EXPECT_DOUBLE_EQ(d.targets[1], -1.0);
    EXPECT_DOUBLE_EQ(d.targets[2], 1.0);
    EXPECT_EQ(d.cluster_count(), 2u);
    {
        std::ofstream f(path);
        f << "1,2,1\n1,x,0\n";
    }
    try {
        load_delimited(path.string());
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
    }
    std::filesystem::remove(path);
}
