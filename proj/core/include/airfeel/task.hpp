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

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airfeel/config.hpp"
#include "airfeel/model_vector.hpp"
#include "airfeel/rng.hpp"

namespace airfeel {

enum class LossFamily { quadratic, logistic };

std::string to_string(LossFamily family);
LossFamily parse_loss_family(const std::string& text);

/// Samples as rows. `clusters[j]` is the generating cluster (synthetic data)
/// or the class label (ingested data) of row j; non-iid partitioning groups by it.
struct Dataset {
    Eigen::MatrixXd features;
    Eigen::VectorXd targets;
    std::vector<std::size_t> clusters;

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
    [[nodiscard]] std::size_t cluster_count() const;

    /// Rows `rows` of this dataset, in the given order.
    [[nodiscard]] Dataset subset(std::span<const std::size_t> rows) const;
};

/// Parameters of a synthetic federated task.
struct TaskSpec {
    LossFamily family = LossFamily::quadratic;
    std::size_t dim = 10;
    std::size_t samples_per_device = 50;
    std::size_t clusters = 1;
    // Quadratic only: every device Hessian is shaped to eigenvalues spread
    // linearly over [mu, L] (lambda included).
    double mu = 1.0;
    double L = 5.0;
    // In [0, 1]. Interior eigenvalues of device m move from the linear grid
    // towards independent uniform draws on [mu, L]; the extremes stay at mu
    // and L, so heterogeneous curvature leaves both constants unchanged.
    double spectrum_jitter = 0.0;
    double lambda = 0.0;
    double label_noise = 0.1;
    double cluster_spread = 1.0;
    PartitionMode partition = PartitionMode::iid;
    // Logistic only: held-out samples drawn from the pooled distribution.
    std::size_t test_samples = 0;
};

/// Closed-form or numerically solved constants of a task.
struct TaskConstants {
    ModelVector theta_star;
    double f_star = 0.0;
    std::vector<ModelVector> device_theta_star;
    std::vector<double> device_f_star;
    double mu = 0.0;     // min over devices of the smallest Hessian eigenvalue (bound)
    double L = 0.0;      // max over devices of the largest Hessian eigenvalue (bound)
    double gamma = 0.0;  // F* - sum_m (B_m/B) F_m*
};

/// Per-device datasets plus a per-sample loss
///   quadratic: 1/2 (x.theta - y)^2 + lambda/2 |theta|^2
///   logistic:  log(1 + exp(-y x.theta)) + lambda/2 |theta|^2,  y in {-1, +1}
/// Device losses F_m average over the device's samples; the global loss
/// weights them by B_m / B.
class FederatedTask {
public:
    FederatedTask(LossFamily family, double lambda, std::vector<Dataset> shards,
                  std::optional<Dataset> test_set = std::nullopt);

    [[nodiscard]] LossFamily family() const { return family_; }
    [[nodiscard]] double lambda() const { return lambda_; }
    [[nodiscard]] std::size_t devices() const { return shards_.size(); }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] const Dataset& shard(std::size_t m) const { return shards_.at(m); }
    [[nodiscard]] std::size_t total_samples() const { return total_; }
    [[nodiscard]] double weight(std::size_t m) const;
    [[nodiscard]] bool equal_shards() const;
    [[nodiscard]] const TaskConstants& constants() const { return constants_; }
    [[nodiscard]] const std::optional<Dataset>& test_set() const { return test_set_; }

private:
    void solve_constants();

    LossFamily family_;
    double lambda_;
    std::vector<Dataset> shards_;
    std::optional<Dataset> test_set_;
    std::size_t dim_ = 0;
    std::size_t total_ = 0;
    TaskConstants constants_;
};

/// Builds a synthetic task: a pooled dataset of M * samples_per_device rows
/// spread evenly over the clusters, partitioned per spec.partition, then
/// (quadratic) each shard's features are linearly reshaped so its Hessian has
/// exactly the target spectrum before targets are drawn.
/// Throws std::invalid_argument when mu > L, lambda > mu, a shard has fewer
/// samples than d (quadratic), or the partition preconditions fail.
FederatedTask make_task(const TaskSpec& spec, std::size_t devices, const RngStream& rng);

/// Disjoint cover of `data` by M shards. iid: uniformly shuffled, split into
/// near-equal contiguous pieces. non_iid: every shard holds a single cluster;
/// requires M divisible by the cluster count.
std::vector<Dataset> partition(const Dataset& data, std::size_t devices, PartitionMode mode,
                               const RngStream& rng);

/// Delimited numeric text, one sample per row, last column = label. Labels
/// {0, 1} are mapped to {-1, +1}. Blank lines and lines starting with '#'
/// are skipped. Throws ConfigError with the offending line number.
Dataset load_delimited(const std::string& path);

struct LossGrad {
    double loss = 0.0;
    ModelVector grad;
};

/// Exact full-batch loss and gradient of F_m (device set) or of the global
/// objective sum_m (B_m/B) F_m.
LossGrad loss_and_grad(const FederatedTask& task, const ModelVector& theta,
                       std::optional<std::size_t> device = std::nullopt);

double loss(const FederatedTask& task, const ModelVector& theta,
            std::optional<std::size_t> device = std::nullopt);

/// Mini-batch average gradient of device m's loss over `rows` (with repeats).
void batch_gradient(const FederatedTask& task, std::size_t device, const Eigen::VectorXd& theta,
                    std::span<const std::size_t> rows, Eigen::VectorXd& grad);

/// Fraction of correctly signed predictions (logistic tasks).
double accuracy(const ModelVector& theta, const Dataset& data);

inline Eigen::Map<const Eigen::VectorXd> as_eigen(const ModelVector& v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

inline ModelVector to_model(const Eigen::VectorXd& v) {
    return ModelVector(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace airfeel
