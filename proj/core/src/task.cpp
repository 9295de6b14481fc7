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
#include "airfeel/task.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "airfeel/errors.hpp"

namespace airfeel {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// log(1 + exp(-m)) without overflow.
double softplus_neg(double margin) {
    return margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

// 1 / (1 + exp(m)) without overflow.
double sigmoid_neg(double margin) {
    if (margin >= 0) {
        const double e = std::exp(-margin);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(margin));
}

double sample_loss_sum(LossFamily family, const Dataset& data, const VectorXd& theta) {
    const VectorXd z = data.features * theta;
    double s = 0.0;
    if (family == LossFamily::quadratic) {
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            const double r = z[j] - data.targets[j];
            s += 0.5 * r * r;
        }
    } else {
        for (Eigen::Index j = 0; j < z.size(); ++j) s += softplus_neg(data.targets[j] * z[j]);
    }
    return s;
}

// Sum over samples of the data-term gradient (regularizer excluded).
VectorXd sample_grad_sum(LossFamily family, const Dataset& data, const VectorXd& theta) {
    const VectorXd z = data.features * theta;
    VectorXd coef(z.size());
    if (family == LossFamily::quadratic) {
        coef = z - data.targets;
    } else {
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            const double y = data.targets[j];
            coef[j] = -y * sigmoid_neg(y * z[j]);
        }
    }
    return data.features.transpose() * coef;
}

double device_loss(LossFamily family, double lambda, const Dataset& data, const VectorXd& theta) {
    return sample_loss_sum(family, data, theta) / static_cast<double>(data.size()) +
           0.5 * lambda * theta.squaredNorm();
}

VectorXd device_grad(LossFamily family, double lambda, const Dataset& data, const VectorXd& theta) {
    return sample_grad_sum(family, data, theta) / static_cast<double>(data.size()) + lambda * theta;
}

MatrixXd logistic_hessian(const Dataset& data, double lambda, const VectorXd& theta) {
    const VectorXd z = data.features * theta;
    VectorXd w(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        const double p = sigmoid_neg(-z[j]);
        w[j] = p * (1.0 - p);
    }
    MatrixXd h = data.features.transpose() * w.asDiagonal() * data.features;
    h /= static_cast<double>(data.size());
    h.diagonal().array() += lambda;
    return h;
}

// Damped Newton on a weighted sum of logistic device losses.
VectorXd logistic_minimizer(const std::vector<const Dataset*>& parts, const std::vector<double>& weights,
                            double lambda, std::size_t dim) {
    auto objective = [&](const VectorXd& th) {
        double f = 0.0;
        for (std::size_t p = 0; p < parts.size(); ++p)
            f += weights[p] * device_loss(LossFamily::logistic, lambda, *parts[p], th);
        return f;
    };
    VectorXd theta = VectorXd::Zero(static_cast<Eigen::Index>(dim));
    for (int iter = 0; iter < 200; ++iter) {
        VectorXd g = VectorXd::Zero(theta.size());
        MatrixXd h = MatrixXd::Zero(theta.size(), theta.size());
        for (std::size_t p = 0; p < parts.size(); ++p) {
            g += weights[p] * device_grad(LossFamily::logistic, lambda, *parts[p], theta);
            h += weights[p] * logistic_hessian(*parts[p], lambda, theta);
        }
        if (g.norm() < 1e-13) break;
        const VectorXd step = h.ldlt().solve(g);
        const double f0 = objective(theta);
        double t = 1.0;
        VectorXd next = theta - step;
        // Close to the optimum the decrease drops below round-off in f, so
        // the full Newton step is taken without a line search.
        const bool search = g.dot(step) > 1e-12 * (1.0 + std::abs(f0));
        while (search && objective(next) > f0 - 0.25 * t * g.dot(step) && t > 1e-12) {
            t *= 0.5;
            next = theta - t * step;
        }
        if ((next - theta).norm() < 1e-15 * (1.0 + theta.norm())) {
            theta = next;
            break;
        }
        theta = next;
    }
    return theta;
}

MatrixXd random_orthogonal(std::size_t d, RngEngine& rng) {
    MatrixXd g(d, d);
    for (Eigen::Index c = 0; c < g.cols(); ++c)
        for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = rng.normal();
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ();
    // Fix column signs so Q is a deterministic function of g.
    const MatrixXd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < q.cols(); ++c)
        if (rmat(c, c) < 0) q.col(c) *= -1.0;
    return q;
}

MatrixXd symmetric_power(const MatrixXd& a, double power) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
    VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = ev[i] <= 0.0 ? 0.0 : std::pow(ev[i], power);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

std::string to_string(LossFamily family) {
    return family == LossFamily::quadratic ? "quadratic" : "logistic";
}

LossFamily parse_loss_family(const std::string& text) {
    if (text == "quadratic") return LossFamily::quadratic;
    if (text == "logistic") return LossFamily::logistic;
    throw ConfigError("task.family must be \"quadratic\" or \"logistic\", got \"" + text + "\"");
}

std::size_t Dataset::cluster_count() const {
    return std::set<std::size_t>(clusters.begin(), clusters.end()).size();
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.targets.resize(static_cast<Eigen::Index>(rows.size()));
    out.clusters.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto src = static_cast<Eigen::Index>(rows[r]);
        out.features.row(static_cast<Eigen::Index>(r)) = features.row(src);
        out.targets[static_cast<Eigen::Index>(r)] = targets[src];
        out.clusters[r] = clusters[rows[r]];
    }
    return out;
}

FederatedTask::FederatedTask(LossFamily family, double lambda, std::vector<Dataset> shards,
                             std::optional<Dataset> test_set)
    : family_(family), lambda_(lambda), shards_(std::move(shards)), test_set_(std::move(test_set)) {
    if (shards_.empty()) throw std::invalid_argument("FederatedTask: no devices");
    if (!(lambda_ >= 0.0)) throw std::invalid_argument("FederatedTask: lambda must be non-negative");
    dim_ = shards_.front().dim();
    for (const auto& s : shards_) {
        if (s.size() == 0) throw std::invalid_argument("FederatedTask: empty shard");
        if (s.dim() != dim_) throw std::invalid_argument("FederatedTask: shard dimension mismatch");
        total_ += s.size();
    }
    if (family_ == LossFamily::logistic && !(lambda_ > 0.0))
        throw std::invalid_argument("FederatedTask: logistic tasks need lambda > 0 for strong convexity");
    solve_constants();
}

double FederatedTask::weight(std::size_t m) const {
    return static_cast<double>(shards_.at(m).size()) / static_cast<double>(total_);
}

bool FederatedTask::equal_shards() const {
    return std::all_of(shards_.begin(), shards_.end(),
                       [&](const Dataset& s) { return s.size() == shards_.front().size(); });
}

void FederatedTask::solve_constants() {
    const std::size_t M = shards_.size();
    const auto d = static_cast<Eigen::Index>(dim_);
    constants_.device_theta_star.resize(M);
    constants_.device_f_star.resize(M);
    constants_.mu = std::numeric_limits<double>::infinity();
    constants_.L = 0.0;

    if (family_ == LossFamily::quadratic) {
        std::vector<MatrixXd> hess(M);
        MatrixXd h_avg = MatrixXd::Zero(d, d);
        VectorXd b_avg = VectorXd::Zero(d);
        for (std::size_t m = 0; m < M; ++m) {
            const Dataset& s = shards_[m];
            const double inv_b = 1.0 / static_cast<double>(s.size());
            hess[m] = s.features.transpose() * s.features * inv_b;
            hess[m].diagonal().array() += lambda_;
            const VectorXd b = s.features.transpose() * s.targets * inv_b;
            const VectorXd th = hess[m].ldlt().solve(b);
            constants_.device_theta_star[m] = to_model(th);
            constants_.device_f_star[m] = device_loss(family_, lambda_, s, th);
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(hess[m], Eigen::EigenvaluesOnly);
            constants_.mu = std::min(constants_.mu, es.eigenvalues().minCoeff());
            constants_.L = std::max(constants_.L, es.eigenvalues().maxCoeff());
            h_avg += weight(m) * hess[m];
            b_avg += weight(m) * b;
        }
        const VectorXd th_star = h_avg.ldlt().solve(b_avg);
        constants_.theta_star = to_model(th_star);
        constants_.f_star = loss(*this, constants_.theta_star);
        // Gamma as a sum of non-negative quadratic forms; avoids cancellation.
        double gamma = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            const VectorXd e = th_star - as_eigen(constants_.device_theta_star[m]);
            gamma += weight(m) * 0.5 * e.dot(hess[m] * e);
        }
        constants_.gamma = gamma;
        return;
    }

    double max_gram = 0.0;
    std::vector<const Dataset*> parts;
    std::vector<double> weights;
    for (std::size_t m = 0; m < M; ++m) {
        const Dataset& s = shards_[m];
        const MatrixXd gram = s.features.transpose() * s.features / static_cast<double>(s.size());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram, Eigen::EigenvaluesOnly);
        max_gram = std::max(max_gram, es.eigenvalues().maxCoeff());
        const VectorXd th = logistic_minimizer({&s}, {1.0}, lambda_, dim_);
        constants_.device_theta_star[m] = to_model(th);
        constants_.device_f_star[m] = device_loss(family_, lambda_, s, th);
        parts.push_back(&s);
        weights.push_back(weight(m));
    }
    constants_.mu = lambda_;
    constants_.L = lambda_ + 0.25 * max_gram;
    const VectorXd th_star = logistic_minimizer(parts, weights, lambda_, dim_);
    constants_.theta_star = to_model(th_star);
    constants_.f_star = loss(*this, constants_.theta_star);
    double gamma = 0.0;
    for (std::size_t m = 0; m < M; ++m)
        gamma += weight(m) * std::max(0.0, device_loss(family_, lambda_, shards_[m], th_star) -
                                               constants_.device_f_star[m]);
    constants_.gamma = gamma;
}

std::vector<Dataset> partition(const Dataset& data, std::size_t devices, PartitionMode mode,
                               const RngStream& rng) {
    if (devices == 0) throw std::invalid_argument("partition: M must be positive");
    if (data.size() < devices)
        throw std::invalid_argument("partition: fewer samples than devices");
    std::vector<Dataset> shards;
    shards.reserve(devices);

    if (mode == PartitionMode::iid) {
        std::vector<std::size_t> order(data.size());
        std::iota(order.begin(), order.end(), 0);
        RngEngine eng(rng);
        shuffle(order.begin(), order.end(), eng);
        const std::size_t base = data.size() / devices, extra = data.size() % devices;
        std::size_t pos = 0;
        for (std::size_t m = 0; m < devices; ++m) {
            const std::size_t len = base + (m < extra ? 1 : 0);
            shards.push_back(data.subset(std::span(order).subspan(pos, len)));
            pos += len;
        }
        return shards;
    }

    std::map<std::size_t, std::vector<std::size_t>> by_cluster;
    for (std::size_t j = 0; j < data.size(); ++j) by_cluster[data.clusters[j]].push_back(j);
    const std::size_t c = by_cluster.size();
    if (devices % c != 0)
        throw std::invalid_argument("partition: non_iid needs M divisible by the number of clusters (M=" +
                                    std::to_string(devices) + ", clusters=" + std::to_string(c) + ")");
    const std::size_t per_cluster = devices / c;
    for (auto& [label, rows] : by_cluster) {
        if (rows.size() < per_cluster)
            throw std::invalid_argument("partition: cluster " + std::to_string(label) +
                                        " has fewer samples than its device group");
        const std::size_t base = rows.size() / per_cluster, extra = rows.size() % per_cluster;
        std::size_t pos = 0;
        for (std::size_t g = 0; g < per_cluster; ++g) {
            const std::size_t len = base + (g < extra ? 1 : 0);
            shards.push_back(data.subset(std::span(rows).subspan(pos, len)));
            pos += len;
        }
    }
    return shards;
}

FederatedTask make_task(const TaskSpec& spec, std::size_t devices, const RngStream& rng) {
    if (devices == 0) throw std::invalid_argument("make_task: M must be positive");
    if (spec.dim == 0) throw std::invalid_argument("make_task: d must be positive");
    if (spec.clusters == 0) throw std::invalid_argument("make_task: at least one cluster required");
    if (spec.samples_per_device == 0) throw std::invalid_argument("make_task: empty shards");
    const auto d = static_cast<Eigen::Index>(spec.dim);

    if (spec.family == LossFamily::quadratic) {
        if (!(spec.mu > 0.0) || spec.mu > spec.L)
            throw std::invalid_argument("make_task: infeasible spectrum, need 0 < mu <= L");
        if (spec.lambda < 0.0 || spec.lambda > spec.mu)
            throw std::invalid_argument("make_task: need 0 <= lambda <= mu");
        if (!(spec.spectrum_jitter >= 0.0 && spec.spectrum_jitter <= 1.0))
            throw std::invalid_argument("make_task: spectrum_jitter must lie in [0, 1]");
        if (spec.samples_per_device < spec.dim)
            throw std::invalid_argument("make_task: quadratic shards need at least d samples");
    }

    RngEngine params(rng.derive(StreamLabel::task, 0));
    std::vector<VectorXd> centers(spec.clusters);
    VectorXd common(d);
    for (Eigen::Index j = 0; j < d; ++j) common[j] = params.normal();
    for (auto& c : centers) {
        c.resize(d);
        for (Eigen::Index j = 0; j < d; ++j) c[j] = common[j] + spec.cluster_spread * params.normal();
    }

    auto draw_pool = [&](std::size_t rows, StreamLabel label) {
        Dataset pool;
        pool.features.resize(static_cast<Eigen::Index>(rows), d);
        pool.targets.setZero(static_cast<Eigen::Index>(rows));
        pool.clusters.resize(rows);
        RngEngine feat(rng.derive(label, 0));
        for (std::size_t r = 0; r < rows; ++r) {
            pool.clusters[r] = r % spec.clusters;
            for (Eigen::Index j = 0; j < d; ++j) pool.features(static_cast<Eigen::Index>(r), j) = feat.normal();
        }
        return pool;
    };

    Dataset pool = draw_pool(devices * spec.samples_per_device, StreamLabel::features);
    std::vector<Dataset> shards =
        partition(pool, devices, spec.partition, rng.derive(StreamLabel::partition, 0));

    if (spec.family == LossFamily::quadratic) {
        RngEngine spec_rng(rng.derive(StreamLabel::spectrum, 0));
        const MatrixXd q = random_orthogonal(spec.dim, spec_rng);
        for (std::size_t m = 0; m < shards.size(); ++m) {
            RngEngine jitter(rng.derive(StreamLabel::spectrum, m + 1));
            VectorXd ev(d);
            for (Eigen::Index j = 0; j < d; ++j) {
                const double frac = d == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(d - 1);
                const double u = (j == 0 || j == d - 1) ? frac : jitter.uniform();
                const double mix = (1.0 - spec.spectrum_jitter) * frac + spec.spectrum_jitter * u;
                ev[j] = spec.mu + mix * (spec.L - spec.mu) - spec.lambda;
            }
            const MatrixXd target_sqrt = q * ev.cwiseSqrt().asDiagonal() * q.transpose();
            Dataset& s = shards[m];
            const MatrixXd cov = s.features.transpose() * s.features / static_cast<double>(s.size());
            s.features = s.features * (symmetric_power(cov, -0.5) * target_sqrt);
        }
    }

    auto assign_targets = [&](Dataset& s, RngEngine& noise) {
        for (Eigen::Index r = 0; r < s.features.rows(); ++r) {
            const double clean = s.features.row(r).dot(centers[s.clusters[static_cast<std::size_t>(r)]]);
            const double value = clean + spec.label_noise * noise.normal();
            s.targets[r] = spec.family == LossFamily::quadratic ? value : (value >= 0.0 ? 1.0 : -1.0);
        }
    };
    for (std::size_t m = 0; m < shards.size(); ++m) {
        RngEngine noise(rng.derive(StreamLabel::targets, m));
        assign_targets(shards[m], noise);
    }

    std::optional<Dataset> test;
    if (spec.family == LossFamily::logistic && spec.test_samples > 0) {
        Dataset t = draw_pool(spec.test_samples, StreamLabel::init);
        RngEngine noise(rng.derive(StreamLabel::targets, devices));
        assign_targets(t, noise);
        test = std::move(t);
    }
    return FederatedTask(spec.family, spec.lambda, std::move(shards), std::move(test));
}

Dataset load_delimited(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0, width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        for (char& ch : line)
            if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
        std::vector<double> values;
        std::istringstream fields(line);
        std::string tok;
        while (fields >> tok) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
                throw ConfigError(path + ":" + std::to_string(line_no) + ": not a finite number: '" + tok + "'");
            values.push_back(v);
        }
        if (values.size() < 2)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": need at least one feature and a label");
        if (width == 0) width = values.size();
        if (values.size() != width)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                              " columns, found " + std::to_string(values.size()));
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw ConfigError("dataset file '" + path + "' has no samples");

    std::set<double> labels;
    for (const auto& r : rows) labels.insert(r.back());
    const bool zero_one = std::all_of(labels.begin(), labels.end(), [](double v) { return v == 0.0 || v == 1.0; });
    std::map<double, std::size_t> label_index;
    for (double v : labels) label_index.emplace(v, label_index.size());

    Dataset out;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(width - 1);
    out.features.resize(n, d);
    out.targets.resize(n);
    out.clusters.resize(rows.size());
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& src = rows[static_cast<std::size_t>(r)];
        for (Eigen::Index j = 0; j < d; ++j) out.features(r, j) = src[static_cast<std::size_t>(j)];
        const double label = src.back();
        out.targets[r] = zero_one ? 2.0 * label - 1.0 : label;
        out.clusters[static_cast<std::size_t>(r)] = label_index.at(label);
    }
    return out;
}

LossGrad loss_and_grad(const FederatedTask& task, const ModelVector& theta, std::optional<std::size_t> device) {
    if (theta.size() != task.dim())
        throw std::invalid_argument("loss_and_grad: theta has length " + std::to_string(theta.size()) +
                                    ", task dimension is " + std::to_string(task.dim()));
    const VectorXd th = as_eigen(theta);
    if (device) {
        const Dataset& s = task.shard(*device);
        return {device_loss(task.family(), task.lambda(), s, th),
                to_model(device_grad(task.family(), task.lambda(), s, th))};
    }
    double f = 0.0;
    VectorXd g = VectorXd::Zero(th.size());
    for (std::size_t m = 0; m < task.devices(); ++m) {
        const Dataset& s = task.shard(m);
        f += task.weight(m) * device_loss(task.family(), task.lambda(), s, th);
        g += task.weight(m) * device_grad(task.family(), task.lambda(), s, th);
    }
    return {f, to_model(g)};
}

double loss(const FederatedTask& task, const ModelVector& theta, std::optional<std::size_t> device) {
    if (theta.size() != task.dim()) throw std::invalid_argument("loss: theta length mismatch");
    const VectorXd th = as_eigen(theta);
    if (device) return device_loss(task.family(), task.lambda(), task.shard(*device), th);
    double f = 0.0;
    for (std::size_t m = 0; m < task.devices(); ++m)
        f += task.weight(m) * device_loss(task.family(), task.lambda(), task.shard(m), th);
    return f;
}

void batch_gradient(const FederatedTask& task, std::size_t device, const VectorXd& theta,
                    std::span<const std::size_t> rows, VectorXd& grad) {
    const Dataset& s = task.shard(device);
    grad.setZero(theta.size());
    for (std::size_t r : rows) {
        const auto row = s.features.row(static_cast<Eigen::Index>(r));
        const double z = row.dot(theta);
        const double y = s.targets[static_cast<Eigen::Index>(r)];
        const double coef = task.family() == LossFamily::quadratic ? z - y : -y * sigmoid_neg(y * z);
        grad.noalias() += coef * row.transpose();
    }
    grad /= static_cast<double>(rows.size());
    grad += task.lambda() * theta;
}

double accuracy(const ModelVector& theta, const Dataset& data) {
    if (data.size() == 0) return 0.0;
    const VectorXd z = data.features * as_eigen(theta);
    std::size_t correct = 0;
    for (Eigen::Index j = 0; j < z.size(); ++j)
        if ((z[j] >= 0.0 ? 1.0 : -1.0) == data.targets[j]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace airfeel
