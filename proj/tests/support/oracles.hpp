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

// Reference computations written independently of the library code paths
// they check: literal formulas, explicit loops, no shared helpers.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace airfeel::oracle {

/// E|theta(T) - theta*|^2 bound in product-sum form:
///   (prod_{i<T} A_i) init + sum_{j<T} B_j prod_{j<i<T} A_i,
/// every product recomputed from scratch.
inline double product_sum_bound(const std::vector<double>& A, const std::vector<double>& B, double init,
                                std::size_t T) {
    double head = init;
    for (std::size_t i = 0; i < T; ++i) head *= A[i];
    double tail = 0.0;
    for (std::size_t j = 0; j < T; ++j) {
        double prod = B[j];
        for (std::size_t i = j + 1; i < T; ++i) prod *= A[i];
        tail += prod;
    }
    return head + tail;
}

/// Full-batch gradient of (1/B) sum_j 1/2 (x_j.theta - y_j)^2 + lambda/2 |theta|^2
/// by explicit loops over samples and coordinates.
inline std::vector<double> quadratic_gradient_loops(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                                                    const std::vector<double>& theta) {
    const auto n = static_cast<std::size_t>(X.rows()), d = static_cast<std::size_t>(X.cols());
    std::vector<double> g(d, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double r = -y[static_cast<Eigen::Index>(j)];
        for (std::size_t c = 0; c < d; ++c) r += X(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) * theta[c];
        for (std::size_t c = 0; c < d; ++c) g[c] += r * X(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
    }
    for (std::size_t c = 0; c < d; ++c) g[c] = g[c] / static_cast<double>(n) + lambda * theta[c];
    return g;
}

/// tau steps of full-batch gradient descent on a quadratic device loss, written
/// with the dense Hessian H = X^T X / B + lambda I and b = X^T y / B:
///   theta_{l+1} = theta_l - eta (H theta_l - b);  returns theta_{tau+1} - theta_1.
inline Eigen::VectorXd unrolled_gd_delta(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                                         const Eigen::VectorXd& theta, double eta, std::size_t tau) {
    const double n = static_cast<double>(X.rows());
    Eigen::MatrixXd H = X.transpose() * X / n;
    H += lambda * Eigen::MatrixXd::Identity(X.cols(), X.cols());
    const Eigen::VectorXd b = X.transpose() * y / n;
    Eigen::VectorXd th = theta;
    for (std::size_t l = 0; l < tau; ++l) th = th - eta * (H * th - b);
    return th - theta;
}

/// Central differences with step h.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double keep = x[c];
        x[c] = keep + h;
        const double up = f(x);
        x[c] = keep - h;
        const double down = f(x);
        x[c] = keep;
        g[c] = (up - down) / (2.0 * h);
    }
    return g;
}

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        num += (a[c] - b[c]) * (a[c] - b[c]);
        den += b[c] * b[c];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace airfeel::oracle
