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
#include "airfeel/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "airfeel/errors.hpp"

namespace airfeel {
namespace {

double eta_at(const BoundParams& p, std::size_t i) {
    try {
        return eval_eta(p.eta, static_cast<std::int64_t>(i));
    } catch (const ConfigError& e) {
        throw std::invalid_argument(e.what());
    }
}

double alpha_at(const BoundParams& p, std::size_t i) {
    try {
        return eval_alpha(p.alpha, static_cast<std::int64_t>(i));
    } catch (const ConfigError& e) {
        throw std::invalid_argument(e.what());
    }
}

double csi_factor(const BoundParams& p) {
    return 1.0 + p.sigma_ht2 / (static_cast<double>(p.M) * p.sigma_h2);
}

void check_scalars(const BoundParams& p) {
    auto fail = [](const std::string& what) { throw std::invalid_argument("bound: " + what); };
    if (!(p.mu > 0.0) || !std::isfinite(p.mu)) fail("mu must be positive");
    if (!(p.L >= p.mu) || !std::isfinite(p.L)) fail("L must be finite and at least mu");
    if (!(p.G2 >= 0.0) || !std::isfinite(p.G2)) fail("G2 must be non-negative");
    if (!(p.Gamma >= 0.0) || !std::isfinite(p.Gamma)) fail("Gamma must be non-negative");
    if (p.tau == 0 || p.M == 0 || p.K == 0 || p.d == 0) fail("tau, M, K and d must be positive");
    if (!(p.sigma_h2 > 0.0)) fail("sigma_h2 must be positive");
    if (!(p.sigma_z2 >= 0.0) || !(p.sigma_ht2 >= 0.0)) fail("variances must be non-negative");
    if (!(p.init_gap >= 0.0) || !std::isfinite(p.init_gap)) fail("init_gap must be non-negative");
}

void check_eta(double eta, double mu, std::size_t tau, std::size_t i) {
    const double cap = std::min(1.0, 1.0 / (mu * static_cast<double>(tau)));
    if (!(eta > 0.0) || eta > cap * (1.0 + 4e-16))
        throw std::invalid_argument("bound: eta(" + std::to_string(i) + ") = " + std::to_string(eta) +
                                    " violates 0 < eta <= min{1, 1/(mu tau)} = " + std::to_string(cap));
}

double local_terms(const BoundParams& p, double eta) {
    const double tau = static_cast<double>(p.tau);
    const double e2g = eta * eta * p.G2;
    return (1.0 + p.mu * (1.0 - eta)) * e2g * tau * (tau - 1.0) * (2.0 * tau - 1.0) / 6.0 +
           (tau * tau + tau - 1.0) * e2g + 2.0 * eta * (tau - 1.0) * p.Gamma;
}

double channel_terms(const BoundParams& p, double eta, double alpha) {
    const double tau = static_cast<double>(p.tau);
    const double K = static_cast<double>(p.K), M = static_cast<double>(p.M);
    return csi_factor(p) * (eta * eta * tau * tau * p.G2 / K +
                            p.sigma_z2 * static_cast<double>(p.d) / (2.0 * alpha * alpha * K * M * p.sigma_h2));
}

BoundTrace run(const BoundParams& p, std::size_t T, bool error_free) {
    check_bound_params(p, T);
    BoundTrace tr;
    tr.A.resize(T + 1);
    tr.B.resize(T + 1);
    tr.bound.resize(T + 1);
    for (std::size_t i = 0; i <= T; ++i) {
        tr.A[i] = coeff_A(eta_at(p, i), p.mu, p.tau);
        tr.B[i] = error_free ? coeff_B_error_free(p, i) : coeff_B(p, i);
    }
    tr.bound[0] = p.init_gap;
    for (std::size_t t = 0; t < T; ++t) tr.bound[t + 1] = tr.A[t] * tr.bound[t] + tr.B[t];
    tr.loss_gap_bound = 0.5 * p.L * tr.bound[T];
    return tr;
}

}  // namespace

double coeff_A(double eta_i, double mu, std::size_t tau) {
    if (!(mu > 0.0) || tau == 0) throw std::invalid_argument("coeff_A: need mu > 0 and tau >= 1");
    const double cap = std::min(1.0, 1.0 / (mu * static_cast<double>(tau)));
    if (!(eta_i > 0.0) || eta_i > cap * (1.0 + 4e-16))
        throw std::invalid_argument("coeff_A: eta = " + std::to_string(eta_i) +
                                    " violates 0 < eta <= min{1, 1/(mu tau)}");
    const double t = static_cast<double>(tau);
    return std::max(0.0, 1.0 - mu * eta_i * (t - eta_i * (t - 1.0)));
}

double coeff_B(const BoundParams& p, std::size_t i) {
    check_scalars(p);
    const double eta = eta_at(p, i);
    check_eta(eta, p.mu, p.tau, i);
    return channel_terms(p, eta, alpha_at(p, i)) + local_terms(p, eta);
}

double coeff_B_error_free(const BoundParams& p, std::size_t i) {
    check_scalars(p);
    const double eta = eta_at(p, i);
    check_eta(eta, p.mu, p.tau, i);
    return local_terms(p, eta);
}

void check_bound_params(const BoundParams& p, std::size_t T) {
    check_scalars(p);
    for (std::size_t i = 0; i <= T; ++i) {
        check_eta(eta_at(p, i), p.mu, p.tau, i);
        alpha_at(p, i);
    }
}

BoundTrace bound_theorem1(const BoundParams& p, std::size_t T) { return run(p, T, false); }

double bound_loss_gap(const BoundParams& p, std::size_t T) { return bound_theorem1(p, T).loss_gap_bound; }

BoundTrace bound_error_free(const BoundParams& p, std::size_t T) { return run(p, T, true); }

double bound_simplified(const BoundParams& p, std::size_t T) {
    if (p.tau != 1) throw std::invalid_argument("bound_simplified: requires tau = 1");
    if (!p.eta.is_constant()) throw std::invalid_argument("bound_simplified: requires a constant eta");
    if (!p.alpha.is_constant()) throw std::invalid_argument("bound_simplified: requires a constant alpha");
    check_bound_params(p, 0);
    const double eta = eta_at(p, 0), alpha = alpha_at(p, 0);
    const double K = static_cast<double>(p.K), M = static_cast<double>(p.M);
    const double q = 1.0 - p.mu * eta;
    const double qT = std::pow(q, static_cast<double>(T));
    const double bracket =
        csi_factor(p) * (eta * eta * p.G2 / K + p.sigma_z2 * static_cast<double>(p.d) /
                                                   (2.0 * alpha * alpha * M * K * p.sigma_h2)) +
        eta * eta * p.G2;
    return 0.5 * p.L * qT * p.init_gap + p.L / (2.0 * p.mu * eta) * bracket * (1.0 - qT);
}

}  // namespace airfeel
