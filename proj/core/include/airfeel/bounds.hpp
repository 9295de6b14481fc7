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

#include <cstddef>
#include <vector>

#include "airfeel/schedule.hpp"

namespace airfeel {

/// Inputs of the convergence bound for blind transmitters.
struct BoundParams {
    double mu = 1.0;
    double L = 1.0;
    double G2 = 1.0;
    double Gamma = 0.0;
    std::size_t tau = 1;
    std::size_t M = 1;
    std::size_t K = 1;
    std::size_t d = 1;
    double sigma_h2 = 1.0;
    double sigma_z2 = 0.0;
    double sigma_ht2 = 0.0;
    PowerSchedule alpha;
    LearningRateSchedule eta;
    double init_gap = 0.0;  // |theta(0) - theta*|^2
};

/// Per-iteration coefficients and the bound on E|theta(t) - theta*|^2.
/// A and B hold i = 0..T (entry T is not used by the recursion but lets a
/// report print a full row for t = T); bound holds t = 0..T.
struct BoundTrace {
    std::vector<double> A;
    std::vector<double> B;
    std::vector<double> bound;
    double loss_gap_bound = 0.0;  // (L/2) bound[T]
};

/// 1 - mu eta (tau - eta (tau - 1)). Throws std::invalid_argument unless
/// 0 < eta <= min{1, 1/(mu tau)}.
double coeff_A(double eta_i, double mu, std::size_t tau);

/// Additive term of the recursion at iteration i, alpha and eta both taken at i.
double coeff_B(const BoundParams& p, std::size_t i);

/// coeff_B without the two antenna-dependent terms (error-free shared link).
double coeff_B_error_free(const BoundParams& p, std::size_t i);

/// Checks every invariant of p on iterations 0..T; the message names the
/// first offending t. Throws std::invalid_argument.
void check_bound_params(const BoundParams& p, std::size_t T);

/// bound(0) = init_gap, bound(t+1) = A(t) bound(t) + B(t).
BoundTrace bound_theorem1(const BoundParams& p, std::size_t T);

/// (L/2) bound_theorem1(p, T).bound[T].
double bound_loss_gap(const BoundParams& p, std::size_t T);

/// Same recursion with the error-free additive term.
BoundTrace bound_error_free(const BoundParams& p, std::size_t T);

/// Closed form for tau = 1 with constant eta and alpha:
///   (L/2)(1-mu eta)^T init_gap
///   + (L/(2 mu eta)) [(1+r)(eta^2 G2/K + sigma_z2 d/(2 alpha^2 M K sigma_h2)) + eta^2 G2] (1 - (1-mu eta)^T)
/// with r = sigma_ht2/(M sigma_h2). Throws std::invalid_argument otherwise.
double bound_simplified(const BoundParams& p, std::size_t T);

}  // namespace airfeel
