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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "airfeel/config.hpp"
#include "airfeel/model_vector.hpp"

namespace airfeel {

/// One Monte Carlo check against a closed form.
struct VerificationEntry {
    enum class Criterion { relative, standard_errors, exact_zero };

    std::string name;
    double closed_form = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    Criterion criterion = Criterion::relative;
    double tolerance = 0.0;  // relative fraction, or number of standard errors
    bool pass = false;
    // Fewer trials than the check needs. Reported, never counted as a failure.
    bool insufficient_trials = false;
};

std::string to_string(VerificationEntry::Criterion c);

struct VerificationReport {
    std::vector<VerificationEntry> entries;

    /// True when every entry passes or is flagged insufficient_trials.
    [[nodiscard]] bool all_pass() const;
    void append(const VerificationReport& other);
};

inline constexpr std::size_t kMinTrialsUnbiased = 10'000;
inline constexpr std::size_t kMinTrialsMoments = 100'000;
inline constexpr double kMomentTolerance = 0.02;
inline constexpr double kMeanStdErrors = 4.0;

/// Closed-form second moments of the five estimate components, in order:
/// signal error, interference, channel noise, CSI-error interference,
/// CSI-error noise.
std::array<double, 5> term_moment_closed_forms(const SimConfig& cfg, std::span<const ModelVector> updates,
                                               double alpha);

/// Closed-form E|estimate - average update|^2.
double total_mse_closed_form(const SimConfig& cfg, std::span<const ModelVector> updates, double alpha);

/// Per-coordinate mean of the estimate over fresh channel, noise and CSI
/// error draws; passes when each coordinate is within 4 standard errors of
/// the average update. Trial j draws from RngStream(cfg.seed).derive(trial, j),
/// so results do not depend on `workers`.
VerificationReport mc_verify_unbiased(const SimConfig& cfg, std::span<const ModelVector> updates,
                                      std::size_t trials, double alpha, std::size_t workers = 1);

/// The five component moments plus the total MSE, each at 2% relative.
/// Components whose closed form is zero are checked for exact zeros.
VerificationReport mc_verify_term_moments(const SimConfig& cfg, std::span<const ModelVector> updates,
                                          std::size_t trials, double alpha, std::size_t workers = 1);

/// Mean (real and imaginary, 4 standard errors) and second moment (2%) of
/// the interference gain of device 0, and the second moment of its
/// CSI-error gain when sigma_ht2 > 0.
VerificationReport mc_verify_interference(const SimConfig& cfg, std::size_t trials, std::size_t workers = 1);

}  // namespace airfeel
