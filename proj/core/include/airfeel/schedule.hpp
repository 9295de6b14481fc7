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

#include <cstdint>
#include <string>
#include <vector>

namespace airfeel {

/// Device power allocation factor alpha_t.
struct PowerSchedule {
    enum class Kind { constant, affine, table };

    Kind kind = Kind::constant;
    double a0 = 1.0;
    double a1 = 0.0;
    std::vector<double> table;  // per-round values when kind == table

    static PowerSchedule constant(double value) { return {Kind::constant, value, 0.0, {}}; }
    static PowerSchedule affine(double a0, double a1) { return {Kind::affine, a0, a1, {}}; }
    static PowerSchedule per_round(std::vector<double> values) {
        return {Kind::table, 0.0, 0.0, std::move(values)};
    }

    [[nodiscard]] bool is_constant() const { return kind == Kind::constant; }
};

/// Learning rate eta(t): constant c0, or c0 / (c1 * t + 1).
struct LearningRateSchedule {
    enum class Kind { constant, inverse_affine, table };

    Kind kind = Kind::constant;
    double c0 = 0.1;
    double c1 = 0.0;
    std::vector<double> table;

    static LearningRateSchedule constant(double value) { return {Kind::constant, value, 0.0, {}}; }
    static LearningRateSchedule inverse_affine(double c0, double c1) {
        return {Kind::inverse_affine, c0, c1, {}};
    }
    static LearningRateSchedule per_round(std::vector<double> values) {
        return {Kind::table, 0.0, 0.0, std::move(values)};
    }

    [[nodiscard]] bool is_constant() const { return kind == Kind::constant; }
};

// Both throw ConfigError when t is negative, outside a per-round table, or the
// schedule value is not strictly positive and finite.
double eval_alpha(const PowerSchedule& sched, std::int64_t t);
double eval_eta(const LearningRateSchedule& sched, std::int64_t t);

std::string to_string(PowerSchedule::Kind kind);
std::string to_string(LearningRateSchedule::Kind kind);

}  // namespace airfeel
