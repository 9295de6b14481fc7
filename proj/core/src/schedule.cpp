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
#include "airfeel/schedule.hpp"

#include <cmath>

#include "airfeel/errors.hpp"

namespace airfeel {
namespace {

double table_lookup(const std::vector<double>& table, std::int64_t t, const char* name) {
    if (static_cast<std::size_t>(t) >= table.size())
        throw ConfigError(std::string(name) + " table has " + std::to_string(table.size()) +
                          " entries; round " + std::to_string(t) + " is out of range");
    return table[static_cast<std::size_t>(t)];
}

double checked(double value, std::int64_t t, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw ConfigError(std::string(name) + "(" + std::to_string(t) +
                          ") must be positive and finite, got " + std::to_string(value));
    return value;
}

}  // namespace

double eval_alpha(const PowerSchedule& sched, std::int64_t t) {
    if (t < 0) throw ConfigError("alpha: negative round index " + std::to_string(t));
    double value = 0.0;
    switch (sched.kind) {
        case PowerSchedule::Kind::constant: value = sched.a0; break;
        case PowerSchedule::Kind::affine: value = sched.a0 + sched.a1 * static_cast<double>(t); break;
        case PowerSchedule::Kind::table: value = table_lookup(sched.table, t, "alpha"); break;
    }
    return checked(value, t, "alpha");
}

double eval_eta(const LearningRateSchedule& sched, std::int64_t t) {
    if (t < 0) throw ConfigError("eta: negative round index " + std::to_string(t));
    double value = 0.0;
    switch (sched.kind) {
        case LearningRateSchedule::Kind::constant: value = sched.c0; break;
        case LearningRateSchedule::Kind::inverse_affine:
            value = sched.c0 / (sched.c1 * static_cast<double>(t) + 1.0);
            break;
        case LearningRateSchedule::Kind::table: value = table_lookup(sched.table, t, "eta"); break;
    }
    return checked(value, t, "eta");
}

std::string to_string(PowerSchedule::Kind kind) {
    switch (kind) {
        case PowerSchedule::Kind::constant: return "constant";
        case PowerSchedule::Kind::affine: return "affine";
        case PowerSchedule::Kind::table: return "table";
    }
    return "unknown";
}

std::string to_string(LearningRateSchedule::Kind kind) {
    switch (kind) {
        case LearningRateSchedule::Kind::constant: return "constant";
        case LearningRateSchedule::Kind::inverse_affine: return "inverse_affine";
        case LearningRateSchedule::Kind::table: return "table";
    }
    return "unknown";
}

}  // namespace airfeel
