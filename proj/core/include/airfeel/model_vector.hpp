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

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace airfeel {

/// Length-d real parameter or update vector (theta, per-device updates,
/// averaged updates and their over-the-air estimates).
class ModelVector {
public:
    ModelVector() = default;
    explicit ModelVector(std::size_t d, double fill = 0.0) : values_(d, fill) {}
    explicit ModelVector(std::vector<double> values) : values_(std::move(values)) {}
    ModelVector(std::initializer_list<double> values) : values_(values) {}

    static ModelVector zeros(std::size_t d) { return ModelVector(d); }

    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] bool empty() const { return values_.empty(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    [[nodiscard]] double* data() { return values_.data(); }
    [[nodiscard]] const double* data() const { return values_.data(); }

    [[nodiscard]] std::span<double> span() { return values_; }
    [[nodiscard]] std::span<const double> span() const { return values_; }

    [[nodiscard]] const std::vector<double>& values() const { return values_; }

    auto begin() { return values_.begin(); }
    auto end() { return values_.end(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    [[nodiscard]] bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend bool operator==(const ModelVector&, const ModelVector&) = default;

private:
    std::vector<double> values_;
};

inline void require_same_length(const ModelVector& a, const ModelVector& b, const char* what) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

inline double squared_norm(const ModelVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double squared_distance(const ModelVector& a, const ModelVector& b) {
    require_same_length(a, b, "squared_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = a[i] - b[i];
        s += e * e;
    }
    return s;
}

inline double dot(const ModelVector& a, const ModelVector& b) {
    require_same_length(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace airfeel
