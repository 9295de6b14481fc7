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
#include <stdexcept>
#include <string>

namespace airfeel {

/// Invalid or inconsistent configuration (schedules, dimensions, variances).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulated model left the finite reals.
class NumericalAbort : public std::runtime_error {
public:
    NumericalAbort(const std::string& what, std::size_t row)
        : std::runtime_error(what), row_(row) {}

    [[nodiscard]] std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

}  // namespace airfeel
