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

#include <ostream>
#include <string>
#include <vector>

#include "airfeel/simulation.hpp"

namespace airfeel::cli {

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Column names of metrics.csv, in order.
std::vector<std::string> metrics_columns(bool with_accuracy);

/// Column names of bounds.csv, in order.
std::vector<std::string> bound_columns();

void write_row(std::ostream& out, const std::vector<std::string>& cells);

std::vector<std::string> metrics_cells(const MetricsRow& row, bool with_accuracy);

}  // namespace airfeel::cli
