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
#include "csv.hpp"

#include <charconv>
#include <cmath>

namespace airfeel::cli {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::vector<std::string> metrics_columns(bool with_accuracy) {
    std::vector<std::string> cols = {"link", "round", "alpha", "eta", "loss", "loss_gap", "dist2",
                                     "estimate_mse", "avg_power_max", "avg_power_mean"};
    if (with_accuracy) cols.emplace_back("test_accuracy");
    return cols;
}

std::vector<std::string> bound_columns() {
    return {"k", "t", "A", "B", "bound_theorem1", "bound_error_free", "loss_gap_bound"};
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << cells[c];
    out << '\n';
}

std::vector<std::string> metrics_cells(const MetricsRow& row, bool with_accuracy) {
    std::vector<std::string> cells = {row.link,
                                      std::to_string(row.round),
                                      format_double(row.alpha),
                                      format_double(row.eta),
                                      format_double(row.loss),
                                      format_double(row.loss_gap),
                                      format_double(row.dist2),
                                      format_double(row.estimate_mse),
                                      format_double(row.avg_power_max),
                                      format_double(row.avg_power_mean)};
    if (with_accuracy) cells.push_back(row.test_accuracy ? format_double(*row.test_accuracy) : "");
    return cells;
}

}  // namespace airfeel::cli
