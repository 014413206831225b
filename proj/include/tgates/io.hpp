// Copyright 2026 The tgates Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// CSV helpers shared by the file formats (basis, waveform, trajectory, scans).

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace tgates::io {

struct CsvTable {
    std::vector<std::string> comments;  // leading '#' lines, without the '#'
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::size_t first_data_line = 0;  // 1-based file line of rows[0]
};

/// Parses a numeric CSV with one header row. Errors carry 1-based row/column.
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

/// Writes comment lines (prefixed with "# "), a header, and rows.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

}  // namespace tgates::io
