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

#include "tgates/io.hpp"

#include "tgates/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tgates::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'", 0, 0);
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            if (!have_header) table.comments.push_back(trim(t.substr(1)));
            continue;
        }
        auto cells = split(t);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ParseError("expected " + std::to_string(table.header.size()) + " columns, found " +
                                 std::to_string(cells.size()),
                             line_no, 0);
        }
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto& cell = cells[c];
            const char* begin = cell.data();
            const char* end = cell.data() + cell.size();
            if (!cell.empty() && *begin == '+') ++begin;
            const auto res = std::from_chars(begin, end, row[c]);
            if (cell.empty() || res.ec != std::errc() || res.ptr != end) {
                throw ParseError("malformed number '" + cell + "'", line_no, c + 1);
            }
        }
        if (table.rows.empty()) table.first_data_line = line_no;
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError("missing header row in '" + path.string() + "'", 0, 0);
    return table;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    for (const auto& c : comments) out << "# " << c << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
}

}  // namespace tgates::io
