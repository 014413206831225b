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

#include "tgates/errors.hpp"
#include "tgates/io.hpp"
#include "tgates/trap_model.hpp"

#include <map>
#include <string>

namespace tgates {

namespace {

// Index of `name_<k>` columns, k = 1..n, keyed by k-1. Returns false if the
// header does not follow the pattern.
std::map<std::size_t, std::size_t> indexed_columns(const std::vector<std::string>& header,
                                                   const std::string& prefix) {
    std::map<std::size_t, std::size_t> out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto& h = header[c];
        if (h.rfind(prefix, 0) != 0) continue;
        const std::string digits = h.substr(prefix.size());
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) continue;
        const std::size_t k = std::stoul(digits);
        if (k == 0) throw ParseError("electrode indices start at 1 ('" + h + "')", 1, c + 1);
        if (!out.emplace(k - 1, c).second) throw ParseError("duplicate column '" + h + "'", 1, c + 1);
    }
    return out;
}

// Central differences on a possibly non-uniform grid; second-order one-sided at the ends.
void differentiate(const std::vector<double>& z, const double* f, double* df, double* d2f) {
    const std::size_t n = z.size();
    if (n < 3) {
        const double s = (f[1] - f[0]) / (z[1] - z[0]);
        df[0] = df[1] = s;
        d2f[0] = d2f[1] = 0.0;
        return;
    }
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double h1 = z[j] - z[j - 1];
        const double h2 = z[j + 1] - z[j];
        df[j] = -h2 / (h1 * (h1 + h2)) * f[j - 1] + (h2 - h1) / (h1 * h2) * f[j] +
                h1 / (h2 * (h1 + h2)) * f[j + 1];
        d2f[j] = 2.0 * (f[j - 1] / (h1 * (h1 + h2)) - f[j] / (h1 * h2) + f[j + 1] / (h2 * (h1 + h2)));
    }
    {
        const double h1 = z[1] - z[0];
        const double h2 = z[2] - z[1];
        df[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
                h1 / (h2 * (h1 + h2)) * f[2];
        d2f[0] = d2f[1];
    }
    {
        const double h1 = z[n - 2] - z[n - 3];
        const double h2 = z[n - 1] - z[n - 2];
        df[n - 1] = h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2] +
                    (2 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
        d2f[n - 1] = d2f[n - 2];
    }
}

}  // namespace

ElectrodeBasis load_basis(const std::filesystem::path& path,
                          const std::optional<std::filesystem::path>& derivative_path,
                          std::vector<std::size_t> channel_map) {
    const auto table = io::read_csv(path);
    if (table.header.empty() || table.header.front() != "z") {
        throw ParseError("first column of a basis file must be 'z'", 1, 1);
    }
    const auto phi_cols = indexed_columns(table.header, "phi_");
    const std::size_t n_e = phi_cols.size();
    if (n_e == 0) throw ParseError("basis file has no phi_i columns", 1, 0);
    if (phi_cols.rbegin()->first != n_e - 1) throw ParseError("phi_i columns must be numbered 1..N", 1, 0);
    if (n_e + 1 != table.header.size()) throw ParseError("unexpected extra columns in basis header", 1, 0);
    const std::size_t n = table.rows.size();
    if (n < 2) throw ParseError("basis file needs at least two grid rows", table.first_data_line, 0);

    std::vector<double> grid(n);
    std::vector<double> phi(n_e * n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& row = table.rows[j];
        grid[j] = row[0];
        if (j > 0 && !(grid[j] > grid[j - 1])) {
            throw ParseError("grid is not strictly increasing", table.first_data_line + j, 1);
        }
        for (const auto& [i, c] : phi_cols) phi[i * n + j] = row[c];
    }

    std::vector<double> dphi(n_e * n), d2phi(n_e * n);
    if (derivative_path) {
        const auto dt = io::read_csv(*derivative_path);
        if (dt.header.empty() || dt.header.front() != "z") {
            throw ParseError("first column of a derivative file must be 'z'", 1, 1);
        }
        const auto d1 = indexed_columns(dt.header, "dphi_");
        const auto d2 = indexed_columns(dt.header, "d2phi_");
        if (d1.size() != n_e || d2.size() != n_e) {
            throw ParseError("derivative file must carry dphi_i and d2phi_i for every electrode", 1, 0);
        }
        if (dt.rows.size() != n) {
            throw ParseError("derivative file has " + std::to_string(dt.rows.size()) + " rows, expected " +
                                 std::to_string(n),
                             dt.first_data_line, 0);
        }
        for (std::size_t j = 0; j < n; ++j) {
            const auto& row = dt.rows[j];
            if (row[0] != grid[j]) throw ParseError("derivative grid differs from basis grid", dt.first_data_line + j, 1);
            for (const auto& [i, c] : d1) dphi[i * n + j] = row[c];
            for (const auto& [i, c] : d2) d2phi[i * n + j] = row[c];
        }
    } else {
        for (std::size_t i = 0; i < n_e; ++i) {
            differentiate(grid, phi.data() + i * n, dphi.data() + i * n, d2phi.data() + i * n);
        }
    }
    return ElectrodeBasis(std::move(grid), std::move(phi), std::move(dphi), std::move(d2phi), n_e,
                          std::move(channel_map));
}

void save_basis(const ElectrodeBasis& basis, const std::filesystem::path& path,
                const std::optional<std::filesystem::path>& derivative_path) {
    const std::size_t n = basis.grid_size();
    const std::size_t n_e = basis.n_electrodes();
    const auto grid = basis.grid();
    std::vector<std::string> header{"z"};
    for (std::size_t i = 0; i < n_e; ++i) header.push_back("phi_" + std::to_string(i + 1));
    std::vector<std::vector<double>> rows(n, std::vector<double>(n_e + 1));
    for (std::size_t j = 0; j < n; ++j) {
        rows[j][0] = grid[j];
        for (std::size_t i = 0; i < n_e; ++i) rows[j][i + 1] = basis.phi()[i * n + j];
    }
    io::write_csv(path, {}, header, rows);

    if (derivative_path) {
        std::vector<std::string> dh{"z"};
        for (std::size_t i = 0; i < n_e; ++i) dh.push_back("dphi_" + std::to_string(i + 1));
        for (std::size_t i = 0; i < n_e; ++i) dh.push_back("d2phi_" + std::to_string(i + 1));
        std::vector<std::vector<double>> drows(n, std::vector<double>(2 * n_e + 1));
        for (std::size_t j = 0; j < n; ++j) {
            drows[j][0] = grid[j];
            for (std::size_t i = 0; i < n_e; ++i) {
                drows[j][i + 1] = basis.dphi()[i * n + j];
                drows[j][n_e + i + 1] = basis.d2phi()[i * n + j];
            }
        }
        io::write_csv(*derivative_path, {}, dh, drows);
    }
}

}  // namespace tgates
