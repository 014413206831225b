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
#include "tgates/waveform.hpp"

#include <cmath>
#include <string>

namespace tgates {

VoltageWaveform constant_waveform(std::span<const double> voltages, std::size_t n_samples, double sample_rate,
                                  double vmax, double slew) {
    if (!(sample_rate > 0.0)) throw InvalidArgument("sample rate must be positive");
    VoltageWaveform wf;
    wf.sample_rate = sample_rate;
    wf.n_channels = voltages.size();
    wf.vmax = vmax;
    wf.slew = slew;
    wf.samples.reserve(n_samples * voltages.size());
    for (std::size_t k = 0; k < n_samples; ++k) wf.samples.insert(wf.samples.end(), voltages.begin(), voltages.end());
    return wf;
}

void write_waveform_csv(const VoltageWaveform& waveform, const std::filesystem::path& path,
                        const std::vector<std::string>& comments) {
    std::vector<std::string> header{"t"};
    for (std::size_t c = 0; c < waveform.n_channels; ++c) header.push_back("ch_" + std::to_string(c + 1));
    std::vector<std::vector<double>> rows(waveform.n_samples());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        rows[k].reserve(waveform.n_channels + 1);
        rows[k].push_back(static_cast<double>(k) / waveform.sample_rate);
        const auto r = waveform.row(k);
        rows[k].insert(rows[k].end(), r.begin(), r.end());
    }
    io::write_csv(path, comments, header, rows);
}

VoltageWaveform read_waveform_csv(const std::filesystem::path& path, double vmax, double slew) {
    const auto table = io::read_csv(path);
    if (table.header.size() < 2 || table.header.front() != "t") {
        throw ParseError("waveform header must be t,ch_1,...,ch_K", 1, 1);
    }
    for (std::size_t c = 1; c < table.header.size(); ++c) {
        if (table.header[c] != "ch_" + std::to_string(c)) {
            throw ParseError("unexpected waveform column '" + table.header[c] + "'", 1, c + 1);
        }
    }
    if (table.rows.empty()) throw ParseError("waveform has no samples", table.first_data_line, 0);
    VoltageWaveform wf;
    wf.n_channels = table.header.size() - 1;
    wf.vmax = vmax;
    wf.slew = slew;
    if (table.rows.size() > 1) {
        const double dt = table.rows[1][0] - table.rows[0][0];
        if (!(dt > 0.0)) throw ParseError("waveform timestamps must increase", table.first_data_line + 1, 1);
        for (std::size_t k = 1; k < table.rows.size(); ++k) {
            const double expected = table.rows[0][0] + static_cast<double>(k) * dt;
            if (std::abs(table.rows[k][0] - expected) > 1e-6 * dt) {
                throw ParseError("waveform timestamps must be uniform", table.first_data_line + k, 1);
            }
        }
        wf.sample_rate = 1.0 / dt;
    }
    wf.samples.reserve(table.rows.size() * wf.n_channels);
    for (const auto& row : table.rows) wf.samples.insert(wf.samples.end(), row.begin() + 1, row.end());
    return wf;
}

void write_trajectory_csv(const RealizedTrajectory& trajectory, const std::filesystem::path& path,
                          const std::vector<std::string>& comments) {
    std::vector<std::vector<double>> rows(trajectory.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        rows[k] = {trajectory.times[k], trajectory.position[k], trajectory.velocity[k], trajectory.omega[k],
                   trajectory.depth[k]};
    }
    io::write_csv(path, comments, {"t", "z", "v", "omega", "depth"}, rows);
}

}  // namespace tgates
