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

#include "tgates/beam.hpp"
#include "tgates/measurement.hpp"
#include "tgates/qubit.hpp"
#include "tgates/trap_model.hpp"
#include "tgates/waveform.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tgates {

/// Evaluates +, -, *, /, parentheses, decimal numbers and `pi`, e.g. "3*pi/4".
double parse_pi_expression(std::string_view text);

struct SurrogateBasisSpec {
    std::size_t electrodes = 30;
    double pitch = 120e-6;  // m
    double width = 120e-6;  // m
    double span = 1800e-6;  // m
    double step = 1e-6;     // m
};

struct FileBasisSpec {
    std::filesystem::path potentials;
    std::optional<std::filesystem::path> derivatives;
};

struct BasisSpec {
    std::variant<SurrogateBasisSpec, FileBasisSpec> source;
    std::vector<std::size_t> channel_map;  // empty: one channel per electrode
    std::optional<std::size_t> max_channels;

    ElectrodeBasis build() const;
};

/// Speed from solve_velocity for a rotation angle on a named beam.
struct VelocityCalibration {
    std::string beam;
    double theta = 0.0;
    double v_lo = 0.05;  // m/s
    double v_hi = 100.0;
};

struct WellSpec {
    std::string name;
    double z_start = 0.0;  // m
    double z_end = 0.0;    // m
    std::optional<double> velocity;  // m/s, signed by the direction of travel when calibrated
    std::optional<VelocityCalibration> calibration;
    double omega = kTwoPi * 2e6;  // rad/s
    double depth = 0.1;           // eV
    double ramp = 10e-6;          // s
};

struct SynthesisSpec {
    double sample_rate = 1e6;
    SynthesisOptions options;
    double window_half_width = 30e-6;
};

/// Sets peak_rabi so that a transit at `velocity` has area theta.
struct IntensityCalibration {
    double theta = 0.0;
    double velocity = 0.0;
};

struct BeamSpec {
    BeamGeometry geometry;
    std::optional<IntensityCalibration> calibration;
    std::optional<std::string> retro_of;  // derive from another beam with make_retro_zone
    double waist_scale = 1.0;
    double transmission = 1.0;
};

struct ConstantPathSpec {
    double z_start = 0.0;
    double z_end = 0.0;
    std::optional<double> velocity;
    std::optional<VelocityCalibration> calibration;
};

struct TransportSpec {
    std::vector<std::string> beams;
    std::variant<ConstantPathSpec, std::string> path;  // constant path or well name
    double phase = 0.0;
    std::optional<double> beam_off_time;
};

using SequenceStepSpec = std::variant<TransportSpec, StaticPulse, PhaseShift, TransferPulse>;

struct IonSpec {
    std::string name;
    std::vector<SequenceStepSpec> sequence;
};

struct ScanConfig {
    std::string name;
    ScanVariable variable = ScanVariable::BeamOffTime;
    std::vector<double> grid;  // SI (s, rad, Hz)
    int shots = 350;
    bool noiseless = false;
    std::string fit;           // model name, empty for none
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    int threads = 1;
    IonSpecies species = IonSpecies::beryllium9();
    BasisSpec basis;
    SynthesisSpec synthesis;
    std::optional<FilterModel> filter;
    std::vector<WellSpec> wells;
    std::map<std::string, BeamSpec> beams;
    SpamModel spam;
    SequenceOptions sequence_options;
    std::vector<IonSpec> ions;
    std::vector<ScanConfig> scans;
    nlohmann::json raw;  // the parsed document
};

/// Parses a scenario document. Lengths are in um, times in us, frequencies in
/// kHz (angular quantities multiplied by 2 pi), angles in deg unless the key ends
/// in `_rad`. Any number may be written as a pi-expression string. Throws ConfigError
/// naming the offending key.
Scenario parse_scenario(const nlohmann::json& document, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace tgates
