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

#include "tgates/calibration.hpp"
#include "tgates/fitting.hpp"
#include "tgates/measurement.hpp"
#include "tgates/scenario.hpp"
#include "tgates/waveform.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tgates {

struct SynthesisOutcome {
    TrajectoryPlan plan;
    SynthesisResult synthesis;
    std::optional<VoltageWaveform> filtered;
    std::map<std::string, RealizedTrajectory> ideal;     // per well, from the synthesized waveform
    std::map<std::string, RealizedTrajectory> realized;  // per well, from the waveform the ions see
    double seconds = 0.0;                                // synthesis wall time
};

/// A scenario with beams, velocities and trajectories fixed and ion sequences built.
struct ResolvedScenario {
    std::map<std::string, BeamGeometry> beams;
    std::map<std::string, double> well_velocity;  // m/s, signed
    std::optional<SynthesisOutcome> transport;
    std::vector<IonProgram> ions;
    std::vector<CalibrationReport> calibrations;
};

/// Well plans on a common time base, sorted by start position.
TrajectoryPlan build_plan(const Scenario& scenario, const std::map<std::string, double>& well_velocity);

/// Synthesizes the wells, applies the filter and extracts realized trajectories.
SynthesisOutcome run_synthesis(const Scenario& scenario, const ElectrodeBasis& basis,
                               const std::map<std::string, double>& well_velocity);

/// Calibrates beams and velocities, synthesizes wells when a transport uses one,
/// and builds each ion's pulse sequence.
ResolvedScenario resolve_scenario(const Scenario& scenario, bool force_synthesis = false);

struct ScanOutcome {
    ScanConfig config;
    std::vector<ScanResult> results;            // one per ion
    std::vector<std::optional<FitResult>> fits;  // one per ion when the scan names a model
};

struct ExperimentResult {
    ResolvedScenario resolved;
    std::vector<ScanOutcome> scans;
};

/// Runs every configured scan on every ion and fits each result.
ExperimentResult run_experiment(const Scenario& scenario, std::uint64_t seed, int threads);

/// Fits one scan with the named model from its automatic initial guess.
FitResult fit_scan(const ScanResult& scan, const std::string& model);

/// Standard deviation of the realized velocity over [t_begin, t_end].
double velocity_ripple(const RealizedTrajectory& trajectory, double t_begin, double t_end);

/// Third standardized moment of a line about its Gaussian-fit centre. The line
/// depth relative to the fitted baseline is resampled by linear interpolation on
/// a grid symmetric about x0 out to 2.5 sigma_g, so the grid placement does not
/// bias the result. Positive when the tail extends towards larger x.
double lineshape_skewness(const ScanResult& scan, const FitResult& gaussian);

}  // namespace tgates
