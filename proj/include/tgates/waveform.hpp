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

#include "tgates/trap_model.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace tgates {

/// Target well trajectories on a uniform time base.
struct TrajectoryPlan {
    double sample_rate = 1e6;                    // Hz
    std::vector<double> times;                   // s
    std::vector<std::vector<double>> positions;  // [well][sample], m
    std::vector<double> omega;                   // per well, rad/s
    std::vector<double> depth;                   // per well, eV
    double window_half_width = 30e-6;            // m

    std::size_t n_wells() const noexcept { return positions.size(); }
    std::size_t n_samples() const noexcept { return times.size(); }
    double dt() const noexcept { return 1.0 / sample_rate; }

    /// Checks uniform timestamps, one series per well, ordered non-crossing wells
    /// separated by more than twice the window half-width.
    void validate() const;
};

/// Constant-velocity transport between sine-squared acceleration ramps.
/// Duration is |z_end - z_start| / |velocity| + ramp.
TrajectoryPlan plan_trajectory(double z_start, double z_end, double velocity, double omega, double depth,
                               double sample_rate, double ramp);

/// Stationary well held for `duration`.
TrajectoryPlan plan_static(double z, double duration, double omega, double depth, double sample_rate);

/// Merges single-well plans on a common time base; shorter plans hold their
/// final position. All plans must share the sample rate.
TrajectoryPlan combine_plans(std::span<const TrajectoryPlan> plans);

/// Time-sampled AWG output, row-major samples x channels.
struct VoltageWaveform {
    double sample_rate = 1e6;  // Hz
    std::size_t n_channels = 0;
    std::vector<double> samples;  // V
    double vmax = 10.0;           // V
    double slew = 1e6;            // V/s

    std::size_t n_samples() const noexcept { return n_channels ? samples.size() / n_channels : 0; }
    double dt() const noexcept { return 1.0 / sample_rate; }
    std::span<const double> row(std::size_t k) const {
        return std::span<const double>(samples).subspan(k * n_channels, n_channels);
    }
    /// Largest allowed per-sample change, slew / sample_rate.
    double max_step() const noexcept { return slew / sample_rate; }

    /// True when |V| <= vmax and |V(t+dt) - V(t)| <= max_step() hold at every sample.
    bool satisfies_limits() const;
};

struct FilterModel {
    std::vector<double> cutoff;  // Hz, one per channel or a single shared value
    int order = 1;

    static FilterModel uniform(double cutoff_hz, int order = 1) { return FilterModel{{cutoff_hz}, order}; }
    void validate() const;
};

struct RealizedTrajectory {
    std::vector<double> times;     // s
    std::vector<double> position;  // m
    std::vector<double> velocity;  // m/s
    std::vector<double> omega;     // rad/s
    std::vector<double> depth;     // eV

    std::size_t size() const noexcept { return times.size(); }
};

struct SynthesisOptions {
    double vmax = 10.0;  // V
    double slew = 1e6;   // V/s
    /// Tikhonov weight on |V|^2 relative to the mean diagonal of the fit matrix.
    double regularization = 1e-9;
    /// Weight of the depth-enforcing outer ring relative to the window term.
    double depth_penalty = 1.0;
    int depth_iterations = 3;
    double kkt_tolerance = 1e-8;
    /// Voltages in force before the first sample; enables the slew limit at t = 0.
    std::optional<std::vector<double>> initial_voltages;
};

struct WellDiagnostic {
    bool found = false;
    double position_error = 0.0;  // m
    double omega_error = 0.0;     // relative
    double depth = 0.0;           // eV
};

struct StepDiagnostic {
    double residual_rms = 0.0;  // V, weighted over the windows
    double kkt_residual = 0.0;
    int qp_iterations = 0;
    bool depth_penalty_active = false;
    std::vector<WellDiagnostic> wells;
};

struct SynthesisResult {
    VoltageWaveform waveform;
    std::vector<StepDiagnostic> steps;

    /// Every planned well was found within the given position/frequency tolerances.
    bool meets(double position_tolerance, double omega_tolerance) const;
    double max_position_error() const;
    double max_omega_error() const;
};

/// Per-timestep box-constrained QP matching the potential in a raised-cosine
/// window around each planned well to the target harmonic well.
SynthesisResult synthesize_waveform(const ElectrodeBasis& basis, const TrajectoryPlan& plan,
                                    const IonSpecies& species, const SynthesisOptions& options = {});

/// Order-n cascade of one-pole RC sections, pole exp(-2 pi f_c dt), started in steady state.
VoltageWaveform apply_filter(const VoltageWaveform& waveform, const FilterModel& filter);

/// Follows the well that contains seed_position through every sample.
RealizedTrajectory realized_trajectory(const ElectrodeBasis& basis, const VoltageWaveform& waveform,
                                       const IonSpecies& species, double seed_position,
                                       double max_jump = 50e-6);

struct ClassicalTrack {
    std::vector<double> times;          // s
    std::vector<double> ion_position;   // m
    std::vector<double> ion_velocity;   // m/s
    std::vector<double> well_position;  // m
    std::vector<double> energy;         // J, kinetic + q Phi
    double max_deviation = 0.0;         // m
    double max_energy_drift = 0.0;      // relative to the initial oscillation energy (static waveforms)
};

struct ClassicalOptions {
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-12;  // micrometres, and micrometres per inverse secular frequency
    int subdivisions = 4;               // observation points per sample interval
};

/// Integrates m z'' = -q dPhi/dz with voltages linearly interpolated between samples.
ClassicalTrack track_classical_ion(const ElectrodeBasis& basis, const VoltageWaveform& waveform,
                                   const IonSpecies& species, double z0, double v0,
                                   const ClassicalOptions& options = {});

/// Waveform that repeats `voltages` for n_samples.
VoltageWaveform constant_waveform(std::span<const double> voltages, std::size_t n_samples, double sample_rate,
                                  double vmax = 10.0, double slew = 1e6);

void write_waveform_csv(const VoltageWaveform& waveform, const std::filesystem::path& path,
                        const std::vector<std::string>& comments = {});
VoltageWaveform read_waveform_csv(const std::filesystem::path& path, double vmax = 10.0, double slew = 1e6);
void write_trajectory_csv(const RealizedTrajectory& trajectory, const std::filesystem::path& path,
                          const std::vector<std::string>& comments = {});

}  // namespace tgates
