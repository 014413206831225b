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
#include "tgates/waveform.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace tgates {

using Complex = std::complex<double>;

/// Two-level state in the basis (|up>, |down>).
struct QubitState {
    Complex up{1.0, 0.0};
    Complex down{0.0, 0.0};

    static QubitState spin_up() { return {}; }
    static QubitState spin_down() { return {Complex{0.0, 0.0}, Complex{1.0, 0.0}}; }
    double p_up() const noexcept { return std::norm(up); }
    double p_down() const noexcept { return std::norm(down); }
    double norm() const noexcept { return std::sqrt(std::norm(up) + std::norm(down)); }
};

struct GateUnitary {
    Eigen::Matrix2cd matrix = Eigen::Matrix2cd::Identity();

    /// max |U^dagger U - I| entry.
    double unitarity_error() const;
    QubitState apply(const QubitState& state) const;
};

/// cos(theta/2) I - i sin(theta/2) (cos(phi) sigma_x + sin(phi) sigma_y).
GateUnitary rotation_unitary(double theta, double phi);

/// exp(-i H dt) for H = (delta/2) sigma_z + (Omega/2)(cos(phi) sigma_x + sin(phi) sigma_y).
Eigen::Matrix2cd step_unitary(double omega, double delta, double phi, double dt);

/// Piecewise-constant propagation; sample k holds Omega and delta at the midpoint
/// of step k.
QubitState propagate_spin(const QubitState& state, std::span<const double> omega,
                          std::span<const double> delta, double phi, double dt);

/// cos^2(zeta/2) with zeta = (Omega0 / chi) sqrt(pi) (erf(chi t0) - erf(chi (t0 - t))).
double transit_probability_analytic(double omega0, double chi, double t0, double t);

/// Straight-line transport at constant velocity from z_start to z_end.
struct ConstantVelocityPath {
    double z_start = 0.0;   // m
    double z_end = 0.0;     // m
    double velocity = 0.0;  // m/s, sign must match z_end - z_start

    double duration() const;
};

struct TransportSegment {
    std::variant<ConstantVelocityPath, RealizedTrajectory> path;
    std::vector<BeamGeometry> beams;
    std::optional<double> beam_off_time;  // s from segment start
    double phase = 0.0;                   // rad, laser phase of this segment

    double duration() const;
};

/// Pulse on a static ion. A non-positive Rabi frequency applies the ideal
/// rotation instantaneously.
struct StaticPulse {
    double theta = 0.0;
    double phase = 0.0;
    double detuning = 0.0;  // rad/s
    double rabi = 0.0;      // rad/s
};

/// Adds phi to the drive phase of every later element.
struct PhaseShift {
    double phi = 0.0;
};

/// Population transfer in the preparation/readout path; counted here and
/// charged by the SPAM model.
struct TransferPulse {};

using PulseElement = std::variant<TransportSegment, StaticPulse, PhaseShift, TransferPulse>;

struct SequenceOptions {
    double base_detuning = 0.0;      // rad/s, laser difference-frequency detuning
    double max_rotation_step = 0.01;  // rad per step, dt <= max_rotation_step / Omega_peak
};

struct SequenceResult {
    QubitState state;
    GateUnitary unitary;
    int transfer_pulses = 0;

    double p_up() const noexcept { return state.p_up(); }
};

/// Applies the elements in order. Multiple beams in one segment add their Rabi
/// frequencies; the detuning follows the beam nearest to the ion.
SequenceResult run_sequence(const QubitState& initial, std::span<const PulseElement> elements,
                            const SequenceOptions& options = {});

/// (d + |Tr(target^dagger actual)|^2) / (d (d + 1)), d = 2.
double average_fidelity(const GateUnitary& actual, const GateUnitary& target);

/// Pulse-area mapping between a constant-velocity Gaussian transit and the
/// transit_rabi fit parameters: Omega0 = Omega_pk / 2, chi = sqrt(p) |v| sin(theta) / w0.
struct TransitParameters {
    double omega0 = 0.0;
    double chi = 0.0;
    double t0 = 0.0;
};
TransitParameters transit_parameters(const BeamGeometry& beam, const ConstantVelocityPath& path);

}  // namespace tgates
