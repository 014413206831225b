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

#include "tgates/constants.hpp"

namespace tgates {

/// How the static detuning offset varies along the transit.
enum class StarkProfile {
    Constant,   // stark_offset applies everywhere
    Intensity,  // stark_offset scaled by I(z)/I_peak, as for a light shift
};

/// One Raman beam pair crossing the trap axis.
struct BeamGeometry {
    double center = 0.0;                   // m
    double angle = kPi / 4.0;              // rad, crossing angle to the trap axis
    double waist = 36.5e-6;                // m, 1/e^2 intensity radius
    double peak_rabi = 0.0;                // rad/s
    int profile_exponent = 2;              // Omega ~ amplitude (1) or intensity (2)
    double stark_offset = 0.0;             // rad/s
    StarkProfile stark_profile = StarkProfile::Constant;
    double misalignment = 0.0;             // rad, relative angle alpha of the two beams
    double wavenumber = kTwoPi / 313e-9;   // rad/m

    /// Throws InvalidArgument unless w0 > 0, 0 < angle < pi, peak_rabi >= 0 and p in {1, 2}.
    void validate() const;

    /// Residual wavevector magnitude k * alpha (rad/m).
    double delta_k() const noexcept { return wavenumber * misalignment; }
};

/// Omega(z) = Omega_pk exp(-p ((z - z_c) sin(theta))^2 / w0^2).
double rabi_at_position(const BeamGeometry& beam, double z);

/// I(z) / I_peak = exp(-2 ((z - z_c) sin(theta))^2 / w0^2).
double relative_intensity(const BeamGeometry& beam, double z);

/// Second beam crossing after retro-reflection: waist scaled by waist_scale and
/// peak Rabi frequency scaled by (transmission / waist_scale^2)^(p/2).
BeamGeometry make_retro_zone(const BeamGeometry& primary, double center, double waist_scale,
                             double power_transmission);

/// delta_D = k * alpha * v.
double doppler_shift(const BeamGeometry& beam, double velocity);

/// Stark offset at position z, following the beam's StarkProfile.
double stark_shift(const BeamGeometry& beam, double z);

/// base + delta_0 + delta_D (constant Stark profile).
double total_detuning(const BeamGeometry& beam, double velocity, double base);

/// base + Stark(z) + delta_D for either Stark profile.
double total_detuning_at(const BeamGeometry& beam, double z, double velocity, double base);

/// Half-length along the axis beyond which Omega < 1e-18 Omega_pk.
double beam_extent(const BeamGeometry& beam);

}  // namespace tgates
