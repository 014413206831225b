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

#include "tgates/beam.hpp"

#include "tgates/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tgates {

void BeamGeometry::validate() const {
    if (!(waist > 0.0)) throw InvalidArgument("beam waist must be positive");
    if (!(angle > 0.0 && angle < kPi)) throw InvalidArgument("beam crossing angle must lie in (0, pi)");
    if (!(peak_rabi >= 0.0)) throw InvalidArgument("peak Rabi frequency must be non-negative");
    if (profile_exponent != 1 && profile_exponent != 2) throw InvalidArgument("profile exponent must be 1 or 2");
    if (!std::isfinite(stark_offset) || !std::isfinite(misalignment) || !(wavenumber > 0.0)) {
        throw InvalidArgument("beam detuning parameters must be finite and k positive");
    }
}

double rabi_at_position(const BeamGeometry& beam, double z) {
    const double s = (z - beam.center) * std::sin(beam.angle) / beam.waist;
    return beam.peak_rabi * std::exp(-beam.profile_exponent * s * s);
}

double relative_intensity(const BeamGeometry& beam, double z) {
    const double s = (z - beam.center) * std::sin(beam.angle) / beam.waist;
    return std::exp(-2.0 * s * s);
}

BeamGeometry make_retro_zone(const BeamGeometry& primary, double center, double waist_scale,
                             double power_transmission) {
    if (!(waist_scale >= 1.0)) throw InvalidArgument("waist scale must be at least 1");
    if (!(power_transmission >= 0.0 && power_transmission <= 1.0)) {
        throw InvalidArgument("power transmission must lie in [0, 1]");
    }
    BeamGeometry out = primary;
    out.center = center;
    out.waist = primary.waist * waist_scale;
    const double intensity_ratio = power_transmission / (waist_scale * waist_scale);
    out.peak_rabi = primary.peak_rabi * std::pow(intensity_ratio, 0.5 * primary.profile_exponent);
    return out;
}

double doppler_shift(const BeamGeometry& beam, double velocity) { return beam.delta_k() * velocity; }

double stark_shift(const BeamGeometry& beam, double z) {
    if (beam.stark_profile == StarkProfile::Intensity) return beam.stark_offset * relative_intensity(beam, z);
    return beam.stark_offset;
}

double total_detuning(const BeamGeometry& beam, double velocity, double base) {
    return base + beam.stark_offset + doppler_shift(beam, velocity);
}

double total_detuning_at(const BeamGeometry& beam, double z, double velocity, double base) {
    return base + stark_shift(beam, z) + doppler_shift(beam, velocity);
}

double beam_extent(const BeamGeometry& beam) {
    // exp(-p s^2) = 1e-18 at s^2 = 18 ln(10) / p; the Stark profile uses p = 2.
    const double p = std::min(beam.profile_exponent, 2);
    return beam.waist * std::sqrt(18.0 * std::log(10.0) / p) / std::sin(beam.angle);
}

}  // namespace tgates
