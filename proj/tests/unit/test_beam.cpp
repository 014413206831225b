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

#include "doctest.h"

#include <cmath>

using namespace tgates;

namespace {

BeamGeometry b1() {
    BeamGeometry b;
    b.center = 600e-6;
    b.angle = kPi / 4.0;
    b.waist = 36.5e-6;
    b.peak_rabi = kTwoPi * 47.9e3;
    return b;
}

}  // namespace

TEST_CASE("Rabi profile along the axis") {
    BeamGeometry b = b1();
    CHECK(rabi_at_position(b, b.center) == doctest::Approx(b.peak_rabi));
    // Projected 1/e^2 intensity radius is w0 / sin(theta).
    const double r = b.waist / std::sin(b.angle);
    CHECK(relative_intensity(b, b.center + r) == doctest::Approx(std::exp(-2.0)));
    CHECK(rabi_at_position(b, b.center - r) == doctest::Approx(b.peak_rabi * std::exp(-2.0)));
    b.profile_exponent = 1;
    CHECK(rabi_at_position(b, b.center + r) == doctest::Approx(b.peak_rabi * std::exp(-1.0)));
}

TEST_CASE("beam extent bounds the profile") {
    for (int p : {1, 2}) {
        BeamGeometry b = b1();
        b.profile_exponent = p;
        const double e = beam_extent(b);
        CHECK(rabi_at_position(b, b.center + e) <= 1.0000001e-18 * b.peak_rabi);
        CHECK(rabi_at_position(b, b.center + 0.95 * e) > 1e-18 * b.peak_rabi);
    }
}

TEST_CASE("beam validation") {
    BeamGeometry b = b1();
    CHECK_NOTHROW(b.validate());
    b.waist = 0.0;
    CHECK_THROWS_AS(b.validate(), InvalidArgument);
    b = b1();
    b.angle = kPi;
    CHECK_THROWS_AS(b.validate(), InvalidArgument);
    b = b1();
    b.profile_exponent = 3;
    CHECK_THROWS_AS(b.validate(), InvalidArgument);
    b = b1();
    b.peak_rabi = -1.0;
    CHECK_THROWS_AS(b.validate(), InvalidArgument);
}

TEST_CASE("Doppler shift from misalignment") {
    BeamGeometry b = b1();
    b.misalignment = 1e-3 * kDegree;
    const double expect = kTwoPi / 313e-9 * 1e-3 * kDegree * 10.0;
    CHECK(doppler_shift(b, 10.0) == doctest::Approx(expect));
    CHECK(doppler_shift(b, -10.0) == doctest::Approx(-expect));
    CHECK(expect / kTwoPi == doctest::Approx(557.6).epsilon(1e-3));
    CHECK(total_detuning(b, 10.0, 5.0) == doctest::Approx(5.0 + expect));
}

TEST_CASE("Stark profiles") {
    BeamGeometry b = b1();
    b.stark_offset = kTwoPi * 1.3e3;
    const double z = b.center + 20e-6;
    CHECK(stark_shift(b, z) == doctest::Approx(b.stark_offset));
    b.stark_profile = StarkProfile::Intensity;
    CHECK(stark_shift(b, z) == doctest::Approx(b.stark_offset * relative_intensity(b, z)));
    CHECK(total_detuning_at(b, z, 0.0, 2.0) == doctest::Approx(2.0 + b.stark_offset * relative_intensity(b, z)));
}

TEST_CASE("retro-reflected zone scaling") {
    const BeamGeometry p = b1();
    const BeamGeometry r = make_retro_zone(p, -600e-6, 80.0 / 36.5, 0.9);
    CHECK(r.center == doctest::Approx(-600e-6));
    CHECK(r.waist == doctest::Approx(80e-6));
    const double expect = p.peak_rabi * (0.9 / std::pow(80.0 / 36.5, 2));
    CHECK(r.peak_rabi == doctest::Approx(expect));
    CHECK_THROWS_AS(make_retro_zone(p, 0.0, -1.0, 0.9), InvalidArgument);
    CHECK_THROWS_AS(make_retro_zone(p, 0.0, 1.0, 1.5), InvalidArgument);
}
