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
#include "tgates/measurement.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <vector>

using namespace tgates;

namespace {

IonProgram transit_program(const std::string& name, double peak_khz) {
    BeamGeometry b;
    b.waist = 56.6e-6;
    b.peak_rabi = kTwoPi * peak_khz * 1e3;
    TransportSegment seg;
    seg.path = ConstantVelocityPath{-150e-6, 150e-6, 0.5};
    seg.beams = {b};
    IonProgram ion;
    ion.name = name;
    ion.sequence = {TransferPulse{}, seg, TransferPulse{}};
    return ion;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

}  // namespace

TEST_CASE("SPAM model maps ideal to observed probabilities") {
    SpamModel s;
    s.transfer = 0.008;
    CHECK(apply_spam(1.0, s, 2) == doctest::Approx(0.992 * 0.992));
    CHECK(apply_spam(0.0, s, 2) == doctest::Approx(0.0));
    s.dark = 0.01;
    s.bright = 0.02;
    s.prep = 0.003;
    const double amp = (1.0 - 0.03) * 0.997 * std::pow(0.992, 3);
    CHECK(apply_spam(0.4, s, 3) == doctest::Approx(0.01 + amp * 0.4));
    CHECK(apply_spam(1.0, s) == doctest::Approx(0.01 + (1.0 - 0.03) * 0.997 * 0.992 * 0.992));
    CHECK_THROWS_AS(apply_spam(1.2, s), InvalidArgument);
    s.transfer = 0.7;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("projection noise") {
    CHECK(projection_sigma(0.5, 100) == doctest::Approx(0.05));
    // Clamped away from 0 and 1.
    CHECK(projection_sigma(0.0, 100) == doctest::Approx(std::sqrt(0.005 * 0.995 / 100)));
    CHECK(projection_sigma(1.0, 100) == doctest::Approx(projection_sigma(0.0, 100)));
    CHECK_THROWS_AS(projection_sigma(0.5, 0), InvalidArgument);

    auto rng = point_stream(1, 0, 0, 0);
    double sum = 0.0, sum2 = 0.0;
    const int trials = 4000;
    for (int i = 0; i < trials; ++i) {
        const auto c = sample_counts(0.3, 350, rng);
        sum += c.p_hat;
        sum2 += c.p_hat * c.p_hat;
    }
    const double mean = sum / trials;
    const double sd = std::sqrt(sum2 / trials - mean * mean);
    CHECK(mean == doctest::Approx(0.3).epsilon(0.01));
    CHECK(sd == doctest::Approx(std::sqrt(0.3 * 0.7 / 350)).epsilon(0.05));
}

TEST_CASE("point streams are keyed and reproducible") {
    auto a = point_stream(7, 1, 2, 3);
    auto b = point_stream(7, 1, 2, 3);
    CHECK(a() == b());
    CHECK(point_stream(7, 1, 2, 3)() != point_stream(7, 1, 2, 4)());
    CHECK(point_stream(7, 1, 2, 3)() != point_stream(7, 1, 3, 3)());
    CHECK(point_stream(7, 1, 2, 3)() != point_stream(7, 0, 2, 3)());
    CHECK(point_stream(7, 1, 2, 3)() != point_stream(8, 1, 2, 3)());
}

TEST_CASE("scan results do not depend on the thread count") {
    const std::vector<IonProgram> ions{transit_program("a", 10.0), transit_program("b", 6.0)};
    ScanSpec spec;
    spec.grid = linspace(0.0, 600e-6, 31);
    spec.shots = 200;
    MeasurementSetup setup;
    setup.seed = 99;
    setup.threads = 1;
    const auto one = run_scan(ions, spec, setup);
    setup.threads = 4;
    const auto four = run_scan(ions, spec, setup);
    REQUIRE(one.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        REQUIRE(one[i].points.size() == 31);
        for (std::size_t k = 0; k < 31; ++k) {
            CHECK(one[i].points[k].p_hat == four[i].points[k].p_hat);
            CHECK(one[i].points[k].sigma == four[i].points[k].sigma);
        }
    }
    CHECK(one[0].label == "a");
    CHECK(one[0].variable == "t_off");
}

TEST_CASE("noiseless scans report the SPAM-adjusted expectation") {
    const std::vector<IonProgram> ions{transit_program("a", 10.0)};
    ScanSpec spec;
    spec.grid = {0.0, 600e-6};
    spec.noiseless = true;
    spec.shots = 100;
    MeasurementSetup setup;
    const auto r = run_scan(ions, spec, setup).front();
    CHECK(r.points[0].p_hat == doctest::Approx(0.992 * 0.992));  // beam off from the start
    CHECK(r.points[0].p_hat == r.points[0].p_obs);
    CHECK(r.points[0].sigma == doctest::Approx(projection_sigma(r.points[0].p_obs, 100)));
}

TEST_CASE("phase and frequency scans touch the right element") {
    IonProgram ion;
    ion.name = "r";
    ion.sequence = {StaticPulse{kPi / 2.0, 0.0, 0.0, 0.0}, PhaseShift{0.0}, StaticPulse{kPi / 2.0, 0.0, 0.0, 0.0}};
    ScanSpec spec;
    spec.variable = ScanVariable::Phase;
    spec.grid = {0.0, kPi / 2.0, kPi};
    spec.noiseless = true;
    MeasurementSetup setup;
    setup.spam.transfer = 0.0;
    const std::vector<IonProgram> ions{ion};
    const auto r = run_scan(ions, spec, setup).front();
    CHECK(r.points[0].p_hat == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    CHECK(r.points[1].p_hat == doctest::Approx(0.5));
    CHECK(r.points[2].p_hat == doctest::Approx(1.0));

    spec.variable = ScanVariable::BeamOffTime;
    CHECK_THROWS_AS(run_scan(ions, spec, setup), InvalidArgument);
}

TEST_CASE("scan CSV round trip") {
    ScanResult s;
    s.variable = "frequency";
    s.unit = "Hz";
    s.label = "ion1";
    s.seed = 12;
    s.points = {{-1e3, 0.25, 0.02, 350, 0.25}, {0.0, 0.5, 0.03, 350, 0.5}, {1e3, 1.0 / 3.0, 0.025, 350, 1.0 / 3.0}};
    const auto path = std::filesystem::temp_directory_path() / "tgates_scan_test.csv";
    write_scan_csv(s, path, {"extra"});
    const auto r = read_scan_csv(path);
    CHECK(r.variable == "frequency");
    CHECK(r.unit == "Hz");
    CHECK(r.label == "ion1");
    CHECK(r.seed == 12);
    REQUIRE(r.points.size() == 3);
    CHECK(r.points[2].p_hat == s.points[2].p_hat);
    CHECK(r.points[1].n == 350);
    std::filesystem::remove(path);
}
