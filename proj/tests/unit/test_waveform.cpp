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
#include "tgates/waveform.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

using namespace tgates;

namespace {

constexpr double kOmega = 2.0 * 3.14159265358979323846 * 2e6;

const ElectrodeBasis& basis() {
    static const ElectrodeBasis b = make_surrogate_basis(30, 120e-6, 120e-6, 1800e-6, 1e-6);
    return b;
}

}  // namespace

TEST_CASE("trajectory plan timing and endpoints") {
    const auto p = plan_trajectory(-250e-6, 250e-6, 7.0, kOmega, 0.1, 1e6, 5e-6);
    const double duration = 500e-6 / 7.0 + 5e-6;
    CHECK(p.n_wells() == 1);
    CHECK(p.times.back() == doctest::Approx(std::ceil(duration * 1e6 - 1e-9) * 1e-6).epsilon(1e-9));
    CHECK(p.positions[0].front() == doctest::Approx(-250e-6));
    CHECK(p.positions[0].back() == doctest::Approx(250e-6));
    // Cruise samples advance at the planned velocity.
    const std::size_t mid = p.n_samples() / 2;
    CHECK((p.positions[0][mid + 1] - p.positions[0][mid]) / p.dt() == doctest::Approx(7.0).epsilon(1e-9));
    for (std::size_t k = 1; k < p.n_samples(); ++k) CHECK(p.positions[0][k] >= p.positions[0][k - 1]);
}

TEST_CASE("trajectory plan rejects bad input") {
    CHECK_THROWS_AS(plan_trajectory(0.0, 100e-6, -1.0, kOmega, 0.1, 1e6, 5e-6), InvalidArgument);
    CHECK_THROWS_AS(plan_trajectory(0.0, 100e-6, 1.0, kOmega, 0.1, 0.0, 5e-6), InvalidArgument);
    const auto a = plan_trajectory(-300e-6, 0.0, 5.0, kOmega, 0.1, 1e6, 5e-6);
    const auto b = plan_trajectory(-280e-6, 20e-6, 5.0, kOmega, 0.1, 1e6, 5e-6);
    const std::vector<TrajectoryPlan> plans{a, b};
    CHECK_THROWS_AS(combine_plans(plans).validate(), InvalidArgument);
}

TEST_CASE("combined plans hold the shorter well at its end point") {
    const auto a = plan_trajectory(-900e-6, -300e-6, 4.7, kOmega, 0.1, 1e6, 10e-6);
    const auto b = plan_trajectory(300e-6, 900e-6, 10.7, kOmega, 0.1, 1e6, 10e-6);
    const std::vector<TrajectoryPlan> plans{b, a};
    const auto c = combine_plans(plans);
    CHECK(c.n_wells() == 2);
    CHECK(c.n_samples() == std::max(a.n_samples(), b.n_samples()));
    CHECK(c.positions[0].front() == doctest::Approx(-900e-6));  // sorted by start position
    CHECK(c.positions[1].back() == doctest::Approx(900e-6));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("single-well synthesis realizes the plan") {
    const auto plan = plan_trajectory(-250e-6, 250e-6, 7.0, kOmega, 0.1, 1e6, 5e-6);
    const auto species = IonSpecies::beryllium9();
    const auto r = synthesize_waveform(basis(), plan, species);
    CHECK(r.waveform.n_samples() == plan.n_samples());
    CHECK(r.waveform.satisfies_limits());
    CHECK(r.max_position_error() < 1e-6);
    CHECK(r.max_omega_error() < 0.01);
    CHECK(r.meets(1e-6, 0.01));

    const auto traj = realized_trajectory(basis(), r.waveform, species, plan.positions[0].front());
    REQUIRE(traj.size() == plan.n_samples());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(std::abs(traj.position[k] - plan.positions[0][k]) < 1e-6);
        CHECK(std::abs(traj.omega[k] / kOmega - 1.0) < 0.01);
    }
}

TEST_CASE("tight voltage limits are respected exactly") {
    const auto plan = plan_trajectory(-100e-6, 100e-6, 4.0, kOmega, 0.1, 1e6, 5e-6);
    SynthesisOptions opt;
    opt.vmax = 2.0;
    opt.slew = 0.2e6;
    const auto r = synthesize_waveform(basis(), plan, IonSpecies::beryllium9(), opt);
    const auto& s = r.waveform.samples;
    const std::size_t n = r.waveform.n_channels;
    for (double v : s) CHECK(std::abs(v) <= 2.0);
    for (std::size_t k = 1; k < r.waveform.n_samples(); ++k) {
        for (std::size_t c = 0; c < n; ++c) CHECK(std::abs(s[k * n + c] - s[(k - 1) * n + c]) <= 0.2 + 1e-12);
    }
}

TEST_CASE("first-order filter step response") {
    VoltageWaveform w;
    w.sample_rate = 1e6;
    w.n_channels = 2;
    const std::size_t n = 40;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = k < 10 ? 0.0 : 1.0;
        w.samples.push_back(v);
        w.samples.push_back(-2.0 * v);
    }
    const auto f = apply_filter(w, FilterModel::uniform(50e3));
    const double pole = std::exp(-2.0 * 3.14159265358979323846 * 50e3 / 1e6);
    for (std::size_t k = 0; k < n; ++k) {
        const double expect = k < 10 ? 0.0 : 1.0 - std::pow(pole, static_cast<double>(k - 9));
        CHECK(f.samples[2 * k] == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
        CHECK(f.samples[2 * k + 1] == doctest::Approx(-2.0 * expect).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("filter keeps a constant waveform and cascades orders") {
    const std::vector<double> v{1.0, -0.5, 3.0};
    const auto w = constant_waveform(v, 25, 1e6);
    const auto f = apply_filter(w, FilterModel::uniform(20e3, 3));
    for (std::size_t k = 0; k < 25; ++k) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(f.samples[k * 3 + c] == doctest::Approx(v[c]));
    }
    FilterModel bad;
    bad.cutoff = {-1.0};
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("waveform CSV round trip") {
    const auto path = std::filesystem::temp_directory_path() / "tgates_waveform_test.csv";
    VoltageWaveform w;
    w.sample_rate = 2e6;
    w.n_channels = 3;
    w.samples = {0.1, -0.2, 1.0 / 3.0, 0.15, -0.25, 0.3, 0.2, -0.3, 0.31};
    write_waveform_csv(w, path, {"note"});
    const auto r = read_waveform_csv(path);
    CHECK(r.n_channels == 3);
    CHECK(r.sample_rate == doctest::Approx(2e6));
    CHECK(r.samples == w.samples);
    std::filesystem::remove(path);
}

TEST_CASE("static well conserves energy in classical tracking") {
    const auto species = IonSpecies::beryllium9();
    const auto plan = plan_static(0.0, 1e-6, kOmega, 0.1, 1e6);
    const auto r = synthesize_waveform(basis(), plan, species);
    const auto w = constant_waveform(r.waveform.row(0), 50, 1e6);
    const auto track = track_classical_ion(basis(), w, species, 0.2e-6, 0.0);
    CHECK(track.max_energy_drift < 1e-6);
    CHECK(track.max_deviation < 0.3e-6);
}
