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
#include "tgates/experiments.hpp"

#include "doctest.h"

#include <cmath>
#include <string>

using namespace tgates;

namespace {

Scenario config(const std::string& name) {
    return load_scenario(std::string(TGATES_SOURCE_DIR) + "/configs/" + name + ".json");
}

ScanResult synthetic_line(double x0, double width, double tail) {
    ScanResult s;
    for (int i = 0; i <= 400; ++i) {
        const double x = -40e3 + 200.0 * i;
        const double u = (x - x0) / width;
        // A Gaussian dip plus an optional one-sided exponential tail towards larger x.
        double d = std::exp(-0.5 * u * u);
        if (tail > 0.0 && u > 0.0) d += 0.3 * std::exp(-u / tail) * (1.0 - std::exp(-4.0 * u));
        s.points.push_back({x, 0.95 - 0.9 * d, 0.01, 350, 0.95 - 0.9 * d});
    }
    return s;
}

}  // namespace

TEST_CASE("parallel scenario resolution calibrates per-ion velocities") {
    const Scenario s = config("parallel");
    const ResolvedScenario r = resolve_scenario(s);
    CHECK(r.well_velocity.at("w1") == doctest::Approx(6.197739).epsilon(1e-6));
    CHECK(r.well_velocity.at("w2") == doctest::Approx(4.565841).epsilon(1e-6));
    REQUIRE(r.transport);
    CHECK(r.transport->synthesis.meets(1e-6, 0.01));
    CHECK(r.ions.size() == 2);
    CHECK(r.calibrations.size() == 2);
    const auto& traj = r.transport->realized.at("w1");
    CHECK(traj.position.front() == doctest::Approx(300e-6).epsilon(1e-3));
    CHECK(traj.position.back() == doctest::Approx(900e-6).epsilon(1e-3));
}

TEST_CASE("intensity calibration sets the peak Rabi frequency") {
    const Scenario s = config("ramsey");
    const ResolvedScenario r = resolve_scenario(s);
    CHECK(pulse_area(r.beams.at("R"), 7.0) == doctest::Approx(kPi / 2.0).epsilon(1e-10));
    CHECK(!r.transport);
}

TEST_CASE("experiments are reproducible") {
    const Scenario s = config("rabi");
    const auto a = run_experiment(s, 3, 1);
    const auto b = run_experiment(s, 3, 2);
    REQUIRE(a.scans.size() == 1);
    const auto& pa = a.scans[0].results[0].points;
    const auto& pb = b.scans[0].results[0].points;
    REQUIRE(pa.size() == pb.size());
    for (std::size_t k = 0; k < pa.size(); ++k) CHECK(pa[k].p_hat == pb[k].p_hat);
    CHECK(a.scans[0].fits[0]->values == b.scans[0].fits[0]->values);
}

TEST_CASE("velocity ripple") {
    RealizedTrajectory t;
    for (int k = 0; k < 100; ++k) {
        t.times.push_back(k * 1e-6);
        t.velocity.push_back(5.0 + (k % 2 == 0 ? 0.1 : -0.1));
        t.position.push_back(0.0);
    }
    CHECK(velocity_ripple(t, 0.0, 1.0) == doctest::Approx(0.1));
    CHECK_THROWS_AS(velocity_ripple(t, 2.0, 3.0), InvalidArgument);
}

TEST_CASE("lineshape skewness") {
    const FitModel& g = find_model("gaussian");
    auto fit = [&](const ScanResult& s) {
        return fit_curve(g, s.x(), s.y(), s.sigma(), initial_guess(g, s.x(), s.y()).values);
    };
    const auto sym = synthetic_line(1.3e3, 5e3, 0.0);
    CHECK(std::abs(lineshape_skewness(sym, fit(sym))) < 1e-3);
    const auto right = synthetic_line(1.3e3, 5e3, 3.0);
    CHECK(lineshape_skewness(right, fit(right)) > 0.05);
    // Mirror image about zero.
    ScanResult left = right;
    for (auto& p : left.points) p.x = -p.x;
    CHECK(lineshape_skewness(left, fit(left)) == doctest::Approx(-lineshape_skewness(right, fit(right))));
}

TEST_CASE("unknown references fail during resolution") {
    Scenario s = config("parallel");
    s.wells.clear();
    CHECK_THROWS_AS(resolve_scenario(s), ConfigError);
}
