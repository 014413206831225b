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

#include "tgates/fitting.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

using namespace tgates;

namespace {

constexpr double kTwoPiF = 6.283185307179586;

struct Case {
    std::string model;
    std::vector<double> truth;
    double x_lo, x_hi;
};

std::vector<Case> cases() {
    return {{"transit_rabi", {kTwoPiF * 5669.0, 7753.0, 300e-6, 0.95, 0.02}, 0.0, 600e-6},
            {"sinusoid", {0.97, 0.4, 0.5}, 0.0, kTwoPiF},
            {"erf_step", {1.0, 0.978, 2e4, 150e-6}, 0.0, 300e-6},
            {"gaussian", {0.8, 3e3, 800.0, 0.05}, -2e3, 8e3}};
}

std::vector<double> grid(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::vector<double> evaluate(const FitModel& m, const std::vector<double>& p, const std::vector<double>& x) {
    std::vector<double> y;
    for (double xi : x) y.push_back(m.evaluate(p, xi));
    return y;
}

}  // namespace

TEST_CASE("registry") {
    CHECK(model_registry().size() == 4);
    CHECK(find_model("gaussian").parameters == std::vector<std::string>{"A", "x0", "sigma_g", "c"});
    CHECK(find_model("transit_rabi").parameters == std::vector<std::string>{"Omega0", "chi", "t0", "a", "c"});
    CHECK_THROWS_AS(find_model("lorentzian"), InvalidArgument);
}

TEST_CASE("analytic gradients agree with finite differences") {
    for (const auto& c : cases()) {
        const FitModel& m = find_model(c.model);
        REQUIRE(m.gradient);
        std::vector<double> g(m.size());
        for (double x : grid(c.x_lo, c.x_hi, 7)) {
            m.gradient(c.truth, x, g);
            for (std::size_t j = 0; j < m.size(); ++j) {
                auto p = c.truth;
                const double h = 1e-6 * std::max(std::abs(p[j]), 1e-6);
                p[j] += h;
                const double up = m.evaluate(p, x);
                p[j] -= 2.0 * h;
                const double dn = m.evaluate(p, x);
                CHECK(g[j] == doctest::Approx((up - dn) / (2.0 * h)).epsilon(1e-5).scale(1e-6));
            }
        }
    }
}

TEST_CASE("noiseless data are recovered exactly from the automatic guess") {
    for (const auto& c : cases()) {
        CAPTURE(c.model);
        const FitModel& m = find_model(c.model);
        const auto x = grid(c.x_lo, c.x_hi, 61);
        const auto y = evaluate(m, c.truth, x);
        const std::vector<double> s(x.size(), 0.02);
        const auto guess = initial_guess(m, x, y);
        for (bool analytic : {true, false}) {
            FitOptions opt;
            opt.analytic_jacobian = analytic;
            const auto r = fit_curve(m, x, y, s, guess.values, opt);
            CHECK(r.converged);
            for (std::size_t j = 0; j < m.size(); ++j) {
                CHECK(r.values[j] == doctest::Approx(c.truth[j]).epsilon(1e-6));
                CHECK(std::isfinite(r.sigmas[j]));
            }
            CHECK(r.chi2 < 1e-12);
        }
    }
}

TEST_CASE("covariance matches the inverse normal matrix") {
    const FitModel& m = find_model("sinusoid");
    const auto x = grid(0.0, kTwoPiF, 41);
    const std::vector<double> truth{0.9, 1.1, 0.5};
    const auto y = evaluate(m, truth, x);
    const std::vector<double> s(x.size(), 0.01);
    const auto r = fit_curve(m, x, y, s, std::vector<double>{0.8, 1.0, 0.45});
    Eigen::MatrixXd j(x.size(), 3);
    std::vector<double> g(3);
    for (std::size_t i = 0; i < x.size(); ++i) {
        m.gradient(truth, x[i], g);
        for (int k = 0; k < 3; ++k) j(static_cast<Eigen::Index>(i), k) = g[k] / 0.01;
    }
    const Eigen::MatrixXd cov = (j.transpose() * j).inverse();
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) CHECK(r.covariance(a, b) == doctest::Approx(cov(a, b)).epsilon(1e-8));
    }
    CHECK(r.sigma("A") == doctest::Approx(std::sqrt(cov(0, 0))));
}

TEST_CASE("canonical parameter signs") {
    const FitModel& m = find_model("sinusoid");
    const auto x = grid(0.0, kTwoPiF, 41);
    const auto y = evaluate(m, {0.9, 1.1, 0.5}, x);
    const std::vector<double> s(x.size(), 0.01);
    const auto r = fit_curve(m, x, y, s, std::vector<double>{-0.8, 1.1 + 3.0, 0.45});
    CHECK(r.value("A") == doctest::Approx(0.9));
    CHECK(r.value("phi0") == doctest::Approx(1.1));
}

TEST_CASE("a vanishing amplitude marks the phase degenerate") {
    const FitModel& m = find_model("sinusoid");
    const auto x = grid(0.0, kTwoPiF, 41);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.02);
    std::vector<double> y;
    for (std::size_t i = 0; i < x.size(); ++i) y.push_back(0.5 + noise(rng));
    const std::vector<double> s(x.size(), 0.02);
    const auto r = fit_curve(m, x, y, s, initial_guess(m, x, y).values);
    CHECK(r.degenerate == std::vector<std::string>{"phi0"});
}

TEST_CASE("unidentifiable parameters raise a rank-deficiency error") {
    const FitModel& m = find_model("gaussian");
    // Every point far in the tail: the line parameters do not affect the data.
    const auto x = grid(1e6, 2e6, 21);
    const std::vector<double> y(x.size(), 0.3), s(x.size(), 0.01);
    try {
        fit_curve(m, x, y, s, std::vector<double>{0.5, 0.0, 10.0, 0.3});
        FAIL("expected RankDeficiencyError");
    } catch (const RankDeficiencyError& e) {
        CHECK(!e.parameters().empty());
    }
}

TEST_CASE("input validation") {
    const FitModel& m = find_model("sinusoid");
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0}, y{0.1, 0.2, 0.3, 0.4};
    CHECK_THROWS_AS(fit_curve(m, x, y, std::vector<double>{0.1, 0.1, 0.0, 0.1}, std::vector<double>{1, 0, 0}),
                    InvalidArgument);
    CHECK_THROWS_AS(fit_curve(m, x, y, std::vector<double>{0.1, 0.1, 0.1}, std::vector<double>{1, 0, 0}),
                    InvalidArgument);
    CHECK_THROWS_AS(fit_curve(m, std::vector<double>{0.0, 1.0}, std::vector<double>{0.1, 0.2},
                              std::vector<double>{0.1, 0.1}, std::vector<double>{1, 0, 0}),
                    InvalidArgument);
}

TEST_CASE("fit result JSON") {
    const FitModel& m = find_model("erf_step");
    const auto x = grid(0.0, 300e-6, 41);
    const auto y = evaluate(m, {1.0, 0.978, 2e4, 150e-6}, x);
    const std::vector<double> s(x.size(), 0.01);
    const auto r = fit_curve(m, x, y, s, initial_guess(m, x, y).values);
    const auto j = fit_result_json(r);
    CHECK(j["model"] == "erf_step");
    CHECK(j["parameters"]["b"]["value"].get<double>() == doctest::Approx(0.978));
    CHECK(j["covariance"].size() == 4);
    CHECK(j["converged"] == true);
}
