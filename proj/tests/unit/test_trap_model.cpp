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
#include "tgates/trap_model.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace tgates;

namespace {

const ElectrodeBasis& basis() {
    static const ElectrodeBasis b = make_surrogate_basis(30, 120e-6, 120e-6, 1800e-6, 1e-6);
    return b;
}

// Electrode centres of the surrogate basis, symmetric about zero.
double electrode_center(std::size_t i) { return (static_cast<double>(i) - 14.5) * 120e-6; }

}  // namespace

TEST_CASE("surrogate basis layout") {
    const auto& b = basis();
    CHECK(b.n_electrodes() == 30);
    CHECK(b.n_channels() == 30);
    CHECK(b.grid_size() == 3601);
    CHECK(b.z_min() == doctest::Approx(-1800e-6));
    CHECK(b.z_max() == doctest::Approx(1800e-6));
    CHECK(b.derivative_mismatch() < 1e-4);
}

TEST_CASE("single electrode potential matches the Gaussian profile and its derivatives") {
    const auto& b = basis();
    std::vector<double> v(30, 0.0);
    v[10] = 2.5;
    const double zc = electrode_center(10);
    const double w = 120e-6;
    for (double z : {zc - 150e-6, zc - 37.3e-6, zc, zc + 0.5e-6, zc + 210.7e-6}) {
        const double u = (z - zc) / w;
        const double g = 2.5 * std::exp(-0.5 * u * u);
        const auto s = evaluate_potential(b, v, z);
        CHECK(s.value == doctest::Approx(g).epsilon(1e-9));
        CHECK(s.slope == doctest::Approx(-g * u / w).epsilon(1e-6).scale(2.5 / w));
        CHECK(s.curvature == doctest::Approx(g * (u * u - 1.0) / (w * w)).epsilon(1e-5).scale(2.5 / (w * w)));
    }
}

TEST_CASE("potential outside the grid is rejected") {
    std::vector<double> v(30, 0.0);
    CHECK_THROWS_AS(evaluate_potential(basis(), v, 2000e-6), OutOfRange);
}

TEST_CASE("negative electrode forms a well at its centre with the analytic frequency") {
    const auto& b = basis();
    const IonSpecies be = IonSpecies::beryllium9();
    std::vector<double> v(30, 0.0);
    v[12] = -1.0;
    const auto wells = find_wells(b, v, be, {-900e-6, 900e-6});
    REQUIRE(wells.size() == 1);
    const double zc = electrode_center(12);
    CHECK(std::abs(wells[0].position - zc) < 1e-9);
    // q Phi''(zc) = q / w^2 for V = -1 V
    const double omega = std::sqrt(be.charge / (120e-6 * 120e-6) / be.mass);
    CHECK(wells[0].omega == doctest::Approx(omega).epsilon(1e-4));
    CHECK(wells[0].depth > 0.9);
    CHECK(wells[0].depth <= 1.0);
}

TEST_CASE("two separated wells are found in position order") {
    const auto& b = basis();
    std::vector<double> v(30, 0.0);
    v[5] = -1.0;
    v[24] = -0.5;
    const auto wells = find_wells(b, v, IonSpecies::beryllium9(), {-1700e-6, 1700e-6});
    REQUIRE(wells.size() == 2);
    CHECK(wells[0].position < wells[1].position);
    CHECK(std::abs(wells[0].position - electrode_center(5)) < 1e-8);
    CHECK(std::abs(wells[1].position - electrode_center(24)) < 1e-8);
}

TEST_CASE("basis save and load round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "tgates_basis_test";
    std::filesystem::create_directories(dir);
    const ElectrodeBasis small = make_surrogate_basis(6, 100e-6, 80e-6, 400e-6, 2e-6);
    save_basis(small, dir / "phi.csv", dir / "dphi.csv");
    const ElectrodeBasis loaded = load_basis(dir / "phi.csv", dir / "dphi.csv");
    REQUIRE(loaded.n_electrodes() == small.n_electrodes());
    REQUIRE(loaded.grid_size() == small.grid_size());
    for (std::size_t i = 0; i < small.phi().size(); ++i) CHECK(loaded.phi()[i] == small.phi()[i]);
    for (std::size_t i = 0; i < small.d2phi().size(); ++i) CHECK(loaded.d2phi()[i] == small.d2phi()[i]);

    // Without the derivative file the central differences stay close to the analytic values.
    const ElectrodeBasis diffed = load_basis(dir / "phi.csv");
    std::vector<double> v(6, 1.0);
    const auto a = evaluate_potential(small, v, 13e-6);
    const auto d = evaluate_potential(diffed, v, 13e-6);
    CHECK(d.slope == doctest::Approx(a.slope).epsilon(1e-3).scale(1e3));
    std::filesystem::remove_all(dir);
}

TEST_CASE("channel map wires electrodes together") {
    const ElectrodeBasis src = make_surrogate_basis(4, 100e-6, 80e-6, 300e-6, 2e-6);
    const std::vector<std::size_t> map{0, 1, 1, 0};
    const ElectrodeBasis b({src.grid().begin(), src.grid().end()}, {src.phi().begin(), src.phi().end()},
                           {src.dphi().begin(), src.dphi().end()}, {src.d2phi().begin(), src.d2phi().end()}, 4, map);
    CHECK(b.n_channels() == 2);
    const std::vector<double> ch{1.0, -2.0};
    const auto e = b.electrode_voltages(ch);
    CHECK(e == std::vector<double>{1.0, -2.0, -2.0, 1.0});
    CHECK_THROWS_AS(b.check_channel_bound(1), InvalidArgument);
    CHECK_NOTHROW(b.check_channel_bound(2));
}

TEST_CASE("malformed basis files name the row and column") {
    const auto path = std::filesystem::temp_directory_path() / "tgates_bad_basis.csv";
    {
        std::ofstream out(path);
        out << "z,phi_1\n0,1\n1e-6,abc\n";
    }
    try {
        load_basis(path);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
    std::filesystem::remove(path);
}
