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
#include "tgates/scenario.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

using namespace tgates;
using nlohmann::json;

namespace {

std::string config_error(const json& doc) {
    try {
        parse_scenario(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

json minimal() {
    return json::parse(R"({
      "beams": {"B": {"center_um": 10, "waist_um": 50, "peak_rabi_khz": 20}},
      "ions": [{"name": "a", "sequence": [
        {"transport": {"beam": "B", "path": {"start_um": -100, "end_um": 100, "velocity_m_s": 2}}}]}],
      "scans": [{"variable": "t_off", "start": 0, "stop": 100, "points": 11}]
    })");
}

}  // namespace

TEST_CASE("pi expressions") {
    CHECK(parse_pi_expression("pi/2") == doctest::Approx(kPi / 2.0));
    CHECK(parse_pi_expression("3*pi/4") == doctest::Approx(0.75 * kPi));
    CHECK(parse_pi_expression("2pi") == doctest::Approx(kTwoPi));
    CHECK(parse_pi_expression(" -(1 + 2) * 0.5 ") == doctest::Approx(-1.5));
    CHECK(parse_pi_expression("1e-3") == doctest::Approx(1e-3));
    CHECK_THROWS_AS(parse_pi_expression("pi/"), ConfigError);
    CHECK_THROWS_AS(parse_pi_expression("1/0"), ConfigError);
    CHECK_THROWS_AS(parse_pi_expression("(1"), ConfigError);
    CHECK_THROWS_AS(parse_pi_expression("2 x"), ConfigError);
}

TEST_CASE("units are converted to SI on ingest") {
    auto doc = minimal();
    doc["beams"]["B"]["angle_deg"] = 30;
    doc["beams"]["B"]["stark_offset_khz"] = 1.3;
    doc["wells"] = json::parse(R"([{"name": "w", "start_um": -300, "end_um": 300, "velocity_m_s": 5, "omega_mhz": 1.5,
                                    "ramp_us": 4}])");
    doc["filter"] = json::parse(R"({"cutoff_khz": 50})");
    const Scenario s = parse_scenario(doc);
    const auto& g = s.beams.at("B").geometry;
    CHECK(g.center == doctest::Approx(10e-6));
    CHECK(g.waist == doctest::Approx(50e-6));
    CHECK(g.peak_rabi == doctest::Approx(kTwoPi * 20e3));
    CHECK(g.angle == doctest::Approx(kPi / 6.0));
    CHECK(g.stark_offset == doctest::Approx(kTwoPi * 1.3e3));
    CHECK(s.wells[0].omega == doctest::Approx(kTwoPi * 1.5e6));
    CHECK(s.wells[0].ramp == doctest::Approx(4e-6));
    CHECK(s.filter->cutoff == std::vector<double>{50e3});
    REQUIRE(s.scans.size() == 1);
    CHECK(s.scans[0].grid.size() == 11);
    CHECK(s.scans[0].grid.back() == doctest::Approx(100e-6));
    const auto& t = std::get<TransportSpec>(s.ions[0].sequence[0]);
    CHECK(std::get<ConstantPathSpec>(t.path).z_end == doctest::Approx(100e-6));
}

TEST_CASE("angles and scan values accept pi expressions") {
    auto doc = minimal();
    doc["beams"]["B"]["angle_rad"] = "pi/3";
    doc["scans"] = json::parse(R"([{"variable": "phase", "values": [0, "pi/2", "pi"], "fit": "sinusoid"}])");
    doc["ions"][0]["sequence"].push_back(json::parse(R"({"phase_shift": 0})"));
    const Scenario s = parse_scenario(doc);
    CHECK(s.beams.at("B").geometry.angle == doctest::Approx(kPi / 3.0));
    CHECK(s.scans[0].grid[1] == doctest::Approx(kPi / 2.0));
    CHECK(s.scans[0].fit == "sinusoid");
}

TEST_CASE("errors name the offending key") {
    auto doc = minimal();
    doc["beams"]["B"]["waist_um"] = -5;
    CHECK(config_error(doc).find("beams.B.waist_um") != std::string::npos);

    doc = minimal();
    doc["beams"]["B"]["colour"] = "blue";
    CHECK(config_error(doc).find("unknown key 'colour'") != std::string::npos);

    doc = minimal();
    doc["ions"][0]["sequence"][0]["transport"]["beam"] = "C";
    CHECK(config_error(doc).find("unknown beam 'C'") != std::string::npos);

    doc = minimal();
    doc["scans"][0]["fit"] = "lorentzian";
    CHECK(!config_error(doc).empty());

    doc = minimal();
    doc["scans"][0]["points"] = 1.5;
    CHECK(config_error(doc).find("scans[0].points") != std::string::npos);

    doc = minimal();
    doc["ions"][0]["sequence"][0]["transport"]["path"].erase("velocity_m_s");
    CHECK(config_error(doc).find("velocity_m_s") != std::string::npos);

    doc = minimal();
    doc["beams"]["R"] = json::parse(R"({"retro_of": "Q"})");
    CHECK(config_error(doc).find("retro_of") != std::string::npos);

    doc = minimal();
    doc["spam"] = json::parse(R"({"transfer": 0.9})");
    CHECK(config_error(doc).find("spam") != std::string::npos);
}

TEST_CASE("calibration blocks") {
    auto doc = minimal();
    doc["beams"]["B"].erase("peak_rabi_khz");
    doc["beams"]["B"]["calibrate"] = json::parse(R"({"theta": "pi/2", "velocity_m_s": 7})");
    doc["ions"][0]["sequence"][0]["transport"]["path"] =
        json::parse(R"({"start_um": -100, "end_um": 100, "calibrate": {"beam": "B", "theta": "pi"}})");
    const Scenario s = parse_scenario(doc);
    CHECK(s.beams.at("B").calibration->theta == doctest::Approx(kPi / 2.0));
    const auto& path = std::get<ConstantPathSpec>(std::get<TransportSpec>(s.ions[0].sequence[0]).path);
    CHECK(path.calibration->theta == doctest::Approx(kPi));
    CHECK(!path.velocity);
}

TEST_CASE("shipped configs parse") {
    for (const char* name : {"rabi", "ramsey", "parallel", "synth", "calibrate", "skew"}) {
        CAPTURE(name);
        const Scenario s = load_scenario(std::string(TGATES_SOURCE_DIR) + "/configs/" + name + ".json");
        CHECK(!s.name.empty());
    }
}

TEST_CASE("missing and malformed files") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/file.json"), ConfigError);
    const auto path = std::filesystem::temp_directory_path() / "tgates_bad_config.json";
    {
        std::ofstream out(path);
        out << "{ \"beams\": ";
    }
    CHECK_THROWS_AS(load_scenario(path), ConfigError);
    std::filesystem::remove(path);
}
