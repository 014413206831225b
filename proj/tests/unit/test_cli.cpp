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

#include "doctest.h"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kConfigs = std::string(TGATES_SOURCE_DIR) + "/configs/";

int run(const std::string& args) {
    const std::string cmd = std::string(TGATES_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::current_path() / "cli_out" / name;
    fs::remove_all(p);
    fs::create_directories(p.parent_path());
    return p;
}

}  // namespace

TEST_CASE("rabi runs are byte-identical for the same seed and any thread count") {
    const auto a = scratch("rabi_a"), b = scratch("rabi_b");
    REQUIRE(run("rabi --config " + kConfigs + "rabi.json --seed 7 --out " + a.string()) == 0);
    REQUIRE(run("rabi --config " + kConfigs + "rabi.json --seed 7 --threads 3 --out " + b.string()) == 0);
    CHECK(slurp(a / "t_off_ion.csv") == slurp(b / "t_off_ion.csv"));
    CHECK(slurp(a / "t_off_ion_fit.json") == slurp(b / "t_off_ion_fit.json"));
    const auto c = scratch("rabi_c");
    REQUIRE(run("rabi --config " + kConfigs + "rabi.json --seed 8 --out " + c.string()) == 0);
    CHECK(slurp(a / "t_off_ion.csv") != slurp(c / "t_off_ion.csv"));
}

TEST_CASE("every output carries the manifest reference") {
    const auto out = scratch("ramsey");
    REQUIRE(run("ramsey --config " + kConfigs + "ramsey.json --out " + out.string()) == 0);
    const auto m = read_json(out / "manifest.json");
    for (const char* key : {"config_sha256", "seed", "tool_version", "timestamp"}) CHECK(m.contains(key));
    CHECK(m["config_sha256"].get<std::string>().size() == 64);
    CHECK(m["seed"] == 7);
    const std::string csv = slurp(out / "phase_ion.csv");
    CHECK(csv.find("config_sha256=" + m["config_sha256"].get<std::string>()) != std::string::npos);
    const auto fit = read_json(out / "phase_ion_fit.json");
    CHECK(fit["manifest"]["config_sha256"] == m["config_sha256"]);
    CHECK(fit["model"] == "sinusoid");
}

TEST_CASE("parallel writes the four scans") {
    const auto out = scratch("parallel");
    REQUIRE(run("parallel --config " + kConfigs + "parallel.json --out " + out.string()) == 0);
    for (const char* f : {"t_off_ion1.csv", "t_off_ion2.csv", "frequency_ion1.csv", "frequency_ion2.csv"}) {
        CHECK(fs::exists(out / f));
    }
    CHECK(fs::exists(out / "report.json"));
}

TEST_CASE("calibrate velocity reports the solved velocity") {
    const auto out = scratch("velocity");
    REQUIRE(run("calibrate velocity --config " + kConfigs + "calibrate.json --beam B2 --theta pi/2 --out " +
                out.string()) == 0);
    const auto r = read_json(out / "velocity_report.json");
    CHECK(r["value"].get<double>() == doctest::Approx(9.131682).epsilon(1e-6));
    CHECK(r["unit"] == "m/s");
    CHECK(r["converged"] == true);
}

TEST_CASE("synth and fit subcommands") {
    const auto out = scratch("synth");
    REQUIRE(run("synth --config " + kConfigs + "synth.json --out " + out.string()) == 0);
    const auto r = read_json(out / "synth_report.json");
    CHECK(r["limits_hold"] == true);
    CHECK(r["max_position_error_m"].get<double>() < 1e-6);
    CHECK(fs::exists(out / "waveform.csv"));

    const auto rabi = scratch("rabi_fit_src");
    REQUIRE(run("rabi --config " + kConfigs + "rabi.json --out " + rabi.string()) == 0);
    const auto fit = scratch("fit");
    REQUIRE(run("fit --input " + (rabi / "t_off_ion.csv").string() + " --model transit_rabi --out " + fit.string()) ==
            0);
    const auto a = read_json(rabi / "t_off_ion_fit.json");
    const auto b = read_json(fit / "t_off_ion_fit.json");
    CHECK(a["parameters"] == b["parameters"]);
}

TEST_CASE("usage and config errors exit with status 2") {
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("rabi --config " + kConfigs + "rabi.json --bogus") == 2);
    CHECK(run("rabi") == 2);
    CHECK(run("rabi --config /nonexistent.json") == 2);
    // A config without the scan the subcommand needs.
    CHECK(run("ramsey --config " + kConfigs + "rabi.json --out " + scratch("bad").string()) == 2);
    const auto bad = fs::current_path() / "cli_out" / "bad.json";
    std::ofstream(bad) << R"({"beams": {"B": {"waist_um": -1}}})";
    CHECK(run("rabi --config " + bad.string()) == 2);
    CHECK(run("fit --input " + kConfigs + "rabi.json --model sinusoid") == 2);
}

TEST_CASE("numerical failures exit with status 3") {
    // No velocity in the bracket reaches the requested area.
    CHECK(run("calibrate velocity --config " + kConfigs + "calibrate.json --beam B2 --theta pi/2 --v-lo 50 --v-hi 60 " +
              "--out " + scratch("bracket").string()) == 3);
}
