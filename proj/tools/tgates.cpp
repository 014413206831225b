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

// Command-line front end: runs scenario configs and writes CSV/JSON artifacts.

#include "tgates/calibration.hpp"
#include "tgates/errors.hpp"
#include "tgates/experiments.hpp"
#include "tgates/fitting.hpp"
#include "tgates/scenario.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tgates;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::optional<int> threads;
    bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool config_required = true) {
    auto* c = cmd->add_option("--config", o.config, "Scenario file (JSON)");
    if (config_required) c->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Random seed (default: the config's seed)");
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads (default: the config's threads)");
    cmd->add_flag("--verbose,-v", o.verbose, "Print fit and calibration details");
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("SHA-256 computation failed");
    }
    EVP_MD_CTX_free(ctx);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Collects outputs and stamps each with the run's provenance.
class Run {
  public:
    Run(std::string command, const fs::path& input, std::uint64_t seed, const fs::path& out)
        : command_(std::move(command)), hash_(sha256_hex(read_file(input))), seed_(seed), out_(out) {
        fs::create_directories(out_);
    }

    std::vector<std::string> comments() const {
        return {"manifest=manifest.json config_sha256=" + hash_ + " seed=" + std::to_string(seed_) +
                " tool_version=" TGATES_VERSION};
    }

    json stamp() const { return {{"file", "manifest.json"}, {"config_sha256", hash_}, {"seed", seed_}, {"tool_version", TGATES_VERSION}}; }

    fs::path path(const std::string& name) {
        outputs_.push_back(name);
        return out_ / name;
    }

    void write_json(const std::string& name, json body) {
        body["manifest"] = stamp();
        std::ofstream(path(name)) << body.dump(2) << "\n";
    }

    void write_scan(const std::string& name, const ScanResult& scan) { write_scan_csv(scan, path(name), comments()); }

    void finish() const {
        json m{{"config_sha256", hash_},
               {"seed", seed_},
               {"tool_version", TGATES_VERSION},
               {"timestamp", utc_timestamp()},
               {"command", command_},
               {"outputs", outputs_}};
        std::ofstream(out_ / "manifest.json") << m.dump(2) << "\n";
        for (const auto& o : outputs_) std::cout << (out_ / o).string() << "\n";
    }

  private:
    std::string command_;
    std::string hash_;
    std::uint64_t seed_;
    fs::path out_;
    std::vector<std::string> outputs_;
};

std::string file_stem(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

void print_fit(const std::string& label, const FitResult& fit) {
    std::cerr << label << " [" << fit.model << "]";
    for (std::size_t i = 0; i < fit.parameters.size(); ++i) {
        std::cerr << " " << fit.parameters[i] << "=" << fit.values[i] << "+-" << fit.sigmas[i];
    }
    std::cerr << " chi2_red=" << fit.chi2_reduced << (fit.converged ? "" : " (not converged)") << "\n";
}

json calibrations_json(const std::vector<CalibrationReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(calibration_report_json(r));
    return arr;
}

// Scan variable each experiment subcommand requires, and the model fitted when a scan names none.
struct ExperimentKind {
    std::string name;
    std::vector<ScanVariable> required;
    std::size_t min_ions;
};

std::string default_model(ScanVariable v, const std::string& command) {
    switch (v) {
        case ScanVariable::BeamOffTime: return command == "rabi" ? "transit_rabi" : "erf_step";
        case ScanVariable::Phase: return "sinusoid";
        case ScanVariable::Frequency: return "gaussian";
    }
    return {};
}

int run_experiment_command(const ExperimentKind& kind, const CommonOptions& o) {
    Scenario scenario = load_scenario(o.config);
    for (auto v : kind.required) {
        const bool found = std::any_of(scenario.scans.begin(), scenario.scans.end(),
                                       [&](const ScanConfig& s) { return s.variable == v; });
        if (!found) {
            throw ConfigError("scans: the " + kind.name + " command needs a '" +
                              std::string(scan_variable_name(v)) + "' scan");
        }
    }
    if (scenario.ions.size() < kind.min_ions) {
        throw ConfigError("ions: the " + kind.name + " command needs at least " + std::to_string(kind.min_ions) +
                          " ions");
    }
    for (auto& s : scenario.scans) {
        if (s.fit.empty()) s.fit = default_model(s.variable, kind.name);
    }
    const std::uint64_t seed = o.seed.value_or(scenario.seed);
    Run run(kind.name, o.config, seed, o.out);
    const ExperimentResult result = run_experiment(scenario, seed, o.threads.value_or(scenario.threads));

    json report{{"scenario", scenario.name}, {"seed", seed}, {"calibrations", calibrations_json(result.resolved.calibrations)}};
    if (result.resolved.transport) {
        const auto& t = *result.resolved.transport;
        report["synthesis"] = {{"samples", t.synthesis.waveform.n_samples()},
                               {"seconds", t.seconds},
                               {"max_position_error_m", t.synthesis.max_position_error()},
                               {"max_omega_error", t.synthesis.max_omega_error()},
                               {"filtered", t.filtered.has_value()}};
    }
    json fits = json::array();
    for (const auto& scan : result.scans) {
        for (std::size_t i = 0; i < scan.results.size(); ++i) {
            const auto& r = scan.results[i];
            const std::string stem = file_stem(scan.config.name + "_" + scenario.ions[i].name);
            run.write_scan(stem + ".csv", r);
            if (!scan.fits[i]) continue;
            json f = fit_result_json(*scan.fits[i]);
            f["scan"] = scan.config.name;
            f["ion"] = scenario.ions[i].name;
            f["x_unit"] = r.unit;
            run.write_json(stem + "_fit.json", f);
            fits.push_back({{"scan", scan.config.name}, {"ion", scenario.ions[i].name}, {"file", stem + "_fit.json"}});
            if (o.verbose) print_fit(r.label, *scan.fits[i]);
        }
    }
    report["fits"] = fits;
    run.write_json("report.json", report);
    run.finish();
    return 0;
}

int run_synth(const CommonOptions& o) {
    const Scenario scenario = load_scenario(o.config);
    const std::uint64_t seed = o.seed.value_or(scenario.seed);
    Run run("synth", o.config, seed, o.out);
    const ResolvedScenario resolved = resolve_scenario(scenario, true);
    const SynthesisOutcome& t = *resolved.transport;

    write_waveform_csv(t.synthesis.waveform, run.path("waveform.csv"), run.comments());
    if (t.filtered) write_waveform_csv(*t.filtered, run.path("waveform_filtered.csv"), run.comments());
    json wells = json::array();
    for (const auto& w : scenario.wells) {
        const auto& traj = t.realized.at(w.name);
        const std::string name = "trajectory_" + file_stem(w.name) + ".csv";
        write_trajectory_csv(traj, run.path(name), run.comments());
        wells.push_back({{"name", w.name}, {"velocity_m_s", resolved.well_velocity.at(w.name)}, {"trajectory", name}});
    }
    json report{{"scenario", scenario.name},
                {"samples", t.synthesis.waveform.n_samples()},
                {"sample_rate_hz", t.synthesis.waveform.sample_rate},
                {"seconds", t.seconds},
                {"max_position_error_m", t.synthesis.max_position_error()},
                {"max_omega_error", t.synthesis.max_omega_error()},
                {"within_1um_and_1pct", t.synthesis.meets(1e-6, 0.01)},
                {"limits_hold", t.synthesis.waveform.satisfies_limits()},
                {"wells", wells},
                {"calibrations", calibrations_json(resolved.calibrations)}};
    if (t.filtered) report["filtered_limits_hold"] = t.filtered->satisfies_limits();
    run.write_json("synth_report.json", report);
    if (o.verbose) {
        std::cerr << "synthesized " << t.synthesis.waveform.n_samples() << " samples in " << t.seconds
                  << " s; max position error " << t.synthesis.max_position_error() << " m\n";
    }
    run.finish();
    return 0;
}

const BeamGeometry& pick_beam(const ResolvedScenario& r, const std::string& name) {
    const auto it = r.beams.find(name);
    if (it == r.beams.end()) throw ConfigError("beams: unknown beam '" + name + "'");
    return it->second;
}

struct CalibrateOptions {
    std::string beam;
    std::string theta = "pi/2";
    double v_lo = 0.05;
    double v_hi = 100.0;
    double speed = 10.0;
    double span_khz = 20.0;
    int points = 81;
    int shots = 250;
    bool noiseless = false;
    double delta_khz = 1.3;
    std::optional<double> velocity;
    std::string stark_model = "intensity";
};

int run_calibrate_velocity(const CommonOptions& o, const CalibrateOptions& c) {
    const Scenario scenario = load_scenario(o.config);
    Run run("calibrate velocity", o.config, o.seed.value_or(scenario.seed), o.out);
    const ResolvedScenario resolved = resolve_scenario(scenario);
    const double theta = parse_pi_expression(c.theta);
    const VelocitySolution sol = solve_velocity(pick_beam(resolved, c.beam), theta, c.v_lo, c.v_hi);
    json report = calibration_report_json(sol.report);
    report["beam"] = c.beam;
    run.write_json("velocity_report.json", report);
    if (o.verbose) std::cerr << "v = " << sol.velocity << " m/s, overlap " << sol.target_overlap << "\n";
    run.finish();
    return 0;
}

int run_calibrate_doppler(const CommonOptions& o, const CalibrateOptions& c) {
    const Scenario scenario = load_scenario(o.config);
    const std::uint64_t seed = o.seed.value_or(scenario.seed);
    Run run("calibrate doppler", o.config, seed, o.out);
    const ResolvedScenario resolved = resolve_scenario(scenario);
    if (c.points < 4) throw ConfigError("--points must be at least 4");
    DopplerNullSetup setup;
    setup.beam = pick_beam(resolved, c.beam);
    setup.speed = c.speed;
    setup.shots = c.shots;
    setup.spam = scenario.spam;
    setup.seed = seed;
    setup.threads = o.threads.value_or(scenario.threads);
    setup.noiseless = c.noiseless;
    for (int i = 0; i < c.points; ++i) {
        setup.frequency_grid.push_back((-c.span_khz + 2.0 * c.span_khz * i / (c.points - 1)) * kKilohertz);
    }
    const DopplerNullResult r = doppler_null(setup);
    run.write_scan("doppler_forward.csv", r.forward);
    run.write_scan("doppler_reverse.csv", r.reverse);
    json report = calibration_report_json(r.report);
    report["beam"] = c.beam;
    report["configured_alpha_deg"] = setup.beam.misalignment / kDegree;
    report["forward_fit"] = fit_result_json(r.forward_fit);
    report["reverse_fit"] = fit_result_json(r.reverse_fit);
    run.write_json("doppler_report.json", report);
    if (o.verbose) std::cerr << "alpha = " << r.alpha / kDegree << " +- " << r.alpha_sigma / kDegree << " deg\n";
    run.finish();
    return 0;
}

int run_calibrate_stark(const CommonOptions& o, const CalibrateOptions& c) {
    const Scenario scenario = load_scenario(o.config);
    Run run("calibrate stark", o.config, o.seed.value_or(scenario.seed), o.out);
    const ResolvedScenario resolved = resolve_scenario(scenario);
    const BeamGeometry& beam = pick_beam(resolved, c.beam);
    const double theta = parse_pi_expression(c.theta);
    StarkModel model;
    if (c.stark_model == "intensity") {
        model = StarkModel::Intensity;
    } else if (c.stark_model == "constant") {
        model = StarkModel::Constant;
    } else {
        throw ConfigError("--model must be 'intensity' or 'constant'");
    }
    double velocity = 0.0;
    json solve = nullptr;
    if (c.velocity) {
        velocity = *c.velocity;
    } else {
        const VelocitySolution sol = solve_velocity(beam, theta, c.v_lo, c.v_hi);
        velocity = sol.velocity;
        solve = calibration_report_json(sol.report);
    }
    const double delta = c.delta_khz * kKilohertzAngular;
    const double f = stark_fidelity(beam, delta, theta, velocity, model);
    const double f_neg = stark_fidelity(beam, -delta, theta, velocity, model);
    const double f_half = stark_fidelity(beam, 0.5 * delta, theta, velocity, model);
    json report{{"quantity", "average_fidelity"},
                {"value", f},
                {"beam", c.beam},
                {"delta_khz", c.delta_khz},
                {"theta", theta},
                {"velocity_m_s", velocity},
                {"model", c.stark_model},
                {"fidelity_at_minus_delta", f_neg},
                {"fidelity_at_half_delta", f_half},
                {"infidelity_ratio_full_to_half", (1.0 - f) / (1.0 - f_half)},
                {"velocity_solution", solve}};
    run.write_json("stark_report.json", report);
    if (o.verbose) std::cerr << "F = " << f << " at delta/2pi = " << c.delta_khz << " kHz\n";
    run.finish();
    return 0;
}

struct FitCommandOptions {
    std::string input;
    std::string model;
};

int run_fit(const CommonOptions& o, const FitCommandOptions& f) {
    const ScanResult scan = read_scan_csv(f.input);
    Run run("fit", f.input, o.seed.value_or(scan.seed), o.out);
    const FitResult fit = fit_scan(scan, f.model);
    json body = fit_result_json(fit);
    body["input"] = f.input;
    body["x_unit"] = scan.unit;
    run.write_json(file_stem(fs::path(f.input).stem().string()) + "_fit.json", body);
    if (o.verbose) print_fit(f.input, fit);
    run.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transport-gate simulator: waveform synthesis, transit gates, scans and fits"};
    app.set_version_flag("--version", TGATES_VERSION);
    app.require_subcommand(1);

    CommonOptions common;
    CalibrateOptions cal;
    FitCommandOptions fit_opts;

    auto* synth = app.add_subcommand("synth", "Synthesize well waveforms and extract realized trajectories");
    add_common(synth, common);
    auto* rabi = app.add_subcommand("rabi", "Beam-off time scan of a transit gate with a transit Rabi fit");
    add_common(rabi, common);
    auto* ramsey = app.add_subcommand("ramsey", "Phase scan of two transport pi/2 gates with a sinusoid fit");
    add_common(ramsey, common);
    auto* parallel = app.add_subcommand("parallel", "Two-ion beam-off time and frequency scans");
    add_common(parallel, common);

    auto* calibrate = app.add_subcommand("calibrate", "Velocity, misalignment and Stark calibrations");
    calibrate->require_subcommand(1);
    auto* cal_velocity = calibrate->add_subcommand("velocity", "Solve for the velocity giving a rotation angle");
    add_common(cal_velocity, common);
    cal_velocity->add_option("--beam", cal.beam, "Beam name")->required();
    cal_velocity->add_option("--theta", cal.theta, "Target rotation, e.g. pi/2")->capture_default_str();
    cal_velocity->add_option("--v-lo", cal.v_lo, "Lower velocity bracket (m/s)")->capture_default_str();
    cal_velocity->add_option("--v-hi", cal.v_hi, "Upper velocity bracket (m/s)")->capture_default_str();

    auto* cal_doppler = calibrate->add_subcommand("doppler", "Recover the beam misalignment from reversed transports");
    add_common(cal_doppler, common);
    cal_doppler->add_option("--beam", cal.beam, "Beam name")->required();
    cal_doppler->add_option("--speed", cal.speed, "Transport speed (m/s)")->capture_default_str();
    cal_doppler->add_option("--span-khz", cal.span_khz, "Half width of the frequency scan (kHz)")->capture_default_str();
    cal_doppler->add_option("--points", cal.points, "Frequency points")->capture_default_str();
    cal_doppler->add_option("--shots", cal.shots, "Shots per point")->capture_default_str();
    cal_doppler->add_flag("--noiseless", cal.noiseless, "Use expectation values instead of sampled counts");

    auto* cal_stark = calibrate->add_subcommand("stark", "Average gate fidelity under a Stark detuning");
    add_common(cal_stark, common);
    cal_stark->add_option("--beam", cal.beam, "Beam name")->required();
    cal_stark->add_option("--delta-khz", cal.delta_khz, "Stark detuning (kHz)")->capture_default_str();
    cal_stark->add_option("--theta", cal.theta, "Target rotation, e.g. pi/2")->capture_default_str();
    cal_stark->add_option("--velocity", cal.velocity, "Transport velocity (m/s); solved from theta when omitted");
    cal_stark->add_option("--model", cal.stark_model, "Stark profile: intensity or constant")->capture_default_str();

    auto* fit = app.add_subcommand("fit", "Fit a scan CSV with a named model");
    add_common(fit, common, false);
    fit->add_option("--input", fit_opts.input, "Scan CSV (x,p_hat,sigma,n)")->required()->check(CLI::ExistingFile);
    fit->add_option("--model", fit_opts.model, "transit_rabi, sinusoid, erf_step or gaussian")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*synth) return run_synth(common);
        if (*rabi) return run_experiment_command({"rabi", {ScanVariable::BeamOffTime}, 1}, common);
        if (*ramsey) return run_experiment_command({"ramsey", {ScanVariable::Phase}, 1}, common);
        if (*parallel) {
            return run_experiment_command({"parallel", {ScanVariable::BeamOffTime, ScanVariable::Frequency}, 2}, common);
        }
        if (*cal_velocity) return run_calibrate_velocity(common, cal);
        if (*cal_doppler) return run_calibrate_doppler(common, cal);
        if (*cal_stark) return run_calibrate_stark(common, cal);
        if (*fit) return run_fit(common, fit_opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
