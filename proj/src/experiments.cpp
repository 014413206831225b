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

#include "tgates/experiments.hpp"

#include "tgates/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace tgates {

namespace {

BeamGeometry resolve_beam(const std::string& name, const Scenario& scenario,
                          std::vector<CalibrationReport>& reports) {
    const BeamSpec& spec = scenario.beams.at(name);
    BeamGeometry g = spec.geometry;
    if (spec.retro_of) {
        const BeamGeometry primary = resolve_beam(*spec.retro_of, scenario, reports);
        try {
            g = make_retro_zone(primary, spec.geometry.center, spec.waist_scale, spec.transmission);
        } catch (const InvalidArgument& e) {
            throw ConfigError("beams." + name + ": " + e.what());
        }
    }
    if (spec.calibration) {
        BeamGeometry unit = g;
        unit.peak_rabi = 1.0;
        const double area = pulse_area(unit, spec.calibration->velocity);
        g.peak_rabi = spec.calibration->theta / area;
        CalibrationReport r;
        r.quantity = "peak_rabi:" + name;
        r.value = g.peak_rabi;
        r.unit = "rad/s";
        r.method = "pulse area scaling";
        r.converged = true;
        r.details = {{"theta", spec.calibration->theta},
                     {"velocity_m_s", spec.calibration->velocity},
                     {"peak_rabi_khz", g.peak_rabi / kKilohertzAngular}};
        reports.push_back(r);
    }
    return g;
}

double resolve_speed(const std::optional<double>& velocity, const std::optional<VelocityCalibration>& calibration,
                     double direction, const std::map<std::string, BeamGeometry>& beams, const std::string& what,
                     std::vector<CalibrationReport>& reports) {
    if (velocity) {
        if ((*velocity > 0.0) != (direction > 0.0)) {
            throw ConfigError(what + ": velocity must point from start towards end");
        }
        return *velocity;
    }
    const auto& c = *calibration;
    VelocitySolution sol = solve_velocity(beams.at(c.beam), c.theta, c.v_lo, c.v_hi);
    sol.report.quantity = "velocity:" + what;
    reports.push_back(sol.report);
    return direction > 0.0 ? sol.velocity : -sol.velocity;
}

bool uses_wells(const Scenario& scenario) {
    for (const auto& ion : scenario.ions) {
        for (const auto& step : ion.sequence) {
            if (const auto* t = std::get_if<TransportSpec>(&step); t && std::holds_alternative<std::string>(t->path)) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

TrajectoryPlan build_plan(const Scenario& scenario, const std::map<std::string, double>& well_velocity) {
    if (scenario.wells.empty()) throw ConfigError("wells: at least one well is needed for synthesis");
    std::vector<TrajectoryPlan> plans;
    const double rate = scenario.synthesis.sample_rate;
    for (const auto& w : scenario.wells) {
        TrajectoryPlan p;
        try {
            if (w.z_end == w.z_start) {
                p = plan_static(w.z_start, 1.0 / rate, w.omega, w.depth, rate);
            } else {
                p = plan_trajectory(w.z_start, w.z_end, well_velocity.at(w.name), w.omega, w.depth, rate, w.ramp);
            }
        } catch (const InvalidArgument& e) {
            throw ConfigError("wells." + w.name + ": " + e.what());
        }
        p.window_half_width = scenario.synthesis.window_half_width;
        plans.push_back(std::move(p));
    }
    TrajectoryPlan plan = combine_plans(plans);
    try {
        plan.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("wells: ") + e.what());
    }
    return plan;
}

SynthesisOutcome run_synthesis(const Scenario& scenario, const ElectrodeBasis& basis,
                               const std::map<std::string, double>& well_velocity) {
    SynthesisOutcome out;
    out.plan = build_plan(scenario, well_velocity);
    SynthesisOptions options = scenario.synthesis.options;
    const auto start = std::chrono::steady_clock::now();
    out.synthesis = synthesize_waveform(basis, out.plan, scenario.species, options);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (scenario.filter) out.filtered = apply_filter(out.synthesis.waveform, *scenario.filter);
    const VoltageWaveform& seen = out.filtered ? *out.filtered : out.synthesis.waveform;
    for (const auto& w : scenario.wells) {
        out.ideal[w.name] = realized_trajectory(basis, out.synthesis.waveform, scenario.species, w.z_start);
        out.realized[w.name] =
            out.filtered ? realized_trajectory(basis, seen, scenario.species, w.z_start) : out.ideal[w.name];
    }
    return out;
}

ResolvedScenario resolve_scenario(const Scenario& scenario, bool force_synthesis) {
    ResolvedScenario r;
    for (const auto& [name, spec] : scenario.beams) r.beams[name] = resolve_beam(name, scenario, r.calibrations);
    for (const auto& w : scenario.wells) {
        if (w.z_end == w.z_start) {
            r.well_velocity[w.name] = 0.0;
            continue;
        }
        r.well_velocity[w.name] =
            resolve_speed(w.velocity, w.calibration, w.z_end - w.z_start, r.beams, "wells." + w.name, r.calibrations);
    }
    if (force_synthesis || uses_wells(scenario)) {
        const ElectrodeBasis basis = scenario.basis.build();
        r.transport = run_synthesis(scenario, basis, r.well_velocity);
    }
    for (const auto& ion : scenario.ions) {
        IonProgram program;
        program.name = ion.name;
        for (const auto& step : ion.sequence) {
            if (const auto* t = std::get_if<TransportSpec>(&step)) {
                TransportSegment seg;
                for (const auto& b : t->beams) seg.beams.push_back(r.beams.at(b));
                seg.phase = t->phase;
                seg.beam_off_time = t->beam_off_time;
                if (const auto* well = std::get_if<std::string>(&t->path)) {
                    seg.path = r.transport->realized.at(*well);
                } else {
                    const auto& p = std::get<ConstantPathSpec>(t->path);
                    if (p.z_end == p.z_start) throw ConfigError("ions." + ion.name + ": path has zero length");
                    const double v = resolve_speed(p.velocity, p.calibration, p.z_end - p.z_start, r.beams,
                                                   "ions." + ion.name, r.calibrations);
                    seg.path = ConstantVelocityPath{p.z_start, p.z_end, v};
                }
                program.sequence.push_back(std::move(seg));
            } else if (const auto* pulse = std::get_if<StaticPulse>(&step)) {
                program.sequence.push_back(*pulse);
            } else if (const auto* shift = std::get_if<PhaseShift>(&step)) {
                program.sequence.push_back(*shift);
            } else {
                program.sequence.push_back(TransferPulse{});
            }
        }
        r.ions.push_back(std::move(program));
    }
    return r;
}

FitResult fit_scan(const ScanResult& scan, const std::string& model) {
    const FitModel& m = find_model(model);
    const auto x = scan.x();
    const auto y = scan.y();
    const auto s = scan.sigma();
    const InitialGuess guess = initial_guess(m, x, y);
    return fit_curve(m, x, y, s, guess.values);
}

ExperimentResult run_experiment(const Scenario& scenario, std::uint64_t seed, int threads) {
    if (scenario.ions.empty()) throw ConfigError("ions: at least one ion is needed");
    if (scenario.scans.empty()) throw ConfigError("scans: at least one scan is needed");
    ExperimentResult out;
    out.resolved = resolve_scenario(scenario);
    MeasurementSetup setup;
    setup.spam = scenario.spam;
    setup.sequence = scenario.sequence_options;
    setup.seed = seed;
    setup.threads = threads;
    for (std::size_t i = 0; i < scenario.scans.size(); ++i) {
        const ScanConfig& cfg = scenario.scans[i];
        ScanSpec spec;
        spec.variable = cfg.variable;
        spec.grid = cfg.grid;
        spec.shots = cfg.shots;
        spec.noiseless = cfg.noiseless;
        spec.scan_index = i;
        ScanOutcome outcome;
        outcome.config = cfg;
        outcome.results = run_scan(out.resolved.ions, spec, setup);
        for (auto& result : outcome.results) {
            result.label = result.label + "/" + cfg.name;
            if (cfg.fit.empty()) {
                outcome.fits.emplace_back();
            } else {
                outcome.fits.emplace_back(fit_scan(result, cfg.fit));
            }
        }
        out.scans.push_back(std::move(outcome));
    }
    return out;
}

double velocity_ripple(const RealizedTrajectory& trajectory, double t_begin, double t_end) {
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        const double t = trajectory.times[k];
        if (t < t_begin || t > t_end) continue;
        sum += trajectory.velocity[k];
        sum2 += trajectory.velocity[k] * trajectory.velocity[k];
        ++n;
    }
    if (n < 2) throw InvalidArgument("ripple window holds fewer than two samples");
    const double mean = sum / static_cast<double>(n);
    return std::sqrt(std::max(sum2 / static_cast<double>(n) - mean * mean, 0.0));
}

double lineshape_skewness(const ScanResult& scan, const FitResult& gaussian) {
    const double x0 = gaussian.value("x0");
    const double width = gaussian.value("sigma_g");
    const double c = gaussian.value("c");
    const double sign = gaussian.value("A") < 0.0 ? -1.0 : 1.0;
    std::vector<ScanPoint> pts = scan.points;
    std::sort(pts.begin(), pts.end(), [](const ScanPoint& a, const ScanPoint& b) { return a.x < b.x; });
    if (pts.size() < 2) throw InvalidArgument("lineshape needs at least two points");
    const double reach = 2.5 * width;
    if (x0 - reach < pts.front().x || x0 + reach > pts.back().x) {
        throw InvalidArgument("scan range does not cover 2.5 sigma on both sides of the line centre");
    }
    auto depth = [&](double x) {
        const auto hi = std::upper_bound(pts.begin(), pts.end(), x, [](double v, const ScanPoint& p) { return v < p.x; });
        const auto lo = hi - 1;
        const double f = (x - lo->x) / (hi->x - lo->x);
        return sign * (lo->p_hat + f * (hi->p_hat - lo->p_hat) - c);
    };
    const int n = 400;
    std::vector<double> d(2 * n + 1), w(2 * n + 1);
    double w_sum = 0.0, mean = 0.0;
    for (int k = -n; k <= n; ++k) {
        const std::size_t i = static_cast<std::size_t>(k + n);
        d[i] = reach * static_cast<double>(k) / n;
        w[i] = depth(x0 + d[i]);
        w_sum += w[i];
        mean += w[i] * d[i];
    }
    mean /= w_sum;
    double m2 = 0.0, m3 = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double u = d[i] - mean;
        m2 += w[i] * u * u;
        m3 += w[i] * u * u * u;
    }
    m2 /= w_sum;
    m3 /= w_sum;
    return m3 / std::pow(m2, 1.5);
}

}  // namespace tgates
