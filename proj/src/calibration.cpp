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

#include "tgates/calibration.hpp"

#include "tgates/errors.hpp"
#include "tgates/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

namespace tgates {

nlohmann::json calibration_report_json(const CalibrationReport& report) {
    nlohmann::json j;
    j["quantity"] = report.quantity;
    j["value"] = report.value;
    j["unit"] = report.unit;
    j["residual"] = report.residual;
    j["iterations"] = report.iterations;
    j["method"] = report.method;
    j["bracket"] = {report.bracket_lo, report.bracket_hi};
    j["converged"] = report.converged;
    j["details"] = report.details;
    return j;
}

double pulse_area(const BeamGeometry& beam, double velocity) {
    beam.validate();
    if (velocity == 0.0 || !std::isfinite(velocity)) throw InvalidArgument("velocity must be finite and nonzero");
    if (beam.peak_rabi == 0.0) return 0.0;
    const double extent = beam_extent(beam);
    auto omega = [&](double z) { return rabi_at_position(beam, z); };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        omega, beam.center - extent, beam.center + extent, 15, 1e-10);
    return integral / std::abs(velocity);
}

ConstantVelocityPath transit_path(const BeamGeometry& beam, double velocity) {
    beam.validate();
    if (velocity == 0.0 || !std::isfinite(velocity)) throw InvalidArgument("velocity must be finite and nonzero");
    const double extent = beam_extent(beam);
    const double dir = velocity > 0.0 ? 1.0 : -1.0;
    return {beam.center - dir * extent, beam.center + dir * extent, velocity};
}

GateUnitary transit_unitary(const BeamGeometry& beam, double velocity, double base_detuning) {
    TransportSegment seg;
    seg.path = transit_path(beam, velocity);
    seg.beams = {beam};
    const std::vector<PulseElement> elements{seg};
    SequenceOptions options;
    options.base_detuning = base_detuning;
    return run_sequence(QubitState::spin_up(), elements, options).unitary;
}

VelocitySolution solve_velocity(const BeamGeometry& beam, double theta_target, double v_lo, double v_hi,
                                double relative_tolerance) {
    if (!(v_lo > 0.0 && v_hi > v_lo)) throw InvalidArgument("velocity bracket must satisfy 0 < v_lo < v_hi");
    if (!(theta_target > 0.0)) throw InvalidArgument("target rotation must be positive");
    if (!(relative_tolerance > 0.0 && relative_tolerance < 1.0)) {
        throw InvalidArgument("relative tolerance must lie in (0, 1)");
    }
    const double area_lo = pulse_area(beam, v_lo);
    const double area_hi = pulse_area(beam, v_hi);
    if ((area_lo - theta_target) * (area_hi - theta_target) > 0.0) {
        throw BracketError("velocity bracket does not enclose the target area; endpoint areas", area_lo, area_hi);
    }
    const int bits = static_cast<int>(std::ceil(1.0 - std::log2(relative_tolerance)));
    auto f = [&](double v) { return pulse_area(beam, v) - theta_target; };
    const auto root = numerics::bracketed_root(f, v_lo, v_hi, area_lo - theta_target, area_hi - theta_target, bits);

    VelocitySolution out;
    out.velocity = root.root;
    out.area = pulse_area(beam, out.velocity);

    BeamGeometry resonant = beam;
    resonant.stark_offset = 0.0;
    resonant.misalignment = 0.0;
    const GateUnitary u = transit_unitary(resonant, out.velocity);
    const QubitState actual = u.apply(QubitState::spin_up());
    const QubitState target = rotation_unitary(theta_target, 0.0).apply(QubitState::spin_up());
    out.target_overlap = std::norm(std::conj(target.up) * actual.up + std::conj(target.down) * actual.down);
    if (out.target_overlap < 0.9999) {
        throw Error("solved velocity " + std::to_string(out.velocity) + " m/s reaches overlap " +
                    std::to_string(out.target_overlap) + " with the target state");
    }

    auto& r = out.report;
    r.quantity = "velocity";
    r.value = out.velocity;
    r.unit = "m/s";
    r.residual = std::abs(out.area - theta_target);
    r.iterations = root.iterations;
    r.method = "toms748";
    r.bracket_lo = root.lo;
    r.bracket_hi = root.hi;
    r.converged = (root.hi - root.lo) <= 2.0 * relative_tolerance * out.velocity;
    r.details = {{"theta_target", theta_target}, {"area", out.area}, {"target_overlap", out.target_overlap},
                 {"area_at_v_lo", area_lo}, {"area_at_v_hi", area_hi}};
    return out;
}

double deduce_velocity(double chi, double waist) {
    if (!(chi >= 0.0) || !(waist >= 0.0)) throw InvalidArgument("chi and waist must be non-negative");
    return std::sqrt(2.0) * waist * chi;
}

DopplerNullResult doppler_null(const DopplerNullSetup& setup) {
    if (!(setup.speed > 0.0)) throw InvalidArgument("transport speed must be positive");
    if (setup.frequency_grid.size() < 4) throw InvalidArgument("frequency scan needs at least 4 points");

    auto program = [&](double velocity, const char* name) {
        TransportSegment seg;
        seg.path = transit_path(setup.beam, velocity);
        seg.beams = {setup.beam};
        IonProgram ion;
        ion.name = name;
        ion.sequence = {seg};
        return ion;
    };
    MeasurementSetup measurement;
    measurement.spam = setup.spam;
    measurement.seed = setup.seed;
    measurement.threads = setup.threads;

    ScanSpec spec;
    spec.variable = ScanVariable::Frequency;
    spec.grid = setup.frequency_grid;
    spec.shots = setup.shots;
    spec.noiseless = setup.noiseless;

    DopplerNullResult out;
    const std::vector<IonProgram> forward{program(setup.speed, "forward")};
    spec.scan_index = 0;
    out.forward = run_scan(forward, spec, measurement).front();
    const std::vector<IonProgram> reverse{program(-setup.speed, "reverse")};
    spec.scan_index = 1;
    out.reverse = run_scan(reverse, spec, measurement).front();

    const FitModel& gaussian = find_model("gaussian");
    auto fit = [&](const ScanResult& scan) {
        const auto x = scan.x();
        const auto y = scan.y();
        const auto s = scan.sigma();
        const auto guess = initial_guess(gaussian, x, y);
        FitResult r = fit_curve(gaussian, x, y, s, guess.values);
        if (!r.converged) throw Error("Gaussian fit of the " + scan.label + " frequency scan did not converge");
        return r;
    };
    out.forward_fit = fit(out.forward);
    out.reverse_fit = fit(out.reverse);

    const double f_fwd = out.forward_fit.value("x0");
    const double f_rev = out.reverse_fit.value("x0");
    const double k = setup.beam.wavenumber;
    out.alpha = -kPi * (f_fwd - f_rev) / (k * setup.speed);
    out.alpha_sigma = kPi * std::hypot(out.forward_fit.sigma("x0"), out.reverse_fit.sigma("x0")) / (k * setup.speed);

    auto& r = out.report;
    r.quantity = "misalignment";
    r.value = out.alpha;
    r.unit = "rad";
    r.residual = out.alpha_sigma;
    r.iterations = static_cast<std::uintmax_t>(out.forward_fit.iterations + out.reverse_fit.iterations);
    r.method = "gaussian line centres of forward and reversed frequency scans";
    r.bracket_lo = setup.frequency_grid.front();
    r.bracket_hi = setup.frequency_grid.back();
    r.converged = true;
    r.details = {{"f_forward_hz", f_fwd},
                 {"f_reverse_hz", f_rev},
                 {"alpha_deg", out.alpha / kDegree},
                 {"alpha_sigma_deg", out.alpha_sigma / kDegree},
                 {"doppler_shift_hz", k * out.alpha * setup.speed / kTwoPi}};
    return out;
}

double stark_fidelity(const BeamGeometry& beam, double delta, double theta_target, double velocity,
                      StarkModel model) {
    BeamGeometry b = beam;
    b.stark_offset = delta;
    b.stark_profile = model == StarkModel::Intensity ? StarkProfile::Intensity : StarkProfile::Constant;
    b.misalignment = 0.0;  // Stark contribution only
    const GateUnitary actual = transit_unitary(b, velocity);
    return average_fidelity(actual, rotation_unitary(theta_target, 0.0));
}

}  // namespace tgates
