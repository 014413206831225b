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

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <string>

namespace tgates {

RealizedTrajectory realized_trajectory(const ElectrodeBasis& basis, const VoltageWaveform& waveform,
                                       const IonSpecies& species, double seed_position, double max_jump) {
    species.validate();
    if (waveform.n_channels != basis.n_channels()) {
        throw InvalidArgument("waveform channel count does not match the basis");
    }
    const std::size_t n = waveform.n_samples();
    RealizedTrajectory out;
    out.times.resize(n);
    out.position.resize(n);
    out.velocity.resize(n);
    out.omega.resize(n);
    out.depth.resize(n);
    const Interval span{basis.z_min(), basis.z_max()};
    double z_prev = seed_position;
    for (std::size_t k = 0; k < n; ++k) {
        const auto e = basis.electrode_voltages(waveform.row(k));
        const auto z = detail::track_minimum(basis, e, z_prev, max_jump);
        if (!z) throw TrackingError("well minimum lost", k);
        const Well w = detail::characterize_minimum(basis, e, species, *z, span);
        if (!(w.curvature > 0.0)) throw TrackingError("well minimum lost", k);
        out.times[k] = static_cast<double>(k) * waveform.dt();
        out.position[k] = *z;
        out.omega[k] = w.omega;
        out.depth[k] = w.depth;
        z_prev = *z;
    }
    const double dt = waveform.dt();
    if (n == 1) out.velocity[0] = 0.0;
    for (std::size_t k = 0; k < n && n > 1; ++k) {
        if (k == 0) out.velocity[k] = (out.position[1] - out.position[0]) / dt;
        else if (k + 1 == n) out.velocity[k] = (out.position[k] - out.position[k - 1]) / dt;
        else out.velocity[k] = (out.position[k + 1] - out.position[k - 1]) / (2.0 * dt);
    }
    return out;
}

namespace {

struct Escaped {
    double z;
};

}  // namespace

ClassicalTrack track_classical_ion(const ElectrodeBasis& basis, const VoltageWaveform& waveform,
                                   const IonSpecies& species, double z0, double v0,
                                   const ClassicalOptions& options) {
    species.validate();
    if (waveform.n_channels != basis.n_channels()) {
        throw InvalidArgument("waveform channel count does not match the basis");
    }
    if (!basis.contains(z0)) throw InvalidArgument("initial ion position lies outside the basis grid");
    if (options.subdivisions < 1) throw InvalidArgument("subdivisions must be at least 1");
    const std::size_t n = waveform.n_samples();
    if (n == 0) throw InvalidArgument("waveform has no samples");

    const std::size_t n_e = basis.n_electrodes();
    std::vector<std::vector<double>> electrode_rows(n);
    for (std::size_t k = 0; k < n; ++k) electrode_rows[k] = basis.electrode_voltages(waveform.row(k));

    // Internal units: micrometres from z0 and the inverse initial secular frequency,
    // so the relative tolerance weighs displacement and velocity alike.
    constexpr double um = 1e-6;
    const double q_over_m = species.charge / species.mass;
    const double k0 = q_over_m * basis.sample_electrodes(electrode_rows[0], z0).curvature;
    const double us = k0 > 0.0 ? 1.0 / std::sqrt(k0) : 1e-6;
    const double dt_us = waveform.dt() / us;

    std::vector<double> e(n_e);
    auto set_voltages = [&](std::size_t k, double frac) {
        const auto& a = electrode_rows[k];
        const auto& b = electrode_rows[std::min(k + 1, n - 1)];
        for (std::size_t i = 0; i < n_e; ++i) e[i] = a[i] + frac * (b[i] - a[i]);
    };

    using State = std::array<double, 2>;
    std::size_t seg = 0;
    double seg_start = 0.0;
    auto rhs = [&](const State& s, State& ds, double t) {
        const double z = z0 + s[0] * um;
        if (!basis.contains(z)) throw Escaped{z};
        set_voltages(seg, (t - seg_start) / dt_us);
        const double slope = basis.sample_electrodes(e, z).slope;
        ds[0] = s[1];
        ds[1] = -q_over_m * slope * (us * us / um);
    };

    ClassicalTrack track;
    auto observe = [&](const State& s, double t_us, double well_guess) {
        const double z = z0 + s[0] * um;
        const double v = s[1] * um / us;
        const auto p = basis.sample_electrodes(e, z);
        const auto zw = detail::track_minimum(basis, e, well_guess, basis.z_max() - basis.z_min());
        const double well = zw ? *zw : well_guess;
        track.times.push_back(t_us * us);
        track.ion_position.push_back(z);
        track.ion_velocity.push_back(v);
        track.well_position.push_back(well);
        track.energy.push_back(0.5 * species.mass * v * v + species.charge * p.value);
        track.max_deviation = std::max(track.max_deviation, std::abs(z - well));
        return well;
    };

    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled(options.absolute_tolerance, options.relative_tolerance,
                                           odeint::runge_kutta_fehlberg78<State>());
    State state{0.0, v0 * us / um};
    set_voltages(0, 0.0);
    const auto z_start = detail::track_minimum(basis, e, z0, basis.z_max() - basis.z_min());
    double well = observe(state, 0.0, z_start ? *z_start : z0);
    double h = dt_us / static_cast<double>(options.subdivisions) / 16.0;
    const double sub = dt_us / static_cast<double>(options.subdivisions);

    try {
        for (seg = 0; seg + 1 < n; ++seg) {
            seg_start = static_cast<double>(seg) * dt_us;
            for (int s = 0; s < options.subdivisions; ++s) {
                const double t0 = seg_start + s * sub;
                const double t1 = s + 1 == options.subdivisions ? seg_start + dt_us : t0 + sub;
                double t = t0;
                while (t < t1) {
                    const double step = std::min(h, t1 - t);
                    double try_h = step;
                    const auto r = stepper.try_step(rhs, state, t, try_h);
                    if (r == odeint::success) {
                        if (step == h) h = try_h;
                        else h = std::max(h, try_h);
                    } else {
                        h = try_h;
                    }
                }
                set_voltages(seg, (t1 - seg_start) / dt_us);
                well = observe(state, t1, well);
            }
        }
    } catch (const Escaped& esc) {
        (void)esc;
        throw EscapeError("ion left the basis grid", track.times.back());
    }

    // Static waveforms conserve energy; report drift against the oscillation energy.
    set_voltages(0, 0.0);
    const double e_min = species.charge * basis.sample_electrodes(e, track.well_position.front()).value;
    const double e_osc = track.energy.front() - e_min;
    double drift = 0.0;
    for (double en : track.energy) drift = std::max(drift, std::abs(en - track.energy.front()));
    track.max_energy_drift = e_osc > 0.0 ? drift / e_osc : drift;
    return track;
}

}  // namespace tgates
