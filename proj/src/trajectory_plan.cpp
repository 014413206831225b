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

#include "tgates/constants.hpp"
#include "tgates/errors.hpp"
#include "tgates/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tgates {

void TrajectoryPlan::validate() const {
    if (!(sample_rate > 0.0)) throw InvalidArgument("plan sample rate must be positive");
    if (times.empty()) throw InvalidArgument("plan has no samples");
    const double dt = 1.0 / sample_rate;
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (std::abs((times[k] - times[k - 1]) - dt) > 1e-9 * dt) {
            throw InvalidArgument("plan timestamps must be uniform (sample " + std::to_string(k) + ")");
        }
    }
    if (positions.empty()) throw InvalidArgument("plan has no wells");
    if (omega.size() != positions.size() || depth.size() != positions.size()) {
        throw InvalidArgument("plan needs one omega and depth target per well");
    }
    for (const auto& series : positions) {
        if (series.size() != times.size()) throw InvalidArgument("plan position series length mismatch");
    }
    for (std::size_t w = 0; w < positions.size(); ++w) {
        if (!(omega[w] > 0.0)) throw InvalidArgument("plan target frequencies must be positive");
        if (depth[w] < 0.0) throw InvalidArgument("plan target depths must be non-negative");
    }
    if (!(window_half_width > 0.0)) throw InvalidArgument("plan window half-width must be positive");
    for (std::size_t w = 1; w < positions.size(); ++w) {
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (!(positions[w][k] - positions[w - 1][k] > 2.0 * window_half_width)) {
                throw InvalidArgument("wells " + std::to_string(w - 1) + " and " + std::to_string(w) +
                                      " are unordered or closer than two window half-widths at sample " +
                                      std::to_string(k));
            }
        }
    }
}

TrajectoryPlan plan_trajectory(double z_start, double z_end, double velocity, double omega, double depth,
                               double sample_rate, double ramp) {
    if (!(sample_rate > 0.0)) throw InvalidArgument("sample rate must be positive");
    if (ramp < 0.0) throw InvalidArgument("ramp duration must be non-negative");
    TrajectoryPlan plan;
    plan.sample_rate = sample_rate;
    plan.omega = {omega};
    plan.depth = {depth};
    const double distance = z_end - z_start;
    if (distance == 0.0) {
        plan.times = {0.0};
        plan.positions = {{z_start}};
        return plan;
    }
    if (velocity == 0.0 || (velocity > 0.0) != (distance > 0.0)) {
        throw InvalidArgument("velocity must be nonzero and point from z_start towards z_end");
    }
    const double speed = std::abs(velocity);
    const double sign = distance > 0.0 ? 1.0 : -1.0;
    const double dt = 1.0 / sample_rate;
    const double cruise = std::abs(distance) / speed - ramp;
    if (cruise < 10.0 * dt) {
        throw InvalidArgument("constant-velocity segment spans fewer than 10 samples");
    }
    const double duration = cruise + 2.0 * ramp;
    // Sine-squared acceleration: a(t) = a_max sin^2(pi t / ramp), reaching `speed` after `ramp`.
    const double a_max = ramp > 0.0 ? 2.0 * speed / ramp : 0.0;
    const double ramp_distance = 0.5 * speed * ramp;
    auto ramp_up = [&](double t) {
        return a_max * (t * t / 4.0 - ramp * ramp / (8.0 * kPi * kPi) * (1.0 - std::cos(kTwoPi * t / ramp)));
    };
    auto travelled = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= duration) return std::abs(distance);
        if (t < ramp) return ramp_up(t);
        if (t <= ramp + cruise) return ramp_distance + speed * (t - ramp);
        return std::abs(distance) - ramp_up(duration - t);
    };
    const auto n = static_cast<std::size_t>(std::ceil(duration * sample_rate - 1e-9)) + 1;
    plan.times.resize(n);
    plan.positions.assign(1, std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        plan.times[k] = t;
        plan.positions[0][k] = z_start + sign * travelled(t);
    }
    plan.positions[0].back() = z_end;
    return plan;
}

TrajectoryPlan plan_static(double z, double duration, double omega, double depth, double sample_rate) {
    if (!(sample_rate > 0.0)) throw InvalidArgument("sample rate must be positive");
    if (duration < 0.0) throw InvalidArgument("duration must be non-negative");
    TrajectoryPlan plan;
    plan.sample_rate = sample_rate;
    plan.omega = {omega};
    plan.depth = {depth};
    const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate)) + 1;
    plan.times.resize(n);
    for (std::size_t k = 0; k < n; ++k) plan.times[k] = static_cast<double>(k) / sample_rate;
    plan.positions.assign(1, std::vector<double>(n, z));
    return plan;
}

TrajectoryPlan combine_plans(std::span<const TrajectoryPlan> plans) {
    if (plans.empty()) throw InvalidArgument("no plans to combine");
    TrajectoryPlan out;
    out.sample_rate = plans.front().sample_rate;
    out.window_half_width = plans.front().window_half_width;
    std::size_t n = 0;
    for (const auto& p : plans) {
        if (p.sample_rate != out.sample_rate) throw InvalidArgument("plans must share a sample rate");
        n = std::max(n, p.n_samples());
    }
    out.times.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.times[k] = static_cast<double>(k) / out.sample_rate;
    for (const auto& p : plans) {
        for (std::size_t w = 0; w < p.n_wells(); ++w) {
            std::vector<double> series(n, p.positions[w].back());
            std::copy(p.positions[w].begin(), p.positions[w].end(), series.begin());
            out.positions.push_back(std::move(series));
            out.omega.push_back(p.omega[w]);
            out.depth.push_back(p.depth[w]);
        }
    }
    // Keep wells ordered by starting position.
    std::vector<std::size_t> order(out.positions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return out.positions[a].front() < out.positions[b].front(); });
    TrajectoryPlan sorted = out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.positions[i] = out.positions[order[i]];
        sorted.omega[i] = out.omega[order[i]];
        sorted.depth[i] = out.depth[order[i]];
    }
    return sorted;
}

}  // namespace tgates
