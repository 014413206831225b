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

#include "box_qp.hpp"
#include "tgates/constants.hpp"
#include "tgates/errors.hpp"
#include "tgates/kernels.hpp"
#include "tgates/waveform.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tgates {

bool VoltageWaveform::satisfies_limits() const {
    const std::size_t n = n_samples();
    const double step = max_step();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t c = 0; c < n_channels; ++c) {
            const double v = samples[k * n_channels + c];
            if (!(std::abs(v) <= vmax)) return false;
            if (k > 0 && !(std::abs(v - samples[(k - 1) * n_channels + c]) <= step)) return false;
        }
    }
    return true;
}

bool SynthesisResult::meets(double position_tolerance, double omega_tolerance) const {
    for (const auto& s : steps) {
        for (const auto& w : s.wells) {
            if (!w.found || !(std::abs(w.position_error) <= position_tolerance) ||
                !(std::abs(w.omega_error) <= omega_tolerance)) {
                return false;
            }
        }
    }
    return true;
}

double SynthesisResult::max_position_error() const {
    double worst = 0.0;
    for (const auto& s : steps) {
        for (const auto& w : s.wells) {
            worst = std::max(worst, w.found ? std::abs(w.position_error) : std::numeric_limits<double>::infinity());
        }
    }
    return worst;
}

double SynthesisResult::max_omega_error() const {
    double worst = 0.0;
    for (const auto& s : steps) {
        for (const auto& w : s.wells) {
            worst = std::max(worst, w.found ? std::abs(w.omega_error) : std::numeric_limits<double>::infinity());
        }
    }
    return worst;
}

namespace {

struct FitPoint {
    std::size_t node;
    double weight;
    double target;
};

// Grid nodes and weights for one well: raised-cosine window plus an optional
// flat ring out to ring_radius that extends the target parabola.
std::vector<FitPoint> fit_points(std::span<const double> grid, double center, double half_width, double k,
                                 double ring_radius, double ring_weight, Interval allowed) {
    std::vector<FitPoint> pts;
    const double reach = std::max(half_width, ring_weight > 0.0 ? ring_radius : 0.0);
    const double lo = std::max(center - reach, allowed.lo);
    const double hi = std::min(center + reach, allowed.hi);
    auto it = std::lower_bound(grid.begin(), grid.end(), lo);
    for (; it != grid.end() && *it <= hi; ++it) {
        const double u = *it - center;
        double w = 0.0;
        if (std::abs(u) < half_width) w = 0.5 * (1.0 + std::cos(kPi * u / half_width));
        else if (ring_weight > 0.0) w = ring_weight;
        if (w <= 0.0) continue;
        pts.push_back({static_cast<std::size_t>(it - grid.begin()), w, 0.5 * k * u * u});
    }
    return pts;
}

// Channel potentials psi_c(z_j) = sum of phi_i over the electrodes wired to c.
std::vector<double> channel_potentials(const ElectrodeBasis& basis) {
    const std::size_t n = basis.grid_size();
    std::vector<double> psi(basis.n_channels() * n, 0.0);
    const auto map = basis.channel_map();
    for (std::size_t i = 0; i < basis.n_electrodes(); ++i) {
        const auto row = basis.phi_row(i);
        double* dst = psi.data() + map[i] * n;
        for (std::size_t j = 0; j < n; ++j) dst[j] += row[j];
    }
    return psi;
}

struct WellSetup {
    double center;
    double k;        // V/m^2
    double depth_v;  // V
    Interval allowed;
};

}  // namespace

SynthesisResult synthesize_waveform(const ElectrodeBasis& basis, const TrajectoryPlan& plan,
                                    const IonSpecies& species, const SynthesisOptions& options) {
    plan.validate();
    species.validate();
    if (!(options.vmax >= 0.0)) throw InvalidArgument("vmax must be non-negative");
    if (!(options.slew > 0.0)) throw InvalidArgument("slew limit must be positive");
    if (!(options.regularization > 0.0)) throw InvalidArgument("regularization must be positive");
    const double hw = plan.window_half_width;
    for (const auto& series : plan.positions) {
        for (double z : series) {
            if (!basis.contains(z - hw) || !basis.contains(z + hw)) {
                throw InvalidArgument("target position " + std::to_string(z) +
                                      " m with its window lies outside the basis span");
            }
        }
    }

    const std::size_t n_ch = basis.n_channels();
    const std::size_t n_w = plan.n_wells();
    const std::size_t n_var = n_ch + n_w;
    const std::size_t n_grid = basis.grid_size();
    const auto grid = basis.grid();
    const auto psi = channel_potentials(basis);
    const double q = species.charge;

    SynthesisResult result;
    auto& wf = result.waveform;
    wf.sample_rate = plan.sample_rate;
    wf.n_channels = n_ch;
    wf.vmax = options.vmax;
    wf.slew = options.slew;
    wf.samples.resize(plan.n_samples() * n_ch);
    result.steps.resize(plan.n_samples());
    const double step = wf.max_step();

    std::optional<Eigen::VectorXd> prev_v;
    if (options.initial_voltages) {
        if (options.initial_voltages->size() != n_ch) {
            throw InvalidArgument("initial voltages must have one entry per channel");
        }
        prev_v = Eigen::Map<const Eigen::VectorXd>(options.initial_voltages->data(),
                                                   static_cast<Eigen::Index>(n_ch));
    }
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_var));
    if (prev_v) warm.head(static_cast<Eigen::Index>(n_ch)) = *prev_v;

    const double inf = std::numeric_limits<double>::infinity();
    Eigen::VectorXd lo(n_var), hi(n_var);
    std::vector<double> scratch_a, scratch_b, weights, targets;

    for (std::size_t t = 0; t < plan.n_samples(); ++t) {
        // Bounds: box intersected with the slew window around the previous step.
        for (std::size_t c = 0; c < n_ch; ++c) {
            double l = -options.vmax;
            double h = options.vmax;
            if (prev_v) {
                const double p = (*prev_v)[static_cast<Eigen::Index>(c)];
                double pl = p - step;
                double ph = p + step;
                while (p - pl > step) pl = std::nextafter(pl, inf);
                while (ph - p > step) ph = std::nextafter(ph, -inf);
                l = std::max(l, pl);
                h = std::min(h, ph);
            }
            if (l > h) {
                throw SynthesisError("box and slew constraints are infeasible on channel " + std::to_string(c + 1),
                                     t);
            }
            lo[static_cast<Eigen::Index>(c)] = l;
            hi[static_cast<Eigen::Index>(c)] = h;
        }
        for (std::size_t w = 0; w < n_w; ++w) {
            lo[static_cast<Eigen::Index>(n_ch + w)] = -inf;
            hi[static_cast<Eigen::Index>(n_ch + w)] = inf;
        }

        std::vector<WellSetup> wells(n_w);
        for (std::size_t w = 0; w < n_w; ++w) {
            const double z = plan.positions[w][t];
            const double left = w > 0 ? 0.5 * (plan.positions[w - 1][t] + z) : basis.z_min();
            const double right = w + 1 < n_w ? 0.5 * (plan.positions[w + 1][t] + z) : basis.z_max();
            wells[w] = {z, species.mass * plan.omega[w] * plan.omega[w] / q,
                        plan.depth[w] * kElementaryCharge / q, {left, right}};
        }

        std::vector<double> ring(n_w, 0.0);
        StepDiagnostic diag;
        Eigen::VectorXd x;
        for (int attempt = 0;; ++attempt) {
            Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n_var, n_var);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(n_var);
            std::vector<std::vector<FitPoint>> pts(n_w);
            for (std::size_t w = 0; w < n_w; ++w) {
                const auto& s = wells[w];
                const double r_d = s.k > 0.0 ? std::sqrt(2.0 * s.depth_v / s.k) : 0.0;
                pts[w] = fit_points(grid, s.center, hw, s.k, r_d, ring[w], s.allowed);
                const auto& p = pts[w];
                double total = 0.0;
                for (const auto& fp : p) total += fp.weight;
                if (total <= 0.0) continue;
                const std::size_t m = p.size();
                weights.resize(m);
                targets.resize(m);
                scratch_a.resize(m);
                scratch_b.resize(m);
                for (std::size_t j = 0; j < m; ++j) {
                    weights[j] = p[j].weight / total;
                    targets[j] = p[j].target;
                }
                std::vector<std::vector<double>> local(n_ch, std::vector<double>(m));
                std::vector<bool> active(n_ch, false);
                for (std::size_t c = 0; c < n_ch; ++c) {
                    for (std::size_t j = 0; j < m; ++j) {
                        local[c][j] = psi[c * n_grid + p[j].node];
                        if (local[c][j] != 0.0) active[c] = true;
                    }
                }
                const std::vector<double> ones(m, 1.0);
                const auto iw = static_cast<Eigen::Index>(n_ch + w);
                for (std::size_t a = 0; a < n_ch; ++a) {
                    if (!active[a]) continue;
                    const auto ia = static_cast<Eigen::Index>(a);
                    for (std::size_t c = a; c < n_ch; ++c) {
                        if (!active[c]) continue;
                        const double v = kernels::weighted_dot(weights, local[a], local[c]);
                        H(ia, static_cast<Eigen::Index>(c)) += v;
                        if (c != a) H(static_cast<Eigen::Index>(c), ia) += v;
                    }
                    const double s1 = kernels::weighted_dot(weights, local[a], ones);
                    H(ia, iw) -= s1;
                    H(iw, ia) -= s1;
                    b[ia] += kernels::weighted_dot(weights, local[a], targets);
                }
                H(iw, iw) += 1.0;
                b[iw] -= kernels::weighted_dot(weights, targets, ones);
            }
            const auto nc = static_cast<Eigen::Index>(n_ch);
            double mean_diag = H.diagonal().head(nc).mean();
            if (!(mean_diag > 0.0)) mean_diag = 1.0;
            H.diagonal().head(nc).array() += options.regularization * mean_diag;

            const auto qp = detail::solve_box_qp(H, b, lo, hi, warm, options.kkt_tolerance);
            x = qp.x;
            diag = StepDiagnostic{};
            diag.kkt_residual = qp.kkt_residual;
            diag.qp_iterations = qp.iterations;
            diag.depth_penalty_active = attempt > 0;

            // Weighted residual over the windows only.
            double rss = 0.0, wsum = 0.0;
            for (std::size_t w = 0; w < n_w; ++w) {
                for (const auto& fp : pts[w]) {
                    if (std::abs(grid[fp.node] - wells[w].center) >= hw) continue;
                    double phi = -x[static_cast<Eigen::Index>(n_ch + w)];
                    for (std::size_t c = 0; c < n_ch; ++c) phi += x[static_cast<Eigen::Index>(c)] * psi[c * n_grid + fp.node];
                    const double r = phi - fp.target;
                    rss += fp.weight * r * r;
                    wsum += fp.weight;
                }
            }
            diag.residual_rms = wsum > 0.0 ? std::sqrt(rss / wsum) : 0.0;

            std::vector<double> volts(x.data(), x.data() + n_ch);
            const auto e = basis.electrode_voltages(volts);
            bool shallow = false;
            diag.wells.resize(n_w);
            for (std::size_t w = 0; w < n_w; ++w) {
                const auto& s = wells[w];
                auto& d = diag.wells[w];
                const auto z = detail::track_minimum(basis, e, s.center, hw);
                if (!z) {
                    d.found = false;
                    continue;
                }
                const Well well = detail::characterize_minimum(basis, e, species, *z, s.allowed);
                d.found = well.curvature > 0.0;
                d.position_error = well.position - s.center;
                d.omega_error = well.omega / plan.omega[w] - 1.0;
                d.depth = well.depth;
                if (plan.depth[w] > 0.0 && well.depth < plan.depth[w]) {
                    shallow = true;
                    ring[w] = ring[w] == 0.0 ? options.depth_penalty : 10.0 * ring[w];
                }
            }
            if (!shallow || attempt >= options.depth_iterations) break;
        }

        for (std::size_t c = 0; c < n_ch; ++c) wf.samples[t * n_ch + c] = x[static_cast<Eigen::Index>(c)];
        result.steps[t] = std::move(diag);
        prev_v = x.head(static_cast<Eigen::Index>(n_ch));
        warm = x;
    }
    return result;
}

}  // namespace tgates
