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

#include "tgates/trap_model.hpp"

#include "tgates/constants.hpp"
#include "tgates/errors.hpp"
#include "tgates/kernels.hpp"
#include "tgates/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tgates {

IonSpecies IonSpecies::beryllium9() { return IonSpecies{1.4965e-26, 1.602e-19}; }

void IonSpecies::validate() const {
    if (!(mass > 0.0) || !(charge > 0.0)) {
        throw InvalidArgument("ion species requires positive mass and charge");
    }
}

ElectrodeBasis::ElectrodeBasis(std::vector<double> grid, std::vector<double> phi,
                               std::vector<double> dphi, std::vector<double> d2phi,
                               std::size_t n_electrodes, std::vector<std::size_t> channel_map)
    : grid_(std::move(grid)), phi_(std::move(phi)), dphi_(std::move(dphi)), d2phi_(std::move(d2phi)),
      n_electrodes_(n_electrodes), channel_map_(std::move(channel_map)) {
    const std::size_t n = grid_.size();
    if (n_electrodes_ == 0) throw InvalidArgument("basis needs at least one electrode");
    if (n < 2) throw InvalidArgument("basis grid needs at least two points");
    for (std::size_t j = 1; j < n; ++j) {
        if (!(grid_[j] > grid_[j - 1])) {
            throw InvalidArgument("basis grid must be strictly increasing (index " + std::to_string(j) + ")");
        }
    }
    const std::size_t expected = n_electrodes_ * n;
    if (phi_.size() != expected || dphi_.size() != expected || d2phi_.size() != expected) {
        throw InvalidArgument("basis matrices must be n_electrodes x grid length");
    }
    if (channel_map_.empty()) {
        channel_map_.resize(n_electrodes_);
        for (std::size_t i = 0; i < n_electrodes_; ++i) channel_map_[i] = i;
    }
    if (channel_map_.size() != n_electrodes_) {
        throw InvalidArgument("channel map must list one channel per electrode");
    }
    n_channels_ = *std::max_element(channel_map_.begin(), channel_map_.end()) + 1;
    std::vector<bool> used(n_channels_, false);
    for (auto c : channel_map_) used[c] = true;
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        throw InvalidArgument("channel map must use every channel index below its maximum");
    }

    phi_t_.resize(expected);
    dphi_t_.resize(expected);
    for (std::size_t i = 0; i < n_electrodes_; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            phi_t_[j * n_electrodes_ + i] = phi_[i * n + j];
            dphi_t_[j * n_electrodes_ + i] = dphi_[i * n + j];
        }
    }

    step_ = (grid_.back() - grid_.front()) / static_cast<double>(n - 1);
    uniform_ = true;
    for (std::size_t j = 1; j < n && uniform_; ++j) {
        uniform_ = std::abs((grid_[j] - grid_[j - 1]) - step_) <= 1e-9 * step_;
    }
}

std::span<const double> ElectrodeBasis::phi_row(std::size_t electrode) const {
    return std::span<const double>(phi_).subspan(electrode * grid_.size(), grid_.size());
}

std::span<const double> ElectrodeBasis::dphi_row(std::size_t electrode) const {
    return std::span<const double>(dphi_).subspan(electrode * grid_.size(), grid_.size());
}

std::size_t ElectrodeBasis::cell_index(double z) const {
    const std::size_t last = grid_.size() - 2;
    if (uniform_) {
        const double r = std::floor((z - grid_.front()) / step_);
        std::size_t j = r <= 0.0 ? 0 : std::min(static_cast<std::size_t>(r), last);
        // floor() on a rounded quotient can land one cell off near nodes.
        if (j > 0 && z < grid_[j]) --j;
        if (j < last && z >= grid_[j + 1]) ++j;
        return j;
    }
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), z);
    const std::size_t idx = static_cast<std::size_t>(it - grid_.begin());
    return idx == 0 ? 0 : std::min(idx - 1, last);
}

std::vector<double> ElectrodeBasis::electrode_voltages(std::span<const double> channel_voltages) const {
    if (channel_voltages.size() != n_channels_) {
        throw InvalidArgument("expected " + std::to_string(n_channels_) + " channel voltages, got " +
                              std::to_string(channel_voltages.size()));
    }
    std::vector<double> e(n_electrodes_);
    for (std::size_t i = 0; i < n_electrodes_; ++i) e[i] = channel_voltages[channel_map_[i]];
    return e;
}

PotentialSample ElectrodeBasis::sample_electrodes(std::span<const double> e, double z) const {
    const std::size_t j = cell_index(z);
    const double z0 = grid_[j];
    const double h = grid_[j + 1] - z0;
    const double t = (z - z0) / h;
    const std::size_t m = n_electrodes_;
    const double* p0 = phi_t_.data() + j * m;
    const double* p1 = p0 + m;
    const double* d0 = dphi_t_.data() + j * m;
    const double* d1 = d0 + m;
    double y0 = 0.0, y1 = 0.0, m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        y0 += e[i] * p0[i];
        y1 += e[i] * p1[i];
        m0 += e[i] * d0[i];
        m1 += e[i] * d1[i];
    }
    const double t2 = t * t;
    const double t3 = t2 * t;
    PotentialSample s;
    s.value = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 +
              (t3 - t2) * h * m1;
    s.slope = (6 * t2 - 6 * t) / h * y0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) / h * y1 +
              (3 * t2 - 2 * t) * m1;
    s.curvature = (12 * t - 6) / (h * h) * y0 + (6 * t - 4) / h * m0 + (-12 * t + 6) / (h * h) * y1 +
                  (6 * t - 2) / h * m1;
    return s;
}

void ElectrodeBasis::check_channel_bound(std::size_t max_channels) const {
    if (n_channels_ > max_channels) {
        throw InvalidArgument("basis drives " + std::to_string(n_channels_) +
                              " channels but the AWG provides " + std::to_string(max_channels));
    }
}

double ElectrodeBasis::derivative_mismatch() const {
    const std::size_t n = grid_.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n_electrodes_; ++i) {
        const double* p = phi_.data() + i * n;
        const double* d = dphi_.data() + i * n;
        double scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(d[j]));
        if (scale == 0.0) continue;
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const double fd = (p[j + 1] - p[j - 1]) / (grid_[j + 1] - grid_[j - 1]);
            worst = std::max(worst, std::abs(fd - d[j]) / scale);
        }
    }
    return worst;
}

ElectrodeBasis make_surrogate_basis(std::size_t n_electrodes, double pitch, double width, double span,
                                    double grid_step) {
    if (n_electrodes < 2) throw InvalidArgument("surrogate basis needs at least two electrodes");
    if (!(pitch > 0.0) || !(width > 0.0) || !(grid_step > 0.0) || !(span > 0.0)) {
        throw InvalidArgument("surrogate geometry parameters must be positive");
    }
    const double half = 0.5 * static_cast<double>(n_electrodes - 1);
    if (half * pitch > span * (1.0 + 1e-12)) {
        throw InvalidArgument("grid span does not cover all electrode centers");
    }
    const auto n = static_cast<std::size_t>(std::llround(2.0 * span / grid_step)) + 1;
    std::vector<double> grid(n);
    for (std::size_t j = 0; j < n; ++j) grid[j] = -span + static_cast<double>(j) * grid_step;

    std::vector<double> phi(n_electrodes * n), dphi(n_electrodes * n), d2phi(n_electrodes * n);
    const double w2 = width * width;
    for (std::size_t i = 0; i < n_electrodes; ++i) {
        const double zc = (static_cast<double>(i) - half) * pitch;
        for (std::size_t j = 0; j < n; ++j) {
            const double u = grid[j] - zc;
            const double g = std::exp(-u * u / (2.0 * w2));
            phi[i * n + j] = g;
            dphi[i * n + j] = -u / w2 * g;
            d2phi[i * n + j] = (u * u / w2 - 1.0) / w2 * g;
        }
    }
    return ElectrodeBasis(std::move(grid), std::move(phi), std::move(dphi), std::move(d2phi), n_electrodes);
}

PotentialSample evaluate_potential(const ElectrodeBasis& basis, std::span<const double> voltages, double z) {
    if (!basis.contains(z)) {
        throw OutOfRange("z = " + std::to_string(z) + " m lies outside the basis grid");
    }
    const auto e = basis.electrode_voltages(voltages);
    return basis.sample_electrodes(e, z);
}

namespace detail {

double refine_stationary_point(const ElectrodeBasis& basis, std::span<const double> e, double lo, double hi) {
    auto slope = [&](double z) { return basis.sample_electrodes(e, z).slope; };
    const double s_lo = slope(lo);
    const double s_hi = slope(hi);
    const auto r = numerics::bracketed_root(slope, lo, hi, s_lo, s_hi, 53, 300);
    double z = r.root;
    // Polish with Newton steps on the Hermite slope, kept inside the bracket.
    for (int k = 0; k < 4; ++k) {
        const auto s = basis.sample_electrodes(e, z);
        if (std::abs(s.slope) < 1e-12 || s.curvature == 0.0) break;
        const double next = z - s.slope / s.curvature;
        if (!(next >= r.lo && next <= r.hi)) break;
        if (std::abs(basis.sample_electrodes(e, next).slope) >= std::abs(s.slope)) break;
        z = next;
    }
    return z;
}

namespace {

// Barrier height walking from z_min towards `edge` (direction +1 or -1):
// the nearest local maximum, or the potential at the edge if none.
double barrier_value(const ElectrodeBasis& basis, std::span<const double> e, double z_min, double edge,
                     int direction) {
    const auto grid = basis.grid();
    auto beyond = [&](double z) { return direction > 0 ? z >= edge : z <= edge; };
    auto maximum_between = [&](double a, double b) {
        return basis.sample_electrodes(e, refine_stationary_point(basis, e, std::min(a, b), std::max(a, b))).value;
    };

    std::size_t j = basis.cell_index(z_min);
    if (direction > 0) {
        ++j;
    } else if (grid[j] >= z_min) {
        if (j == 0) return basis.sample_electrodes(e, edge).value;
        --j;
    }
    double prev_z = z_min;
    bool rising = false;  // seen a point where the potential climbs away from z_min
    while (!beyond(grid[j])) {
        const double z = grid[j];
        const double s = basis.sample_electrodes(e, z).slope * direction;
        if (s == 0.0) return basis.sample_electrodes(e, z).value;
        if (s < 0.0) {
            if (!rising) return basis.sample_electrodes(e, z_min).value;
            return maximum_between(prev_z, z);
        }
        rising = true;
        prev_z = z;
        if (direction > 0 ? j + 1 >= grid.size() : j == 0) break;
        j = direction > 0 ? j + 1 : j - 1;
    }
    const double s_edge = basis.sample_electrodes(e, edge).slope * direction;
    if (s_edge < 0.0 && rising) return maximum_between(prev_z, edge);
    return basis.sample_electrodes(e, edge).value;
}

}  // namespace

Well characterize_minimum(const ElectrodeBasis& basis, std::span<const double> e, const IonSpecies& species,
                          double z_min, Interval search) {
    const auto s = basis.sample_electrodes(e, z_min);
    const double left = barrier_value(basis, e, z_min, search.lo, -1);
    const double right = barrier_value(basis, e, z_min, search.hi, +1);
    Well w;
    w.position = z_min;
    w.curvature = species.charge * s.curvature;
    w.omega = w.curvature > 0.0 ? std::sqrt(w.curvature / species.mass) : 0.0;
    const double barrier = std::min(left, right);
    w.depth = std::max(0.0, species.charge * (barrier - s.value) / kElementaryCharge);
    return w;
}

std::optional<double> track_minimum(const ElectrodeBasis& basis, std::span<const double> e, double z_guess,
                                    double max_distance) {
    if (!basis.contains(z_guess)) return std::nullopt;
    const auto s0 = basis.sample_electrodes(e, z_guess);
    if (s0.slope == 0.0) {
        if (s0.curvature > 0.0) return z_guess;
        return std::nullopt;
    }
    const int dir = s0.slope > 0.0 ? -1 : +1;
    const auto grid = basis.grid();
    double prev = z_guess;
    std::size_t j = basis.cell_index(z_guess);
    if (dir > 0) ++j;
    else if (grid[j] >= z_guess) {
        if (j == 0) return std::nullopt;
        --j;
    }
    while (true) {
        const double z = grid[j];
        if (std::abs(z - z_guess) > max_distance) return std::nullopt;
        const double s = basis.sample_electrodes(e, z).slope;
        if (s == 0.0) return z;
        if ((s > 0.0) == (dir > 0)) {
            // slope sign flipped: minimum lies between prev and z
            return refine_stationary_point(basis, e, std::min(prev, z), std::max(prev, z));
        }
        prev = z;
        if (dir > 0) {
            if (j + 1 >= grid.size()) return std::nullopt;
            ++j;
        } else {
            if (j == 0) return std::nullopt;
            --j;
        }
    }
}

}  // namespace detail

std::vector<Well> find_wells(const ElectrodeBasis& basis, std::span<const double> voltages,
                             const IonSpecies& species, Interval search) {
    species.validate();
    if (!(search.hi > search.lo)) throw InvalidArgument("search interval must have hi > lo");
    if (!basis.contains(search.lo) || !basis.contains(search.hi)) {
        throw OutOfRange("search interval extends beyond the basis grid");
    }
    const auto e = basis.electrode_voltages(voltages);
    const auto grid = basis.grid();

    // Sample points: interval ends plus every grid node strictly inside.
    const auto first = std::upper_bound(grid.begin(), grid.end(), search.lo) - grid.begin();
    const auto last = std::lower_bound(grid.begin(), grid.end(), search.hi) - grid.begin();
    const std::size_t j0 = static_cast<std::size_t>(first);
    const std::size_t count = last > first ? static_cast<std::size_t>(last - first) : 0;

    std::vector<double> zs;
    std::vector<double> slopes;
    zs.reserve(count + 2);
    slopes.reserve(count + 2);
    zs.push_back(search.lo);
    slopes.push_back(basis.sample_electrodes(e, search.lo).slope);
    if (count > 0) {
        std::vector<double> node_slopes(count);
        const std::size_t n = basis.grid_size();
        kernels::superpose(basis.dphi().subspan(j0), n, e, node_slopes);
        for (std::size_t k = 0; k < count; ++k) {
            zs.push_back(grid[j0 + k]);
            slopes.push_back(node_slopes[k]);
        }
    }
    zs.push_back(search.hi);
    slopes.push_back(basis.sample_electrodes(e, search.hi).slope);

    // Walk sign changes of the slope, carrying the last nonzero sign over flat runs.
    std::vector<double> minima;
    int last_sign = 0;
    double last_z = zs.front();
    for (std::size_t k = 0; k < zs.size(); ++k) {
        const double s = slopes[k];
        const int sign = s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
        if (sign == 0) continue;
        if (last_sign < 0 && sign > 0) {
            minima.push_back(detail::refine_stationary_point(basis, e, last_z, zs[k]));
        }
        last_sign = sign;
        last_z = zs[k];
    }

    std::vector<Well> wells;
    wells.reserve(minima.size());
    for (double z : minima) {
        Well w = detail::characterize_minimum(basis, e, species, z, search);
        if (w.curvature > 0.0) wells.push_back(w);
    }
    std::sort(wells.begin(), wells.end(), [](const Well& a, const Well& b) { return a.position < b.position; });
    return wells;
}

}  // namespace tgates
