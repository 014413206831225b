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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace tgates {

/// Charged particle moving along the trap axis.
struct IonSpecies {
    double mass = 0.0;    // kg
    double charge = 0.0;  // C

    /// 9Be+: 1.4965e-26 kg, +1.602e-19 C.
    static IonSpecies beryllium9();
    void validate() const;
};

/// A local minimum of the axial potential energy q*Phi(z).
struct Well {
    double position = 0.0;   // m
    double omega = 0.0;      // rad/s
    double depth = 0.0;      // eV, smaller of the two escape barriers
    double curvature = 0.0;  // J/m^2, q * Phi''(position)
};

struct PotentialSample {
    double value = 0.0;      // V
    double slope = 0.0;      // V/m
    double curvature = 0.0;  // V/m^2
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-electrode unit-voltage axial potentials sampled on a common grid.
///
/// Matrices are stored electrode-major (n_electrodes x grid) for whole-grid
/// superposition, with a grid-major copy for point evaluation. Electrodes are
/// wired to AWG channels through channel_map; several electrodes may share a
/// channel.
class ElectrodeBasis {
  public:
    ElectrodeBasis(std::vector<double> grid, std::vector<double> phi, std::vector<double> dphi,
                   std::vector<double> d2phi, std::size_t n_electrodes,
                   std::vector<std::size_t> channel_map = {});

    std::size_t n_electrodes() const noexcept { return n_electrodes_; }
    std::size_t n_channels() const noexcept { return n_channels_; }
    std::size_t grid_size() const noexcept { return grid_.size(); }

    std::span<const double> grid() const noexcept { return grid_; }
    std::span<const double> phi() const noexcept { return phi_; }
    std::span<const double> dphi() const noexcept { return dphi_; }
    std::span<const double> d2phi() const noexcept { return d2phi_; }
    std::span<const double> phi_row(std::size_t electrode) const;
    std::span<const double> dphi_row(std::size_t electrode) const;
    std::span<const std::size_t> channel_map() const noexcept { return channel_map_; }

    double z_min() const noexcept { return grid_.front(); }
    double z_max() const noexcept { return grid_.back(); }
    bool contains(double z) const noexcept { return z >= grid_.front() && z <= grid_.back(); }

    /// Index j of the grid cell [z_j, z_{j+1}] containing z (clamped to the last cell).
    std::size_t cell_index(double z) const;

    /// Expands per-channel voltages to per-electrode voltages.
    std::vector<double> electrode_voltages(std::span<const double> channel_voltages) const;

    /// Interpolated Phi, Phi', Phi'' from per-electrode voltages (no range check).
    PotentialSample sample_electrodes(std::span<const double> electrode_volts, double z) const;

    /// Throws InvalidArgument when more distinct channels are used than max_channels.
    void check_channel_bound(std::size_t max_channels) const;

    /// Largest relative mismatch between a central difference of phi and dphi
    /// at interior grid points where |dphi| is significant.
    double derivative_mismatch() const;

  private:
    std::vector<double> grid_;
    std::vector<double> phi_;
    std::vector<double> dphi_;
    std::vector<double> d2phi_;
    std::vector<double> phi_t_;   // grid-major copies
    std::vector<double> dphi_t_;
    std::size_t n_electrodes_;
    std::vector<std::size_t> channel_map_;
    std::size_t n_channels_;
    bool uniform_ = false;
    double step_ = 0.0;
};

/// Analytic stand-in: phi_i(z) = exp(-(z - z_i)^2 / (2 width^2)) with centers
/// spaced by pitch and symmetric about z = 0; grid covers [-span, +span].
ElectrodeBasis make_surrogate_basis(std::size_t n_electrodes, double pitch, double width,
                                    double span, double grid_step);

/// Reads `z,phi_1,...,phi_N`. Derivatives come from the companion file
/// (`z,dphi_1..N,d2phi_1..N` in any order) when given, else central differences.
ElectrodeBasis load_basis(const std::filesystem::path& path,
                          const std::optional<std::filesystem::path>& derivative_path = std::nullopt,
                          std::vector<std::size_t> channel_map = {});

/// Writes the basis (and optionally the derivative companion) with full precision.
void save_basis(const ElectrodeBasis& basis, const std::filesystem::path& path,
                const std::optional<std::filesystem::path>& derivative_path = std::nullopt);

/// Phi(z) = sum_i V_{channel(i)} phi_i(z), cubic Hermite between grid samples.
/// Throws OutOfRange when z lies outside the grid.
PotentialSample evaluate_potential(const ElectrodeBasis& basis, std::span<const double> voltages,
                                   double z);

/// All local minima of q*Phi inside `search`, sorted by position.
std::vector<Well> find_wells(const ElectrodeBasis& basis, std::span<const double> voltages,
                             const IonSpecies& species, Interval search);

namespace detail {

/// Minimum of the potential in [lo, hi] given opposite-signed slopes at the ends.
double refine_stationary_point(const ElectrodeBasis& basis, std::span<const double> electrode_volts,
                               double lo, double hi);

/// Fills Well fields for a refined minimum; `search` bounds the barrier scan.
Well characterize_minimum(const ElectrodeBasis& basis, std::span<const double> electrode_volts,
                          const IonSpecies& species, double z_min, Interval search);

/// Finds the minimum nearest to `z_guess` by walking downhill in grid steps.
/// Returns nullopt when no minimum exists within max_distance.
std::optional<double> track_minimum(const ElectrodeBasis& basis,
                                    std::span<const double> electrode_volts, double z_guess,
                                    double max_distance);

}  // namespace detail

}  // namespace tgates
