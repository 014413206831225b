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

#include "tgates/qubit.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace tgates {

/// State preparation and measurement errors.
///
/// The bright-state survival through the preparation and readout path is
///   s = (1 - prep) * (1 - transfer)^n
/// with n transfer pulses, and the observed bright probability is
///   p_obs = dark + (1 - bright - dark) * s * p_ideal,
/// an affine map with amplitude (1 - bright - dark) * s and offset dark.
struct SpamModel {
    double prep = 0.0;        // preparation error
    double transfer = 0.008;  // infidelity of each transfer pulse
    double dark = 0.0;        // readout error towards bright (dark ion counted bright)
    double bright = 0.0;      // readout error towards dark
    int transfer_pulses = 2;  // used when the sequence does not list its own

    void validate() const;
    double amplitude(int n_transfers) const;
    double offset() const noexcept { return dark; }
};

double apply_spam(double p_ideal, const SpamModel& spam);
double apply_spam(double p_ideal, const SpamModel& spam, int n_transfers);

/// Random stream for one scan point, keyed by (seed, scan, ion, point) so that
/// results do not depend on evaluation order.
std::mt19937_64 point_stream(std::uint64_t seed, std::uint64_t scan, std::uint64_t ion, std::uint64_t point);

struct CountSample {
    double p_hat = 0.0;
    double sigma = 0.0;
};

/// sigma = sqrt(p(1 - p) / N) with p clamped to [1/(2N), 1 - 1/(2N)].
double projection_sigma(double p_hat, int shots);

/// Draws k ~ Binomial(N, p_obs) and returns k / N with its projection-noise sigma.
CountSample sample_counts(double p_obs, int shots, std::mt19937_64& stream);

struct ScanPoint {
    double x = 0.0;
    double p_hat = 0.0;
    double sigma = 0.0;
    int n = 0;
    double p_obs = 0.0;  // noiseless expectation after SPAM
};

struct ScanResult {
    std::string variable;
    std::string unit;
    std::string label;
    std::uint64_t seed = 0;
    std::vector<ScanPoint> points;

    std::vector<double> x() const;
    std::vector<double> y() const;
    std::vector<double> sigma() const;
};

void write_scan_csv(const ScanResult& scan, const std::filesystem::path& path,
                    const std::vector<std::string>& extra_comments = {});
/// Reads `x,p_hat,sigma,n`; metadata comes from a `# scan variable=... unit=... seed=...` line when present.
ScanResult read_scan_csv(const std::filesystem::path& path);

enum class ScanVariable {
    BeamOffTime,  // x in s, substituted into the scanned transport segment
    Phase,        // x in rad, substituted into the scanned phase shift
    Frequency,    // x in Hz, base detuning 2 pi x
};

/// One ion's experiment: its pulse sequence and which elements a scan touches.
struct IonProgram {
    std::string name;
    std::vector<PulseElement> sequence;
    std::optional<std::size_t> scanned_segment;  // defaults to the first transport segment
    std::optional<std::size_t> scanned_phase;    // defaults to the first phase shift
};

struct ScanSpec {
    ScanVariable variable = ScanVariable::BeamOffTime;
    std::vector<double> grid;
    int shots = 350;
    std::uint64_t scan_index = 0;
    bool noiseless = false;  // p_hat = p_obs, sigma from the projection formula
};

struct MeasurementSetup {
    SpamModel spam;
    SequenceOptions sequence;
    std::uint64_t seed = 0;
    int threads = 1;
};

std::string_view scan_variable_name(ScanVariable v) noexcept;
std::string_view scan_variable_unit(ScanVariable v) noexcept;

/// Rebuilds every ion's sequence for each grid value, propagates, applies SPAM
/// and samples counts. Returns one result per ion, in grid order.
std::vector<ScanResult> run_scan(std::span<const IonProgram> ions, const ScanSpec& spec,
                                 const MeasurementSetup& setup);

/// Runs fn(i) for i in [0, n) on up to `threads` workers; the first exception is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace tgates
