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

#include "tgates/beam.hpp"
#include "tgates/fitting.hpp"
#include "tgates/measurement.hpp"
#include "tgates/qubit.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tgates {

struct CalibrationReport {
    std::string quantity;
    double value = 0.0;
    std::string unit;
    double residual = 0.0;
    std::uintmax_t iterations = 0;
    std::string method;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool converged = false;
    nlohmann::json details = nlohmann::json::object();
};

/// {quantity, value, unit, residual, iterations, method, bracket, converged, details}
nlohmann::json calibration_report_json(const CalibrationReport& report);

/// Total rotation angle for a constant-velocity transit through the whole beam,
/// (1 / |v|) * integral of Omega(z) dz by adaptive Gauss-Kronrod quadrature.
double pulse_area(const BeamGeometry& beam, double velocity);

/// Constant-velocity path through the beam from -extent to +extent about its centre.
ConstantVelocityPath transit_path(const BeamGeometry& beam, double velocity);

struct VelocitySolution {
    double velocity = 0.0;     // m/s
    double area = 0.0;         // rad, at the solved velocity
    double target_overlap = 0.0;  // |<target|psi>|^2 from full propagation at zero detuning
    CalibrationReport report;
};

/// Speed v in [v_lo, v_hi] with pulse_area(v) = theta_target, to the given
/// relative tolerance. The solution is checked by propagating the spin through
/// the transit; an overlap below 0.9999 with R(theta) |up> is a numerical failure.
VelocitySolution solve_velocity(const BeamGeometry& beam, double theta_target, double v_lo, double v_hi,
                                double relative_tolerance = 1e-8);

/// v = sqrt(2) w0 chi.
double deduce_velocity(double chi, double waist);

struct DopplerNullSetup {
    BeamGeometry beam;                   // beam.misalignment holds the alpha to be recovered
    double speed = 10.0;                 // m/s, same magnitude in both directions
    std::vector<double> frequency_grid;  // Hz, base detuning offsets
    int shots = 250;
    SpamModel spam;
    std::uint64_t seed = 0;
    int threads = 1;
    bool noiseless = false;
};

struct DopplerNullResult {
    double alpha = 0.0;        // rad
    double alpha_sigma = 0.0;  // rad
    ScanResult forward;
    ScanResult reverse;
    FitResult forward_fit;
    FitResult reverse_fit;
    CalibrationReport report;
};

/// Frequency scans with the ion moving forward and then reversed through the
/// same beam. The Doppler shift k alpha v changes sign with v, so the Gaussian
/// line centres satisfy f_fwd - f_rev = -k alpha |v| / pi and
///   alpha = -pi (f_fwd - f_rev) / (k |v|).
DopplerNullResult doppler_null(const DopplerNullSetup& setup);

enum class StarkModel {
    Intensity,  // residual detuning follows the local intensity
    Constant,   // residual detuning applied uniformly across the transit window
};

/// Average fidelity of the transit gate against R(theta_target) when the beam
/// carries a residual detuning delta. The ion crosses the full beam extent at
/// speed v.
double stark_fidelity(const BeamGeometry& beam, double delta, double theta_target, double velocity,
                      StarkModel model = StarkModel::Intensity);

/// Gate unitary for a full transit of a single beam at constant velocity.
GateUnitary transit_unitary(const BeamGeometry& beam, double velocity, double base_detuning = 0.0);

}  // namespace tgates
