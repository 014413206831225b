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

#include "tgates/errors.hpp"

#include <Eigen/Dense>
#include "json.hpp"

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tgates {

/// A parametric curve y = f(p, x).
struct FitModel {
    std::string name;
    std::vector<std::string> parameters;
    std::vector<std::string> units;
    /// Parameters constrained positive; optimized as log(p).
    std::vector<bool> positive;
    std::function<double(std::span<const double> p, double x)> evaluate;
    /// Fills df/dp at x; empty when only finite differences are available.
    std::function<void(std::span<const double> p, double x, std::span<double> grad)> gradient;
    /// Names of parameters that the fitted values leave undetermined (e.g. a
    /// phase when the amplitude vanishes).
    std::function<std::vector<std::string>(std::span<const double> values, std::span<const double> sigmas)>
        degenerate;

    std::size_t size() const noexcept { return parameters.size(); }
    std::size_t index_of(std::string_view parameter) const;
};

/// transit_rabi, sinusoid, erf_step and gaussian.
const std::vector<FitModel>& model_registry();
const FitModel& find_model(std::string_view name);

struct FitResult {
    std::string model;
    std::vector<std::string> parameters;
    std::vector<std::string> units;
    std::vector<double> values;
    std::vector<double> sigmas;
    Eigen::MatrixXd covariance;
    double chi2 = 0.0;
    double chi2_reduced = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<std::string> degenerate;

    double value(std::string_view parameter) const;
    double sigma(std::string_view parameter) const;
};

class RankDeficiencyError : public Error {
  public:
    RankDeficiencyError(FitResult partial, std::vector<std::string> parameters);
    const FitResult& partial() const noexcept { return partial_; }
    const std::vector<std::string>& parameters() const noexcept { return parameters_; }

  private:
    FitResult partial_;
    std::vector<std::string> parameters_;
};

struct FitOptions {
    int max_iterations = 500;
    double chi2_tolerance = 1e-10;     // relative change between accepted steps
    double gradient_tolerance = 1e-12;
    double finite_difference_step = 1e-6;
    double initial_damping = 1e-3;
    bool analytic_jacobian = true;
};

/// Weighted Levenberg-Marquardt on sum(((y - f(x)) / sigma)^2). The covariance is
/// (J^T W J)^-1 at the optimum, without rescaling by the reduced chi-square.
FitResult fit_curve(const FitModel& model, std::span<const double> x, std::span<const double> y,
                    std::span<const double> sigma, std::span<const double> guess, const FitOptions& options = {});

struct InitialGuess {
    std::vector<double> values;
    bool flat = false;  // data had no variation; amplitude guessed as zero
};

InitialGuess initial_guess(const FitModel& model, std::span<const double> x, std::span<const double> y);

/// {model, parameters: {name: {value, sigma, unit}}, covariance, chi2_reduced, converged, ...}
nlohmann::json fit_result_json(const FitResult& result);

}  // namespace tgates
