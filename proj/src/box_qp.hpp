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

#include <Eigen/Dense>

namespace tgates::detail {

struct BoxQpResult {
    Eigen::VectorXd x;
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// minimize 1/2 x'Hx - b'x  subject to lo <= x <= hi (bounds may be infinite).
/// H must be symmetric positive definite. Projected Newton with an
/// epsilon-active set; the KKT residual is ||x - P(x - (Hx - b))||_inf.
BoxQpResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& b, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi, const Eigen::VectorXd& x0, double tolerance,
                         int max_iterations = 500);

}  // namespace tgates::detail
