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

#include <algorithm>
#include <cmath>
#include <vector>

namespace tgates::detail {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

double objective(const Eigen::MatrixXd& H, const Eigen::VectorXd& b, const Eigen::VectorXd& x) {
    return 0.5 * x.dot(H * x) - b.dot(x);
}

}  // namespace

BoxQpResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& b, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi, const Eigen::VectorXd& x0, double tolerance,
                         int max_iterations) {
    const Eigen::Index n = b.size();
    BoxQpResult result;
    Eigen::VectorXd x = project(x0.size() == n ? x0 : Eigen::VectorXd::Zero(n), lo, hi);
    double f = objective(H, b, x);
    std::vector<Eigen::Index> free;
    free.reserve(static_cast<std::size_t>(n));

    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::VectorXd g = H * x - b;
        const double kkt = (x - project(x - g, lo, hi)).lpNorm<Eigen::Infinity>();
        result.kkt_residual = kkt;
        result.iterations = it;
        if (kkt < tolerance) {
            result.converged = true;
            break;
        }
        const double eps = std::min(kkt, 1e-3);
        free.clear();
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool at_lo = x[i] <= lo[i] + eps && g[i] > 0.0;
            const bool at_hi = x[i] >= hi[i] - eps && g[i] < 0.0;
            if (!at_lo && !at_hi) free.push_back(i);
        }

        // Newton step on the free set, scaled gradient on the held variables.
        Eigen::VectorXd d(n);
        for (Eigen::Index i = 0; i < n; ++i) d[i] = -g[i] / H(i, i);
        if (!free.empty()) {
            const auto m = static_cast<Eigen::Index>(free.size());
            Eigen::MatrixXd Hf(m, m);
            Eigen::VectorXd gf(m);
            for (Eigen::Index r = 0; r < m; ++r) {
                gf[r] = g[free[r]];
                for (Eigen::Index c = 0; c < m; ++c) Hf(r, c) = H(free[r], free[c]);
            }
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(Hf);
            const Eigen::VectorXd df = ldlt.solve(-gf);
            for (Eigen::Index r = 0; r < m; ++r) d[free[r]] = df[r];
        }

        // Armijo backtracking along the projection arc.
        double alpha = 1.0;
        Eigen::VectorXd x_new = x;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = project(x + alpha * d, lo, hi);
            f_new = objective(H, b, x_new);
            if (f_new <= f + 1e-4 * g.dot(x_new - x)) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // Fall back to a projected gradient step with exact line length.
            const double gHg = g.dot(H * g);
            const double step = gHg > 0.0 ? g.squaredNorm() / gHg : 1.0;
            x_new = project(x - step * g, lo, hi);
            f_new = objective(H, b, x_new);
            if (!(f_new < f)) break;
        }
        x = std::move(x_new);
        f = f_new;
        result.iterations = it + 1;
    }
    const Eigen::VectorXd g = H * x - b;
    result.kkt_residual = (x - project(x - g, lo, hi)).lpNorm<Eigen::Infinity>();
    result.converged = result.kkt_residual < tolerance;
    result.x = std::move(x);
    return result;
}

}  // namespace tgates::detail
