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

// Small numerical helpers shared across modules.

#include "tgates/errors.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <utility>

namespace tgates::numerics {

struct RootResult {
    double root = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::uintmax_t iterations = 0;
};

/// Bracketed root of f on [lo, hi] (TOMS 748). f_lo and f_hi must differ in sign
/// or one of them must be zero. `bits` is the number of significant bits requested.
template <class F>
RootResult bracketed_root(F&& f, double lo, double hi, double f_lo, double f_hi, int bits = 52,
                          std::uintmax_t max_iter = 200) {
    if (f_lo == 0.0) return {lo, lo, lo, 0};
    if (f_hi == 0.0) return {hi, hi, hi, 0};
    if ((f_lo > 0.0) == (f_hi > 0.0)) throw BracketError("interval does not bracket a root", f_lo, f_hi);
    std::uintmax_t iters = max_iter;
    const auto [a, b] = boost::math::tools::toms748_solve(
        std::forward<F>(f), lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(bits), iters);
    return {0.5 * (a + b), a, b, iters};
}

}  // namespace tgates::numerics
