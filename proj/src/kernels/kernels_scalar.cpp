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

#include "tgates/kernels.hpp"

#include <cmath>

namespace tgates::kernels::scalar {

void superpose(std::span<const double> rows, std::size_t stride,
               std::span<const double> coeffs, std::span<double> out) {
    const std::size_t n = out.size();
    for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double c = coeffs[i];
        const double* row = rows.data() + i * stride;
        for (std::size_t j = 0; j < n; ++j) out[j] = std::fma(c, row[j], out[j]);
    }
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * a[j] * b[j];
    return acc;
}

void one_pole_lowpass(std::span<double> samples, std::size_t channels,
                      std::span<const double> poles) {
    if (channels == 0) return;
    const std::size_t rows = samples.size() / channels;
    for (std::size_t t = 1; t < rows; ++t) {
        const double* prev = samples.data() + (t - 1) * channels;
        double* cur = samples.data() + t * channels;
        for (std::size_t c = 0; c < channels; ++c) {
            const double x = cur[c];
            cur[c] = std::fma(poles[c], prev[c] - x, x);
        }
    }
}

}  // namespace tgates::kernels::scalar
