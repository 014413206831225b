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

#if defined(__aarch64__) && defined(__ARM_NEON)
#define TGATES_HAVE_NEON_TU 1
#include <arm_neon.h>
#endif

#include <cmath>

namespace tgates::kernels::neon {

#if defined(TGATES_HAVE_NEON_TU)

void superpose(std::span<const double> rows, std::size_t stride,
               std::span<const double> coeffs, std::span<double> out) {
    const std::size_t n = out.size();
    const std::size_t m = coeffs.size();
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        float64x2_t a0 = vdupq_n_f64(0.0);
        float64x2_t a1 = vdupq_n_f64(0.0);
        float64x2_t a2 = vdupq_n_f64(0.0);
        float64x2_t a3 = vdupq_n_f64(0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const float64x2_t c = vdupq_n_f64(coeffs[i]);
            const double* row = rows.data() + i * stride + j;
            a0 = vfmaq_f64(a0, c, vld1q_f64(row));
            a1 = vfmaq_f64(a1, c, vld1q_f64(row + 2));
            a2 = vfmaq_f64(a2, c, vld1q_f64(row + 4));
            a3 = vfmaq_f64(a3, c, vld1q_f64(row + 6));
        }
        vst1q_f64(out.data() + j, a0);
        vst1q_f64(out.data() + j + 2, a1);
        vst1q_f64(out.data() + j + 4, a2);
        vst1q_f64(out.data() + j + 6, a3);
    }
    for (; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc = std::fma(coeffs[i], rows[i * stride + j], acc);
        out[j] = acc;
    }
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
    const std::size_t n = w.size();
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const float64x2_t p0 = vmulq_f64(vld1q_f64(w.data() + j), vld1q_f64(a.data() + j));
        const float64x2_t p1 = vmulq_f64(vld1q_f64(w.data() + j + 2), vld1q_f64(a.data() + j + 2));
        acc0 = vfmaq_f64(acc0, p0, vld1q_f64(b.data() + j));
        acc1 = vfmaq_f64(acc1, p1, vld1q_f64(b.data() + j + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; j < n; ++j) acc += w[j] * a[j] * b[j];
    return acc;
}

void one_pole_lowpass(std::span<double> samples, std::size_t channels,
                      std::span<const double> poles) {
    if (channels == 0) return;
    const std::size_t rows = samples.size() / channels;
    const std::size_t c2 = channels & ~std::size_t{1};
    for (std::size_t t = 1; t < rows; ++t) {
        const double* prev = samples.data() + (t - 1) * channels;
        double* cur = samples.data() + t * channels;
        std::size_t c = 0;
        for (; c < c2; c += 2) {
            const float64x2_t x = vld1q_f64(cur + c);
            const float64x2_t d = vsubq_f64(vld1q_f64(prev + c), x);
            vst1q_f64(cur + c, vfmaq_f64(x, vld1q_f64(poles.data() + c), d));
        }
        for (; c < channels; ++c) {
            const double x = cur[c];
            cur[c] = std::fma(poles[c], prev[c] - x, x);
        }
    }
}

#else

void superpose(std::span<const double> rows, std::size_t stride,
               std::span<const double> coeffs, std::span<double> out) {
    scalar::superpose(rows, stride, coeffs, out);
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
    return scalar::weighted_dot(w, a, b);
}

void one_pole_lowpass(std::span<double> samples, std::size_t channels,
                      std::span<const double> poles) {
    scalar::one_pole_lowpass(samples, channels, poles);
}

#endif

}  // namespace tgates::kernels::neon
