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

#if defined(__x86_64__) || defined(_M_X64)
#define TGATES_HAVE_AVX2_TU 1
#include <immintrin.h>
#endif

#include <cmath>

namespace tgates::kernels::avx2 {

#if defined(TGATES_HAVE_AVX2_TU) && defined(TGATES_BUILD_AVX2)

void superpose(std::span<const double> rows, std::size_t stride,
               std::span<const double> coeffs, std::span<double> out) {
    const std::size_t n = out.size();
    const std::size_t n4 = n & ~std::size_t{3};
    const std::size_t m = coeffs.size();

    // Blocks of 16 outputs keep four accumulators in registers across the
    // electrode loop.
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
        __m256d a0 = _mm256_setzero_pd();
        __m256d a1 = _mm256_setzero_pd();
        __m256d a2 = _mm256_setzero_pd();
        __m256d a3 = _mm256_setzero_pd();
        for (std::size_t i = 0; i < m; ++i) {
            const __m256d c = _mm256_set1_pd(coeffs[i]);
            const double* row = rows.data() + i * stride + j;
            a0 = _mm256_fmadd_pd(c, _mm256_loadu_pd(row), a0);
            a1 = _mm256_fmadd_pd(c, _mm256_loadu_pd(row + 4), a1);
            a2 = _mm256_fmadd_pd(c, _mm256_loadu_pd(row + 8), a2);
            a3 = _mm256_fmadd_pd(c, _mm256_loadu_pd(row + 12), a3);
        }
        _mm256_storeu_pd(out.data() + j, a0);
        _mm256_storeu_pd(out.data() + j + 4, a1);
        _mm256_storeu_pd(out.data() + j + 8, a2);
        _mm256_storeu_pd(out.data() + j + 12, a3);
    }
    for (; j < n4; j += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t i = 0; i < m; ++i) {
            const __m256d c = _mm256_set1_pd(coeffs[i]);
            acc = _mm256_fmadd_pd(c, _mm256_loadu_pd(rows.data() + i * stride + j), acc);
        }
        _mm256_storeu_pd(out.data() + j, acc);
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
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w.data() + j), _mm256_loadu_pd(a.data() + j));
        const __m256d p1 =
            _mm256_mul_pd(_mm256_loadu_pd(w.data() + j + 4), _mm256_loadu_pd(a.data() + j + 4));
        acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(b.data() + j), acc0);
        acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(b.data() + j + 4), acc1);
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc0);
    double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; j < n; ++j) acc += w[j] * a[j] * b[j];
    return acc;
}

void one_pole_lowpass(std::span<double> samples, std::size_t channels,
                      std::span<const double> poles) {
    if (channels == 0) return;
    const std::size_t rows = samples.size() / channels;
    const std::size_t c4 = channels & ~std::size_t{3};
    for (std::size_t t = 1; t < rows; ++t) {
        const double* prev = samples.data() + (t - 1) * channels;
        double* cur = samples.data() + t * channels;
        std::size_t c = 0;
        for (; c < c4; c += 4) {
            const __m256d x = _mm256_loadu_pd(cur + c);
            const __m256d y = _mm256_loadu_pd(prev + c);
            const __m256d p = _mm256_loadu_pd(poles.data() + c);
            _mm256_storeu_pd(cur + c, _mm256_fmadd_pd(p, _mm256_sub_pd(y, x), x));
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

}  // namespace tgates::kernels::avx2
