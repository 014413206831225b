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

// Data-parallel inner loops shared by the trap, synthesis and filter code.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, AVX2 (x86-64) and NEON (aarch64) variants. The active variant
// is picked once at startup from the CPU feature set and can be overridden
// with the TGATES_SIMD environment variable (scalar | avx2 | neon) or
// set_backend(). superpose() and one_pole_lowpass() are bit-identical across
// backends; weighted_dot() differs only by summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace tgates::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend backend) noexcept;
bool backend_supported(Backend backend) noexcept;
Backend best_backend() noexcept;
Backend active_backend() noexcept;

/// Throws InvalidArgument if the backend is not available on this host.
void set_backend(Backend backend);

/// out[j] = sum_i coeffs[i] * rows[i * stride + j] for j < out.size().
/// Accumulation is fused multiply-add in ascending i.
void superpose(std::span<const double> rows, std::size_t stride,
               std::span<const double> coeffs, std::span<double> out);

/// sum_j w[j] * a[j] * b[j]
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);

/// In-place one-pole recursion over a row-major samples x channels block:
///   y[t][c] = x[t][c] + pole[c] * (y[t-1][c] - x[t][c]),  y[0] = x[0].
void one_pole_lowpass(std::span<double> samples, std::size_t channels,
                      std::span<const double> poles);

// Direct access to each variant, used by the equivalence tests and benchmarks.
namespace scalar {
void superpose(std::span<const double> rows, std::size_t stride,
               std::span<const double> coeffs, std::span<double> out);
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
void one_pole_lowpass(std::span<double> samples, std::size_t channels,
                      std::span<const double> poles);
}  // namespace scalar

namespace avx2 {
void superpose(std::span<const double> rows, std::size_t stride,
               std::span<const double> coeffs, std::span<double> out);
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
void one_pole_lowpass(std::span<double> samples, std::size_t channels,
                      std::span<const double> poles);
}  // namespace avx2

namespace neon {
void superpose(std::span<const double> rows, std::size_t stride,
               std::span<const double> coeffs, std::span<double> out);
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
void one_pole_lowpass(std::span<double> samples, std::size_t channels,
                      std::span<const double> poles);
}  // namespace neon

}  // namespace tgates::kernels
