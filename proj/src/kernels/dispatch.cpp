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

#include "tgates/errors.hpp"
#include "tgates/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace tgates::kernels {

namespace {

struct Table {
    Backend backend;
    void (*superpose)(std::span<const double>, std::size_t, std::span<const double>, std::span<double>);
    double (*weighted_dot)(std::span<const double>, std::span<const double>, std::span<const double>);
    void (*one_pole_lowpass)(std::span<double>, std::size_t, std::span<const double>);
};

constexpr Table kScalar{Backend::Scalar, &scalar::superpose, &scalar::weighted_dot,
                        &scalar::one_pole_lowpass};
constexpr Table kAvx2{Backend::Avx2, &avx2::superpose, &avx2::weighted_dot,
                      &avx2::one_pole_lowpass};
constexpr Table kNeon{Backend::Neon, &neon::superpose, &neon::weighted_dot,
                      &neon::one_pole_lowpass};

const Table* table_for(Backend backend) {
    switch (backend) {
        case Backend::Avx2: return &kAvx2;
        case Backend::Neon: return &kNeon;
        case Backend::Scalar: break;
    }
    return &kScalar;
}

const Table* initial_table() {
    Backend chosen = best_backend();
    if (const char* env = std::getenv("TGATES_SIMD")) {
        const std::string v(env);
        if (v == "scalar") chosen = Backend::Scalar;
        else if (v == "avx2" && backend_supported(Backend::Avx2)) chosen = Backend::Avx2;
        else if (v == "neon" && backend_supported(Backend::Neon)) chosen = Backend::Neon;
    }
    return table_for(chosen);
}

std::atomic<const Table*>& active() {
    static std::atomic<const Table*> table{initial_table()};
    return table;
}

}  // namespace

std::string_view backend_name(Backend backend) noexcept {
    switch (backend) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

bool backend_supported(Backend backend) noexcept {
    switch (backend) {
        case Backend::Scalar: return true;
        case Backend::Avx2:
#if defined(TGATES_BUILD_AVX2) && (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::Neon:
#if defined(__aarch64__) && defined(__ARM_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend best_backend() noexcept {
    if (backend_supported(Backend::Avx2)) return Backend::Avx2;
    if (backend_supported(Backend::Neon)) return Backend::Neon;
    return Backend::Scalar;
}

Backend active_backend() noexcept { return active().load(std::memory_order_acquire)->backend; }

void set_backend(Backend backend) {
    if (!backend_supported(backend)) {
        throw InvalidArgument("SIMD backend '" + std::string(backend_name(backend)) +
                              "' is not supported on this host");
    }
    active().store(table_for(backend), std::memory_order_release);
}

void superpose(std::span<const double> rows, std::size_t stride, std::span<const double> coeffs,
               std::span<double> out) {
    active().load(std::memory_order_acquire)->superpose(rows, stride, coeffs, out);
}

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
    return active().load(std::memory_order_acquire)->weighted_dot(w, a, b);
}

void one_pole_lowpass(std::span<double> samples, std::size_t channels, std::span<const double> poles) {
    active().load(std::memory_order_acquire)->one_pole_lowpass(samples, channels, poles);
}

}  // namespace tgates::kernels
