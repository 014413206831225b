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

#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

using namespace tgates;
namespace k = tgates::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

struct Variant {
    k::Backend backend;
    decltype(&k::scalar::superpose) superpose;
    decltype(&k::scalar::weighted_dot) weighted_dot;
    decltype(&k::scalar::one_pole_lowpass) one_pole_lowpass;
};

std::vector<Variant> simd_variants() {
    std::vector<Variant> out;
    if (k::backend_supported(k::Backend::Avx2)) {
        out.push_back({k::Backend::Avx2, &k::avx2::superpose, &k::avx2::weighted_dot, &k::avx2::one_pole_lowpass});
    }
    if (k::backend_supported(k::Backend::Neon)) {
        out.push_back({k::Backend::Neon, &k::neon::superpose, &k::neon::weighted_dot, &k::neon::one_pole_lowpass});
    }
    return out;
}

}  // namespace

TEST_CASE("scalar superpose matches the definition") {
    const std::vector<double> rows{1, 2, 3, 4, 5, 6};  // 2 rows, stride 3
    const std::vector<double> c{0.5, -1.0};
    std::vector<double> out(3);
    k::scalar::superpose(rows, 3, c, out);
    CHECK(out == std::vector<double>{0.5 - 4.0, 1.0 - 5.0, 1.5 - 6.0});
}

TEST_CASE("scalar one-pole recursion matches the closed-form step response") {
    const double pole = 0.8;
    std::vector<double> x(20, 1.0);
    x[0] = 0.0;
    const std::vector<double> poles{pole};
    k::scalar::one_pole_lowpass(x, 1, poles);
    for (std::size_t t = 1; t < x.size(); ++t) {
        CHECK(x[t] == doctest::Approx(1.0 - std::pow(pole, static_cast<double>(t))).epsilon(1e-14));
    }
}

TEST_CASE("SIMD kernels agree with the scalar reference") {
    const auto variants = simd_variants();
    if (variants.empty()) {
        MESSAGE("no SIMD backend on this host; only the scalar path is exercised");
        return;
    }
    std::mt19937_64 rng(11);
    for (const auto& var : variants) {
        CAPTURE(k::backend_name(var.backend));
        for (std::size_t n : {1u, 3u, 4u, 5u, 7u, 8u, 17u, 64u, 301u, 3601u}) {
            for (std::size_t rows : {1u, 2u, 5u, 30u}) {
                const auto m = random_vector(rows * (n + 3), rng);
                const auto c = random_vector(rows, rng);
                std::vector<double> ref(n), got(n);
                k::scalar::superpose(m, n + 3, c, ref);
                var.superpose(m, n + 3, c, got);
                CHECK(ref == got);
            }
            const auto w = random_vector(n, rng);
            const auto a = random_vector(n, rng);
            const auto b = random_vector(n, rng);
            double mag = 0.0;
            for (std::size_t i = 0; i < n; ++i) mag += std::abs(w[i] * a[i] * b[i]);
            CHECK(std::abs(var.weighted_dot(w, a, b) - k::scalar::weighted_dot(w, a, b)) <= 1e-14 * mag + 1e-300);

            for (std::size_t channels : {1u, 3u, 4u, 6u, 30u}) {
                auto s_ref = random_vector(n * channels, rng);
                auto s_got = s_ref;
                std::vector<double> poles(channels);
                for (std::size_t c2 = 0; c2 < channels; ++c2) poles[c2] = 0.5 + 0.015 * static_cast<double>(c2);
                k::scalar::one_pole_lowpass(s_ref, channels, poles);
                var.one_pole_lowpass(s_got, channels, poles);
                CHECK(s_ref == s_got);
            }
        }
    }
}

TEST_CASE("backend selection") {
    CHECK(k::backend_supported(k::Backend::Scalar));
    CHECK(k::backend_supported(k::best_backend()));
    const auto before = k::active_backend();
    k::set_backend(k::Backend::Scalar);
    CHECK(k::active_backend() == k::Backend::Scalar);
    for (auto b : {k::Backend::Avx2, k::Backend::Neon}) {
        if (!k::backend_supported(b)) CHECK_THROWS_AS(k::set_backend(b), InvalidArgument);
    }
    k::set_backend(before);
}

TEST_CASE("dispatched kernels follow the active backend") {
    std::mt19937_64 rng(5);
    const auto m = random_vector(30 * 101, rng);
    const auto c = random_vector(30, rng);
    std::vector<double> ref(101), got(101);
    k::scalar::superpose(m, 101, c, ref);
    for (auto b : {k::Backend::Scalar, k::Backend::Avx2, k::Backend::Neon}) {
        if (!k::backend_supported(b)) continue;
        k::set_backend(b);
        k::superpose(m, 101, c, got);
        CHECK(ref == got);
    }
    k::set_backend(k::best_backend());
}
