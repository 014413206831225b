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
#include "tgates/qubit.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

using namespace tgates;

namespace {

BeamGeometry fig_beam() {
    BeamGeometry b;
    b.center = 0.0;
    b.angle = kPi / 4.0;
    b.waist = 56.6e-6;
    b.peak_rabi = 2.0 * kTwoPi * 5.669e3;
    return b;
}

double overlap(const QubitState& a, const QubitState& b) {
    return std::norm(std::conj(a.up) * b.up + std::conj(a.down) * b.down);
}

}  // namespace

TEST_CASE("rotation unitaries") {
    const auto x = rotation_unitary(kPi, 0.0);
    CHECK(x.unitarity_error() < 1e-15);
    CHECK(x.apply(QubitState::spin_up()).p_down() == doctest::Approx(1.0));
    const auto h = rotation_unitary(kPi / 2.0, 0.3);
    CHECK(h.apply(QubitState::spin_up()).p_up() == doctest::Approx(0.5));
    CHECK(average_fidelity(h, h) == doctest::Approx(1.0));
    // F(X, I) = (2 + 0) / 6
    CHECK(average_fidelity(x, GateUnitary{}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("step unitary solves the constant Hamiltonian") {
    const double omega = kTwoPi * 10e3, delta = kTwoPi * 4e3, dt = 37e-6;
    const auto u = step_unitary(omega, delta, 0.0, dt);
    CHECK((u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    // Detuned Rabi formula for the spin-flip probability.
    const double g = std::hypot(omega, delta);
    const double p_flip = std::pow(omega / g * std::sin(g * dt / 2.0), 2);
    CHECK(std::norm(u(1, 0)) == doctest::Approx(p_flip).epsilon(1e-12));
}

TEST_CASE("piecewise propagation with constant drive matches Rabi flopping") {
    const double omega = kTwoPi * 5e3, dt = 1e-7;
    const std::size_t n = 1234;
    const std::vector<double> om(n, omega), de(n, 0.0);
    const auto s = propagate_spin(QubitState::spin_up(), om, de, 0.0, dt);
    CHECK(s.p_up() == doctest::Approx(std::pow(std::cos(omega * n * dt / 2.0), 2)).epsilon(1e-12));
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("transit through a Gaussian beam matches the erf closed form") {
    const BeamGeometry b = fig_beam();
    const double v = 0.43882;
    const ConstantVelocityPath path{-131.646e-6, 131.646e-6, v};
    const auto tp = transit_parameters(b, path);
    CHECK(tp.omega0 == doctest::Approx(kTwoPi * 5.669e3));
    CHECK(tp.chi == doctest::Approx(std::sqrt(2.0) * v * std::sin(b.angle) / b.waist));
    CHECK(tp.t0 == doctest::Approx(131.646e-6 / v));
    for (double t : {0.0, 50e-6, 200e-6, 300e-6, 417e-6, 599e-6}) {
        TransportSegment seg;
        seg.path = path;
        seg.beams = {b};
        seg.beam_off_time = t;
        const std::vector<PulseElement> e{seg};
        const double p = run_sequence(QubitState::spin_up(), e).p_up();
        CHECK(std::abs(p - transit_probability_analytic(tp.omega0, tp.chi, tp.t0, t)) < 1e-6);
    }
}

TEST_CASE("Ramsey sequence matches the product of ideal rotations") {
    for (double phi : {0.0, 0.7, kPi / 2.0, 2.5, kPi}) {
        const std::vector<PulseElement> e{StaticPulse{kPi / 2.0, 0.0, 0.0, 0.0}, PhaseShift{phi},
                                          StaticPulse{kPi / 2.0, 0.0, 0.0, 0.0}};
        const auto r = run_sequence(QubitState::spin_up(), e);
        const GateUnitary expect{rotation_unitary(kPi / 2.0, phi).matrix * rotation_unitary(kPi / 2.0, 0.0).matrix};
        CHECK(overlap(r.state, expect.apply(QubitState::spin_up())) == doctest::Approx(1.0));
        CHECK(r.p_up() == doctest::Approx(0.5 * (1.0 - std::cos(phi))).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("transfer pulses are counted and leave the state alone") {
    const std::vector<PulseElement> e{TransferPulse{}, StaticPulse{kPi / 3.0, 0.0, 0.0, 0.0}, TransferPulse{}};
    const auto r = run_sequence(QubitState::spin_up(), e);
    CHECK(r.transfer_pulses == 2);
    CHECK(r.p_up() == doctest::Approx(std::pow(std::cos(kPi / 6.0), 2)));
}

TEST_CASE("two beams in one segment add their Rabi frequencies") {
    BeamGeometry a = fig_beam();
    a.peak_rabi *= 0.5;
    const ConstantVelocityPath path{-300e-6, 300e-6, 1.0};
    TransportSegment one;
    one.path = path;
    one.beams = {fig_beam()};
    TransportSegment two = one;
    two.beams = {a, a};
    const std::vector<PulseElement> e1{one}, e2{two};
    CHECK(run_sequence(QubitState::spin_up(), e1).p_up() ==
          doctest::Approx(run_sequence(QubitState::spin_up(), e2).p_up()).epsilon(1e-12));
}

TEST_CASE("invalid sequences are rejected") {
    TransportSegment seg;
    seg.path = ConstantVelocityPath{0.0, 100e-6, 1.0};
    seg.beams = {fig_beam()};
    seg.beam_off_time = 1.0;  // longer than the 100 us segment
    const std::vector<PulseElement> e{seg};
    CHECK_THROWS_AS(run_sequence(QubitState::spin_up(), e), SequenceError);
    const ConstantVelocityPath wrong{0.0, 100e-6, -1.0};
    CHECK_THROWS_AS(wrong.duration(), InvalidArgument);
}
