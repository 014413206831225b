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

#include "tgates/qubit.hpp"

#include "tgates/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tgates {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::Matrix2cd drive_matrix(double phi) {
    Eigen::Matrix2cd m;
    m << 0.0, std::polar(1.0, -phi), std::polar(1.0, phi), 0.0;
    return m;
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite");
}

}  // namespace

double GateUnitary::unitarity_error() const {
    return (matrix.adjoint() * matrix - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

QubitState GateUnitary::apply(const QubitState& s) const {
    return {matrix(0, 0) * s.up + matrix(0, 1) * s.down, matrix(1, 0) * s.up + matrix(1, 1) * s.down};
}

GateUnitary rotation_unitary(double theta, double phi) {
    GateUnitary g;
    g.matrix = std::cos(theta / 2.0) * Eigen::Matrix2cd::Identity() - kI * std::sin(theta / 2.0) * drive_matrix(phi);
    return g;
}

Eigen::Matrix2cd step_unitary(double omega, double delta, double phi, double dt) {
    const double h = 0.5 * std::hypot(delta, omega);
    if (h == 0.0 || dt == 0.0) return Eigen::Matrix2cd::Identity();
    const double a = h * dt;
    const double s = std::sin(a) / h;
    const Complex off_lo = 0.5 * omega * std::polar(1.0, phi);
    Eigen::Matrix2cd u;
    u(0, 0) = Complex(std::cos(a), -s * 0.5 * delta);
    u(1, 1) = Complex(std::cos(a), s * 0.5 * delta);
    u(1, 0) = -kI * s * off_lo;
    u(0, 1) = -kI * s * std::conj(off_lo);
    return u;
}

namespace {

QubitState normalized(QubitState s) {
    const double n = s.norm();
    if (std::abs(n - 1.0) > 1e-12 && n > 0.0) {
        s.up /= n;
        s.down /= n;
    }
    return s;
}

}  // namespace

QubitState propagate_spin(const QubitState& state, std::span<const double> omega, std::span<const double> delta,
                          double phi, double dt) {
    if (omega.size() != delta.size()) throw InvalidArgument("Rabi and detuning series differ in length");
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    check_finite(phi, "drive phase");
    GateUnitary u;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        check_finite(omega[k], "Rabi frequency");
        check_finite(delta[k], "detuning");
        u.matrix = step_unitary(omega[k], delta[k], phi, dt) * u.matrix;
    }
    return normalized(u.apply(state));
}

double transit_probability_analytic(double omega0, double chi, double t0, double t) {
    if (!(chi > 0.0)) throw InvalidArgument("chi must be positive");
    const double f = std::erf(chi * t0) - std::erf(chi * (t0 - t));
    const double zeta = omega0 / chi * std::sqrt(kPi) * f;
    const double c = std::cos(0.5 * zeta);
    return c * c;
}

double ConstantVelocityPath::duration() const {
    const double dz = z_end - z_start;
    if (dz == 0.0) return 0.0;
    if (velocity == 0.0 || (velocity > 0.0) != (dz > 0.0)) {
        throw InvalidArgument("velocity must be nonzero and point from z_start towards z_end");
    }
    return dz / velocity;
}

double TransportSegment::duration() const {
    if (const auto* p = std::get_if<ConstantVelocityPath>(&path)) return p->duration();
    const auto& r = std::get<RealizedTrajectory>(path);
    if (r.size() < 2) return 0.0;
    return r.times.back() - r.times.front();
}

namespace {

struct Kinematics {
    double z;
    double v;
};

class TransportPropagator {
  public:
    TransportPropagator(const TransportSegment& seg, double phase, double base, const SequenceOptions& opt)
        : seg_(seg), phase_(phase), base_(base) {
        double peak = 0.0;
        for (const auto& b : seg.beams) peak += b.peak_rabi;
        dt_max_ = peak > 0.0 ? opt.max_rotation_step / peak : std::numeric_limits<double>::infinity();
    }

    // Integrates [a, b] with the beams on or off, at most dt_max per step.
    void piece(Eigen::Matrix2cd& u, double a, double b, bool beams_on, const auto& kinematics) const {
        if (!(b > a)) return;
        const double span = b - a;
        std::size_t n = 64;
        if (std::isfinite(dt_max_)) n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt_max_)));
        if (!beams_on) n = std::min<std::size_t>(n, 4096);
        const double h = span / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = a + (static_cast<double>(k) + 0.5) * h;
            const Kinematics kin = kinematics(t);
            double omega = 0.0;
            if (beams_on) {
                for (const auto& beam : seg_.beams) omega += rabi_at_position(beam, kin.z);
            }
            u = step_unitary(omega, detuning(kin, beams_on), phase_, h) * u;
        }
    }

    double detuning(const Kinematics& kin, bool beams_on) const {
        if (seg_.beams.empty()) return base_;
        const BeamGeometry* nearest = &seg_.beams.front();
        for (const auto& b : seg_.beams) {
            if (std::abs(kin.z - b.center) < std::abs(kin.z - nearest->center)) nearest = &b;
        }
        if (!beams_on) return base_;
        return total_detuning_at(*nearest, kin.z, kin.v, base_);
    }

  private:
    const TransportSegment& seg_;
    double phase_;
    double base_;
    double dt_max_;
};

void propagate_transport(Eigen::Matrix2cd& u, const TransportSegment& seg, double phase_offset,
                         const SequenceOptions& opt, std::size_t index) {
    for (const auto& b : seg.beams) {
        try {
            b.validate();
        } catch (const InvalidArgument& e) {
            throw SequenceError(e.what(), index);
        }
    }
    double total = 0.0;
    try {
        total = seg.duration();
    } catch (const InvalidArgument& e) {
        throw SequenceError(e.what(), index);
    }
    double t_beam = total;
    if (seg.beam_off_time) {
        t_beam = *seg.beam_off_time;
        if (!(t_beam >= 0.0 && t_beam <= total * (1.0 + 1e-12))) {
            throw SequenceError("beam-off time " + std::to_string(t_beam) + " s lies outside the segment", index);
        }
        t_beam = std::min(t_beam, total);
    }
    const TransportPropagator prop(seg, seg.phase + phase_offset, opt.base_detuning, opt);

    if (const auto* p = std::get_if<ConstantVelocityPath>(&seg.path)) {
        auto kin = [p](double t) { return Kinematics{p->z_start + p->velocity * t, p->velocity}; };
        prop.piece(u, 0.0, t_beam, true, kin);
        prop.piece(u, t_beam, total, false, kin);
        return;
    }
    const auto& r = std::get<RealizedTrajectory>(seg.path);
    if (r.size() < 2) return;
    const double t_first = r.times.front();
    for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        const double a = r.times[k] - t_first;
        const double b = r.times[k + 1] - t_first;
        const double h = b - a;
        auto kin = [&, k, a, h](double t) {
            const double f = (t - a) / h;
            return Kinematics{r.position[k] + f * (r.position[k + 1] - r.position[k]),
                              r.velocity[k] + f * (r.velocity[k + 1] - r.velocity[k])};
        };
        if (t_beam >= b) {
            prop.piece(u, a, b, true, kin);
        } else if (t_beam <= a) {
            prop.piece(u, a, b, false, kin);
        } else {
            prop.piece(u, a, t_beam, true, kin);
            prop.piece(u, t_beam, b, false, kin);
        }
    }
}

}  // namespace

SequenceResult run_sequence(const QubitState& initial, std::span<const PulseElement> elements,
                            const SequenceOptions& options) {
    if (!(options.max_rotation_step > 0.0)) throw InvalidArgument("max rotation step must be positive");
    check_finite(options.base_detuning, "base detuning");
    SequenceResult result;
    double phase_offset = 0.0;
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const auto& el = elements[i];
        if (const auto* seg = std::get_if<TransportSegment>(&el)) {
            propagate_transport(u, *seg, phase_offset, options, i);
        } else if (const auto* pulse = std::get_if<StaticPulse>(&el)) {
            const double phi = pulse->phase + phase_offset;
            if (pulse->rabi > 0.0) {
                const double duration = std::abs(pulse->theta) / pulse->rabi;
                const double sign = pulse->theta < 0.0 ? -1.0 : 1.0;
                u = step_unitary(sign * pulse->rabi, pulse->detuning + options.base_detuning, phi, duration) * u;
            } else {
                u = rotation_unitary(pulse->theta, phi).matrix * u;
            }
        } else if (const auto* shift = std::get_if<PhaseShift>(&el)) {
            phase_offset += shift->phi;
        } else {
            ++result.transfer_pulses;
        }
    }
    result.unitary.matrix = u;
    result.state = normalized(result.unitary.apply(initial));
    return result;
}

double average_fidelity(const GateUnitary& actual, const GateUnitary& target) {
    if (actual.unitarity_error() > 1e-6 || target.unitarity_error() > 1e-6) {
        throw InvalidArgument("average fidelity needs unitary inputs");
    }
    const Complex tr = (target.matrix.adjoint() * actual.matrix).trace();
    return (2.0 + std::norm(tr)) / 6.0;
}

TransitParameters transit_parameters(const BeamGeometry& beam, const ConstantVelocityPath& path) {
    beam.validate();
    TransitParameters out;
    out.omega0 = 0.5 * beam.peak_rabi;
    out.chi = std::sqrt(static_cast<double>(beam.profile_exponent)) * std::abs(path.velocity) *
              std::sin(beam.angle) / beam.waist;
    out.t0 = (beam.center - path.z_start) / path.velocity;
    return out;
}

}  // namespace tgates
