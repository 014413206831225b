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

#include "tgates/scenario.hpp"

#include "tgates/constants.hpp"
#include "tgates/errors.hpp"
#include "tgates/fitting.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

namespace tgates {

namespace {

class ExpressionParser {
  public:
    explicit ExpressionParser(std::string_view text) : text_(text) {}

    double parse() {
        const double v = sum();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character");
        return v;
    }

  private:
    [[noreturn]] void fail(const char* what) const {
        throw ConfigError(std::string(what) + " in expression '" + std::string(text_) + "' at offset " +
                          std::to_string(pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double sum() {
        double v = product();
        for (;;) {
            if (accept('+')) v += product();
            else if (accept('-')) v -= product();
            else return v;
        }
    }

    double product() {
        double v = unary();
        for (;;) {
            if (accept('*')) {
                v *= unary();
            } else if (accept('/')) {
                const double d = unary();
                if (d == 0.0) fail("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return primary();
    }

    double primary() {
        skip_space();
        if (accept('(')) {
            const double v = sum();
            if (!accept(')')) fail("missing ')'");
            return v;
        }
        if (text_.substr(pos_, 2) == "pi") {
            pos_ += 2;
            return kPi;
        }
        const std::string rest(text_.substr(pos_));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(rest, &used);
        } catch (const std::exception&) {
            fail("expected a number");
        }
        pos_ += used;
        skip_space();
        // Implicit product such as "2pi".
        if (text_.substr(pos_, 2) == "pi") {
            pos_ += 2;
            v *= kPi;
        }
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

// A JSON value with its dotted path for error messages.
class Node {
  public:
    Node(const nlohmann::json& value, std::string path) : value_(value), path_(std::move(path)) {}

    const nlohmann::json& json() const { return value_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_ + ": " + what); }

    bool has(const std::string& key) const { return value_.is_object() && value_.contains(key); }

    Node at(const std::string& key) const {
        if (!value_.is_object()) fail("expected an object");
        if (!value_.contains(key)) fail("missing key '" + key + "'");
        return Node(value_.at(key), path_.empty() ? key : path_ + "." + key);
    }

    Node at(std::size_t i) const { return Node(value_.at(i), path_ + "[" + std::to_string(i) + "]"); }

    double number() const {
        if (value_.is_number()) return value_.get<double>();
        if (value_.is_string()) {
            try {
                return parse_pi_expression(value_.get<std::string>());
            } catch (const ConfigError& e) {
                fail(e.what());
            }
        }
        fail("expected a number or expression");
    }

    double number(const std::string& key, double fallback) const { return has(key) ? at(key).number() : fallback; }

    double positive(const std::string& key, double scale) const {
        const double v = at(key).number() * scale;
        if (!(v > 0.0) || !std::isfinite(v)) at(key).fail("must be positive");
        return v;
    }

    std::string string() const {
        if (!value_.is_string()) fail("expected a string");
        return value_.get<std::string>();
    }

    std::string string(const std::string& key, const std::string& fallback) const {
        return has(key) ? at(key).string() : fallback;
    }

    long long integer() const {
        const double v = number();
        if (v != std::floor(v)) fail("expected an integer");
        return static_cast<long long>(v);
    }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& v = value_.at(key);
        if (!v.is_boolean()) at(key).fail("expected true or false");
        return v.get<bool>();
    }

    std::size_t size() const {
        if (!value_.is_array()) fail("expected an array");
        return value_.size();
    }

    void allow_only(std::initializer_list<const char*> keys) const {
        if (!value_.is_object()) fail("expected an object");
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& item : value_.items()) {
            if (!allowed.count(item.key())) fail("unknown key '" + item.key() + "'");
        }
    }

  private:
    const nlohmann::json& value_;
    std::string path_;
};

IonSpecies parse_species(const Node& n) {
    if (n.json().is_string()) {
        const auto name = n.string();
        if (name == "Be9" || name == "9Be+" || name == "beryllium9") return IonSpecies::beryllium9();
        n.fail("unknown species '" + name + "'");
    }
    n.allow_only({"mass_amu", "charge_e"});
    IonSpecies s;
    s.mass = n.positive("mass_amu", kAtomicMass);
    s.charge = n.number("charge_e", 1.0) * kElementaryCharge;
    if (s.charge == 0.0) n.at("charge_e").fail("must be nonzero");
    return s;
}

BasisSpec parse_basis(const Node& n, const std::filesystem::path& base_dir) {
    n.allow_only({"surrogate", "file", "derivatives", "channel_map", "max_channels"});
    BasisSpec b;
    if (n.has("file")) {
        FileBasisSpec f;
        f.potentials = base_dir / n.at("file").string();
        if (n.has("derivatives")) f.derivatives = base_dir / n.at("derivatives").string();
        b.source = f;
    } else {
        SurrogateBasisSpec s;
        if (n.has("surrogate")) {
            const Node m = n.at("surrogate");
            m.allow_only({"electrodes", "pitch_um", "width_um", "span_um", "step_um"});
            if (m.has("electrodes")) {
                const auto e = m.at("electrodes").integer();
                if (e < 1) m.at("electrodes").fail("must be at least 1");
                s.electrodes = static_cast<std::size_t>(e);
            }
            if (m.has("pitch_um")) s.pitch = m.positive("pitch_um", kMicron);
            if (m.has("width_um")) s.width = m.positive("width_um", kMicron);
            if (m.has("span_um")) s.span = m.positive("span_um", kMicron);
            if (m.has("step_um")) s.step = m.positive("step_um", kMicron);
        }
        b.source = s;
    }
    if (n.has("channel_map")) {
        const Node m = n.at("channel_map");
        for (std::size_t i = 0; i < m.size(); ++i) {
            const auto c = m.at(i).integer();
            if (c < 0) m.at(i).fail("channel indices are non-negative");
            b.channel_map.push_back(static_cast<std::size_t>(c));
        }
    }
    if (n.has("max_channels")) {
        const auto c = n.at("max_channels").integer();
        if (c < 1) n.at("max_channels").fail("must be at least 1");
        b.max_channels = static_cast<std::size_t>(c);
    }
    return b;
}

VelocityCalibration parse_velocity_calibration(const Node& n) {
    n.allow_only({"beam", "theta", "v_lo_m_s", "v_hi_m_s"});
    VelocityCalibration c;
    c.beam = n.at("beam").string();
    c.theta = n.positive("theta", 1.0);
    c.v_lo = n.has("v_lo_m_s") ? n.positive("v_lo_m_s", 1.0) : c.v_lo;
    c.v_hi = n.has("v_hi_m_s") ? n.positive("v_hi_m_s", 1.0) : c.v_hi;
    if (!(c.v_hi > c.v_lo)) n.fail("v_hi_m_s must exceed v_lo_m_s");
    return c;
}

// Either a velocity or a calibration block must be present.
void parse_speed(const Node& n, std::optional<double>& velocity, std::optional<VelocityCalibration>& calibration) {
    if (n.has("calibrate")) calibration = parse_velocity_calibration(n.at("calibrate"));
    if (n.has("velocity_m_s")) velocity = n.at("velocity_m_s").number();
    if (velocity.has_value() == calibration.has_value()) n.fail("give exactly one of velocity_m_s and calibrate");
    if (velocity && !(std::isfinite(*velocity) && *velocity != 0.0)) n.at("velocity_m_s").fail("must be nonzero");
}

WellSpec parse_well(const Node& n) {
    n.allow_only({"name", "start_um", "end_um", "velocity_m_s", "calibrate", "omega_mhz", "depth_ev", "ramp_us"});
    WellSpec w;
    w.name = n.at("name").string();
    w.z_start = n.at("start_um").number() * kMicron;
    w.z_end = n.number("end_um", n.at("start_um").number()) * kMicron;
    if (w.z_end != w.z_start) parse_speed(n, w.velocity, w.calibration);
    if (n.has("omega_mhz")) w.omega = n.positive("omega_mhz", kTwoPi * 1e6);
    w.depth = n.number("depth_ev", w.depth);
    if (w.depth < 0.0) n.at("depth_ev").fail("must be non-negative");
    w.ramp = n.number("ramp_us", w.ramp / kMicrosecond) * kMicrosecond;
    if (w.ramp < 0.0) n.at("ramp_us").fail("must be non-negative");
    return w;
}

StarkProfile parse_stark_profile(const Node& n) {
    const auto s = n.string();
    if (s == "constant") return StarkProfile::Constant;
    if (s == "intensity") return StarkProfile::Intensity;
    n.fail("expected 'constant' or 'intensity'");
}

BeamSpec parse_beam(const Node& n) {
    n.allow_only({"center_um", "angle_deg", "angle_rad", "waist_um", "peak_rabi_khz", "calibrate", "profile_exponent",
                  "stark_offset_khz", "stark_profile", "misalignment_deg", "misalignment_rad", "wavelength_nm",
                  "retro_of", "waist_scale", "transmission"});
    BeamSpec b;
    auto& g = b.geometry;
    g.center = n.number("center_um", 0.0) * kMicron;
    if (n.has("angle_deg")) g.angle = n.at("angle_deg").number() * kDegree;
    if (n.has("angle_rad")) g.angle = n.at("angle_rad").number();
    if (n.has("waist_um")) g.waist = n.positive("waist_um", kMicron);
    g.peak_rabi = n.number("peak_rabi_khz", 0.0) * kKilohertzAngular;
    if (n.has("profile_exponent")) g.profile_exponent = static_cast<int>(n.at("profile_exponent").integer());
    g.stark_offset = n.number("stark_offset_khz", 0.0) * kKilohertzAngular;
    if (n.has("stark_profile")) g.stark_profile = parse_stark_profile(n.at("stark_profile"));
    if (n.has("misalignment_deg")) g.misalignment = n.at("misalignment_deg").number() * kDegree;
    if (n.has("misalignment_rad")) g.misalignment = n.at("misalignment_rad").number();
    if (n.has("wavelength_nm")) g.wavenumber = kTwoPi / n.positive("wavelength_nm", 1e-9);
    if (n.has("calibrate")) {
        const Node c = n.at("calibrate");
        c.allow_only({"theta", "velocity_m_s"});
        b.calibration = IntensityCalibration{c.positive("theta", 1.0), c.positive("velocity_m_s", 1.0)};
        if (n.has("peak_rabi_khz")) n.fail("give either peak_rabi_khz or calibrate");
    }
    if (n.has("retro_of")) {
        b.retro_of = n.at("retro_of").string();
        b.waist_scale = n.number("waist_scale", 1.0);
        b.transmission = n.number("transmission", 1.0);
    } else {
        try {
            BeamGeometry check = g;
            check.peak_rabi = std::max(check.peak_rabi, 0.0);
            check.validate();
        } catch (const InvalidArgument& e) {
            n.fail(e.what());
        }
    }
    return b;
}

TransportSpec parse_transport(const Node& n) {
    n.allow_only({"beams", "beam", "path", "well", "phase", "beam_off_us"});
    TransportSpec t;
    if (n.has("beam")) t.beams.push_back(n.at("beam").string());
    if (n.has("beams")) {
        const Node b = n.at("beams");
        for (std::size_t i = 0; i < b.size(); ++i) t.beams.push_back(b.at(i).string());
    }
    if (n.has("well") == n.has("path")) n.fail("give exactly one of well and path");
    if (n.has("well")) {
        t.path = n.at("well").string();
    } else {
        const Node p = n.at("path");
        p.allow_only({"start_um", "end_um", "velocity_m_s", "calibrate"});
        ConstantPathSpec c;
        c.z_start = p.at("start_um").number() * kMicron;
        c.z_end = p.at("end_um").number() * kMicron;
        parse_speed(p, c.velocity, c.calibration);
        t.path = c;
    }
    t.phase = n.number("phase", 0.0);
    if (n.has("beam_off_us")) t.beam_off_time = n.at("beam_off_us").number() * kMicrosecond;
    return t;
}

SequenceStepSpec parse_step(const Node& n) {
    if (!n.json().is_object() || n.json().size() != 1) n.fail("each step is an object with a single key");
    const auto key = n.json().begin().key();
    const Node body = n.at(key);
    if (key == "transport") return parse_transport(body);
    if (key == "phase_shift") return PhaseShift{body.number()};
    if (key == "transfer") return TransferPulse{};
    if (key == "pulse") {
        body.allow_only({"theta", "phase", "detuning_khz", "rabi_khz"});
        StaticPulse p;
        p.theta = body.at("theta").number();
        p.phase = body.number("phase", 0.0);
        p.detuning = body.number("detuning_khz", 0.0) * kKilohertzAngular;
        p.rabi = body.number("rabi_khz", 0.0) * kKilohertzAngular;
        return p;
    }
    n.fail("unknown step '" + key + "'");
}

ScanVariable parse_variable(const Node& n) {
    const auto s = n.string();
    if (s == "t_off") return ScanVariable::BeamOffTime;
    if (s == "phase") return ScanVariable::Phase;
    if (s == "frequency") return ScanVariable::Frequency;
    n.fail("expected 't_off', 'phase' or 'frequency'");
}

ScanConfig parse_scan(const Node& n) {
    n.allow_only({"name", "variable", "start", "stop", "points", "values", "shots", "noiseless", "fit"});
    ScanConfig s;
    s.variable = parse_variable(n.at("variable"));
    s.name = n.string("name", std::string(scan_variable_name(s.variable)));
    // Grid units: us for t_off, rad for phase, kHz for frequency.
    const double unit = s.variable == ScanVariable::BeamOffTime ? kMicrosecond
                        : s.variable == ScanVariable::Frequency ? kKilohertz
                                                                : 1.0;
    if (n.has("values")) {
        const Node v = n.at("values");
        for (std::size_t i = 0; i < v.size(); ++i) s.grid.push_back(v.at(i).number() * unit);
    } else {
        const double start = n.at("start").number();
        const double stop = n.at("stop").number();
        const auto points = n.at("points").integer();
        if (points < 2) n.at("points").fail("must be at least 2");
        for (long long i = 0; i < points; ++i) {
            s.grid.push_back((start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1)) * unit);
        }
    }
    if (s.grid.empty()) n.fail("scan grid is empty");
    if (n.has("shots")) {
        const auto shots = n.at("shots").integer();
        if (shots < 1) n.at("shots").fail("must be at least 1");
        s.shots = static_cast<int>(shots);
    }
    s.noiseless = n.boolean("noiseless", false);
    s.fit = n.string("fit", "");
    return s;
}

SpamModel parse_spam(const Node& n) {
    n.allow_only({"prep", "transfer", "dark", "bright", "transfer_pulses"});
    SpamModel s;
    s.prep = n.number("prep", s.prep);
    s.transfer = n.number("transfer", s.transfer);
    s.dark = n.number("dark", s.dark);
    s.bright = n.number("bright", s.bright);
    if (n.has("transfer_pulses")) s.transfer_pulses = static_cast<int>(n.at("transfer_pulses").integer());
    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        n.fail(e.what());
    }
    return s;
}

}  // namespace

double parse_pi_expression(std::string_view text) { return ExpressionParser(text).parse(); }

ElectrodeBasis BasisSpec::build() const {
    ElectrodeBasis basis = std::visit(
        [&](const auto& src) -> ElectrodeBasis {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, SurrogateBasisSpec>) {
                if (channel_map.empty()) {
                    return make_surrogate_basis(src.electrodes, src.pitch, src.width, src.span, src.step);
                }
                const ElectrodeBasis b = make_surrogate_basis(src.electrodes, src.pitch, src.width, src.span, src.step);
                return ElectrodeBasis({b.grid().begin(), b.grid().end()}, {b.phi().begin(), b.phi().end()},
                                      {b.dphi().begin(), b.dphi().end()}, {b.d2phi().begin(), b.d2phi().end()},
                                      b.n_electrodes(), channel_map);
            } else {
                return load_basis(src.potentials, src.derivatives, channel_map);
            }
        },
        source);
    if (max_channels) basis.check_channel_bound(*max_channels);
    return basis;
}

Scenario parse_scenario(const nlohmann::json& document, const std::filesystem::path& base_dir) {
    const Node root(document, "");
    root.allow_only({"name", "seed", "threads", "species", "basis", "synthesis", "filter", "wells", "beams", "spam",
                     "sequence_options", "ions", "scans", "description"});
    Scenario s;
    s.raw = document;
    s.name = root.string("name", "scenario");
    if (root.has("seed")) {
        const auto& v = document.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            root.at("seed").fail("expected a non-negative integer");
        }
        s.seed = v.get<std::uint64_t>();
    }
    if (root.has("threads")) s.threads = static_cast<int>(root.at("threads").integer());
    if (root.has("species")) s.species = parse_species(root.at("species"));
    if (root.has("basis")) s.basis = parse_basis(root.at("basis"), base_dir);

    if (root.has("synthesis")) {
        const Node n = root.at("synthesis");
        n.allow_only({"sample_rate_mhz", "vmax_v", "slew_v_per_us", "regularization", "depth_penalty",
                      "depth_iterations", "window_half_width_um"});
        if (n.has("sample_rate_mhz")) s.synthesis.sample_rate = n.positive("sample_rate_mhz", 1e6);
        if (n.has("vmax_v")) s.synthesis.options.vmax = n.positive("vmax_v", 1.0);
        if (n.has("slew_v_per_us")) s.synthesis.options.slew = n.positive("slew_v_per_us", 1e6);
        s.synthesis.options.regularization = n.number("regularization", s.synthesis.options.regularization);
        s.synthesis.options.depth_penalty = n.number("depth_penalty", s.synthesis.options.depth_penalty);
        if (n.has("depth_iterations")) {
            s.synthesis.options.depth_iterations = static_cast<int>(n.at("depth_iterations").integer());
        }
        if (n.has("window_half_width_um")) s.synthesis.window_half_width = n.positive("window_half_width_um", kMicron);
    }
    if (root.has("filter")) {
        const Node n = root.at("filter");
        n.allow_only({"cutoff_khz", "order", "enabled"});
        if (n.boolean("enabled", true)) {
            FilterModel f;
            const Node c = n.at("cutoff_khz");
            if (c.json().is_array()) {
                for (std::size_t i = 0; i < c.size(); ++i) f.cutoff.push_back(c.at(i).number() * kKilohertz);
            } else {
                f.cutoff.push_back(c.number() * kKilohertz);
            }
            if (n.has("order")) f.order = static_cast<int>(n.at("order").integer());
            try {
                f.validate();
            } catch (const InvalidArgument& e) {
                n.fail(e.what());
            }
            s.filter = f;
        }
    }
    if (root.has("wells")) {
        const Node n = root.at("wells");
        for (std::size_t i = 0; i < n.size(); ++i) s.wells.push_back(parse_well(n.at(i)));
    }
    if (root.has("beams")) {
        const Node n = root.at("beams");
        if (!n.json().is_object()) n.fail("expected an object of named beams");
        for (const auto& item : n.json().items()) s.beams[item.key()] = parse_beam(n.at(item.key()));
    }
    if (root.has("spam")) s.spam = parse_spam(root.at("spam"));
    if (root.has("sequence_options")) {
        const Node n = root.at("sequence_options");
        n.allow_only({"base_detuning_khz", "max_rotation_step"});
        s.sequence_options.base_detuning = n.number("base_detuning_khz", 0.0) * kKilohertzAngular;
        if (n.has("max_rotation_step")) s.sequence_options.max_rotation_step = n.positive("max_rotation_step", 1.0);
    }
    if (root.has("ions")) {
        const Node n = root.at("ions");
        for (std::size_t i = 0; i < n.size(); ++i) {
            const Node ion = n.at(i);
            ion.allow_only({"name", "sequence"});
            IonSpec spec;
            spec.name = ion.string("name", "ion" + std::to_string(i + 1));
            const Node seq = ion.at("sequence");
            for (std::size_t k = 0; k < seq.size(); ++k) spec.sequence.push_back(parse_step(seq.at(k)));
            s.ions.push_back(std::move(spec));
        }
    }
    if (root.has("scans")) {
        const Node n = root.at("scans");
        for (std::size_t i = 0; i < n.size(); ++i) s.scans.push_back(parse_scan(n.at(i)));
    }

    // Cross references.
    std::set<std::string> well_names;
    for (const auto& w : s.wells) {
        if (!well_names.insert(w.name).second) throw ConfigError("wells: duplicate name '" + w.name + "'");
        if (w.calibration && !s.beams.count(w.calibration->beam)) {
            throw ConfigError("wells." + w.name + ".calibrate: unknown beam '" + w.calibration->beam + "'");
        }
    }
    for (const auto& [name, b] : s.beams) {
        if (b.retro_of && (!s.beams.count(*b.retro_of) || *b.retro_of == name)) {
            throw ConfigError("beams." + name + ".retro_of: unknown beam '" + *b.retro_of + "'");
        }
        if (b.retro_of && s.beams.at(*b.retro_of).retro_of) {
            throw ConfigError("beams." + name + ".retro_of: chained retro beams are not supported");
        }
    }
    for (const auto& ion : s.ions) {
        for (const auto& step : ion.sequence) {
            const auto* t = std::get_if<TransportSpec>(&step);
            if (!t) continue;
            for (const auto& b : t->beams) {
                if (!s.beams.count(b)) throw ConfigError("ions." + ion.name + ": unknown beam '" + b + "'");
            }
            if (const auto* w = std::get_if<std::string>(&t->path); w && !well_names.count(*w)) {
                throw ConfigError("ions." + ion.name + ": unknown well '" + *w + "'");
            }
            if (const auto* p = std::get_if<ConstantPathSpec>(&t->path); p && p->calibration &&
                                                                       !s.beams.count(p->calibration->beam)) {
                throw ConfigError("ions." + ion.name + ": unknown beam '" + p->calibration->beam + "'");
            }
        }
    }
    for (const auto& scan : s.scans) {
        if (!scan.fit.empty()) {
            try {
                find_model(scan.fit);
            } catch (const InvalidArgument& e) {
                throw ConfigError("scans." + scan.name + ".fit: " + e.what());
            }
        }
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_scenario(doc, path.parent_path());
}

}  // namespace tgates
