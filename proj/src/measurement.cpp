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

#include "tgates/measurement.hpp"

#include "tgates/errors.hpp"
#include "tgates/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace tgates {

void SpamModel::validate() const {
    for (double e : {prep, transfer, dark, bright}) {
        if (!(e >= 0.0 && e < 0.5)) throw InvalidArgument("SPAM error rates must lie in [0, 0.5)");
    }
    if (transfer_pulses < 0) throw InvalidArgument("transfer pulse count must be non-negative");
}

double SpamModel::amplitude(int n_transfers) const {
    const double survival = (1.0 - prep) * std::pow(1.0 - transfer, n_transfers);
    return (1.0 - bright - dark) * survival;
}

double apply_spam(double p_ideal, const SpamModel& spam, int n_transfers) {
    if (!(p_ideal >= 0.0 && p_ideal <= 1.0)) throw InvalidArgument("probability must lie in [0, 1]");
    spam.validate();
    return spam.offset() + spam.amplitude(n_transfers) * p_ideal;
}

double apply_spam(double p_ideal, const SpamModel& spam) { return apply_spam(p_ideal, spam, spam.transfer_pulses); }

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 point_stream(std::uint64_t seed, std::uint64_t scan, std::uint64_t ion, std::uint64_t point) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ scan);
    h = splitmix64(h ^ ion);
    h = splitmix64(h ^ point);
    return std::mt19937_64(h);
}

double projection_sigma(double p_hat, int shots) {
    if (shots < 1) throw InvalidArgument("shot count must be at least 1");
    const double n = static_cast<double>(shots);
    const double p = std::clamp(p_hat, 0.5 / n, 1.0 - 0.5 / n);
    return std::sqrt(p * (1.0 - p) / n);
}

CountSample sample_counts(double p_obs, int shots, std::mt19937_64& stream) {
    if (shots < 1) throw InvalidArgument("shot count must be at least 1");
    if (!(p_obs >= 0.0 && p_obs <= 1.0)) throw InvalidArgument("probability must lie in [0, 1]");
    std::binomial_distribution<int> dist(shots, p_obs);
    const int k = dist(stream);
    CountSample s;
    s.p_hat = static_cast<double>(k) / shots;
    s.sigma = projection_sigma(s.p_hat, shots);
    return s;
}

std::vector<double> ScanResult::x() const {
    std::vector<double> out(points.size());
    std::transform(points.begin(), points.end(), out.begin(), [](const ScanPoint& p) { return p.x; });
    return out;
}

std::vector<double> ScanResult::y() const {
    std::vector<double> out(points.size());
    std::transform(points.begin(), points.end(), out.begin(), [](const ScanPoint& p) { return p.p_hat; });
    return out;
}

std::vector<double> ScanResult::sigma() const {
    std::vector<double> out(points.size());
    std::transform(points.begin(), points.end(), out.begin(), [](const ScanPoint& p) { return p.sigma; });
    return out;
}

void write_scan_csv(const ScanResult& scan, const std::filesystem::path& path,
                    const std::vector<std::string>& extra_comments) {
    std::vector<std::string> comments;
    std::string meta = "scan variable=" + scan.variable + " unit=" + scan.unit + " seed=" + std::to_string(scan.seed);
    if (!scan.label.empty()) meta += " label=" + scan.label;
    comments.push_back(meta);
    comments.insert(comments.end(), extra_comments.begin(), extra_comments.end());
    std::vector<std::vector<double>> rows;
    rows.reserve(scan.points.size());
    for (const auto& p : scan.points) rows.push_back({p.x, p.p_hat, p.sigma, static_cast<double>(p.n)});
    io::write_csv(path, comments, {"x", "p_hat", "sigma", "n"}, rows);
}

ScanResult read_scan_csv(const std::filesystem::path& path) {
    const auto table = io::read_csv(path);
    const std::vector<std::string> expected{"x", "p_hat", "sigma", "n"};
    if (table.header != expected) throw ParseError("scan header must be x,p_hat,sigma,n", 1, 1);
    ScanResult scan;
    for (const auto& c : table.comments) {
        std::istringstream in(c);
        std::string word;
        in >> word;
        if (word != "scan") continue;
        while (in >> word) {
            const auto eq = word.find('=');
            if (eq == std::string::npos) continue;
            const auto key = word.substr(0, eq);
            const auto value = word.substr(eq + 1);
            if (key == "variable") scan.variable = value;
            else if (key == "unit") scan.unit = value;
            else if (key == "label") scan.label = value;
            else if (key == "seed") scan.seed = std::stoull(value);
        }
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        ScanPoint p{row[0], row[1], row[2], static_cast<int>(row[3]), row[1]};
        if (!(p.sigma > 0.0)) throw ParseError("sigma must be positive", table.first_data_line + r, 3);
        scan.points.push_back(p);
    }
    return scan;
}

std::string_view scan_variable_name(ScanVariable v) noexcept {
    switch (v) {
        case ScanVariable::BeamOffTime: return "t_off";
        case ScanVariable::Phase: return "phase";
        case ScanVariable::Frequency: return "frequency";
    }
    return "";
}

std::string_view scan_variable_unit(ScanVariable v) noexcept {
    switch (v) {
        case ScanVariable::BeamOffTime: return "s";
        case ScanVariable::Phase: return "rad";
        case ScanVariable::Frequency: return "Hz";
    }
    return "";
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

std::size_t find_element(const IonProgram& ion, std::optional<std::size_t> explicit_index, auto predicate,
                         const char* what) {
    if (explicit_index) {
        if (*explicit_index >= ion.sequence.size() || !predicate(ion.sequence[*explicit_index])) {
            throw InvalidArgument("ion '" + ion.name + "': scanned element is not a " + what);
        }
        return *explicit_index;
    }
    for (std::size_t i = 0; i < ion.sequence.size(); ++i) {
        if (predicate(ion.sequence[i])) return i;
    }
    throw InvalidArgument("ion '" + ion.name + "' has no " + what + " to scan");
}

}  // namespace

std::vector<ScanResult> run_scan(std::span<const IonProgram> ions, const ScanSpec& spec,
                                 const MeasurementSetup& setup) {
    if (spec.grid.empty()) throw InvalidArgument("scan grid is empty");
    if (spec.shots < 1) throw InvalidArgument("shot count must be at least 1");
    setup.spam.validate();
    for (double x : spec.grid) {
        if (!std::isfinite(x)) throw InvalidArgument("scan grid values must be finite");
    }

    std::vector<std::size_t> targets(ions.size(), 0);
    for (std::size_t i = 0; i < ions.size(); ++i) {
        if (spec.variable == ScanVariable::BeamOffTime) {
            targets[i] = find_element(ions[i], ions[i].scanned_segment,
                                      [](const PulseElement& e) { return std::holds_alternative<TransportSegment>(e); },
                                      "transport segment");
        } else if (spec.variable == ScanVariable::Phase) {
            targets[i] = find_element(ions[i], ions[i].scanned_phase,
                                      [](const PulseElement& e) { return std::holds_alternative<PhaseShift>(e); },
                                      "phase shift");
        }
    }

    std::vector<ScanResult> results(ions.size());
    for (std::size_t i = 0; i < ions.size(); ++i) {
        results[i].variable = std::string(scan_variable_name(spec.variable));
        results[i].unit = std::string(scan_variable_unit(spec.variable));
        results[i].label = ions[i].name;
        results[i].seed = setup.seed;
        results[i].points.resize(spec.grid.size());
    }

    const std::size_t n_points = spec.grid.size();
    parallel_for(ions.size() * n_points, setup.threads, [&](std::size_t job) {
        const std::size_t ion = job / n_points;
        const std::size_t k = job % n_points;
        const double x = spec.grid[k];
        std::vector<PulseElement> seq = ions[ion].sequence;
        SequenceOptions opts = setup.sequence;
        switch (spec.variable) {
            case ScanVariable::BeamOffTime:
                std::get<TransportSegment>(seq[targets[ion]]).beam_off_time = x;
                break;
            case ScanVariable::Phase:
                std::get<PhaseShift>(seq[targets[ion]]).phi = x;
                break;
            case ScanVariable::Frequency:
                opts.base_detuning += kTwoPi * x;
                break;
        }
        SequenceResult r;
        try {
            r = run_sequence(QubitState::spin_up(), seq, opts);
        } catch (const SequenceError& e) {
            std::ostringstream msg;
            msg << "ion '" << ions[ion].name << "' at " << results[ion].variable << " = " << x << ": " << e.what();
            throw SequenceError(msg.str(), e.element());
        }
        const int n_transfers = r.transfer_pulses > 0 ? r.transfer_pulses : setup.spam.transfer_pulses;
        const double p_obs = apply_spam(std::clamp(r.p_up(), 0.0, 1.0), setup.spam, n_transfers);
        ScanPoint& pt = results[ion].points[k];
        pt.x = x;
        pt.n = spec.shots;
        pt.p_obs = p_obs;
        if (spec.noiseless) {
            pt.p_hat = p_obs;
            pt.sigma = projection_sigma(p_obs, spec.shots);
        } else {
            auto stream = point_stream(setup.seed, spec.scan_index, ion, k);
            const auto s = sample_counts(p_obs, spec.shots, stream);
            pt.p_hat = s.p_hat;
            pt.sigma = s.sigma;
        }
    });
    return results;
}

}  // namespace tgates
