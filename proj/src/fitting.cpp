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

#include "tgates/fitting.hpp"

#include "tgates/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tgates {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kTwoOverSqrtPi = 1.1283791670955125739;

// y = c + a cos^2(zeta / 2), parameters (Omega0, chi, t0, a, c).
double transit_eval(std::span<const double> p, double t) {
    const double omega0 = p[0], chi = p[1], t0 = p[2], a = p[3], c = p[4];
    const double zeta = omega0 / chi * kSqrtPi * (std::erf(chi * t0) - std::erf(chi * (t0 - t)));
    const double h = std::cos(0.5 * zeta);
    return c + a * h * h;
}

void transit_grad(std::span<const double> p, double t, std::span<double> g) {
    const double omega0 = p[0], chi = p[1], t0 = p[2], a = p[3];
    const double u0 = chi * t0;
    const double u1 = chi * (t0 - t);
    const double f = std::erf(u0) - std::erf(u1);
    const double e0 = std::exp(-u0 * u0);
    const double e1 = std::exp(-u1 * u1);
    const double zeta = omega0 / chi * kSqrtPi * f;
    // d(a cos^2(z/2))/dz = -(a/2) sin z
    const double dz = -0.5 * a * std::sin(zeta);
    const double dzeta_domega = kSqrtPi * f / chi;
    const double df_dchi = kTwoOverSqrtPi * (t0 * e0 - (t0 - t) * e1);
    const double dzeta_dchi = omega0 * kSqrtPi * (df_dchi / chi - f / (chi * chi));
    const double dzeta_dt0 = omega0 / chi * kSqrtPi * kTwoOverSqrtPi * chi * (e0 - e1);
    const double h = std::cos(0.5 * zeta);
    g[0] = dz * dzeta_domega;
    g[1] = dz * dzeta_dchi;
    g[2] = dz * dzeta_dt0;
    g[3] = h * h;
    g[4] = 1.0;
}

// y = c + (A/2) cos(x - phi0), parameters (A, phi0, c).
double sinusoid_eval(std::span<const double> p, double x) { return p[2] + 0.5 * p[0] * std::cos(x - p[1]); }

void sinusoid_grad(std::span<const double> p, double x, std::span<double> g) {
    g[0] = 0.5 * std::cos(x - p[1]);
    g[1] = 0.5 * p[0] * std::sin(x - p[1]);
    g[2] = 1.0;
}

// y = (a + b erf(s (t - t_c))) / 2, parameters (a, b, s, t_c).
double erf_eval(std::span<const double> p, double t) { return 0.5 * (p[0] + p[1] * std::erf(p[2] * (t - p[3]))); }

void erf_grad(std::span<const double> p, double t, std::span<double> g) {
    const double u = p[2] * (t - p[3]);
    const double d = 0.5 * p[1] * kTwoOverSqrtPi * std::exp(-u * u);
    g[0] = 0.5;
    g[1] = 0.5 * std::erf(u);
    g[2] = d * (t - p[3]);
    g[3] = -d * p[2];
}

// y = c + A exp(-(x - x0)^2 / (2 sigma_g^2)), parameters (A, x0, sigma_g, c).
double gaussian_eval(std::span<const double> p, double x) {
    const double u = (x - p[1]) / p[2];
    return p[3] + p[0] * std::exp(-0.5 * u * u);
}

void gaussian_grad(std::span<const double> p, double x, std::span<double> g) {
    const double u = (x - p[1]) / p[2];
    const double e = std::exp(-0.5 * u * u);
    g[0] = e;
    g[1] = p[0] * e * u / p[2];
    g[2] = p[0] * e * u * u / p[2];
    g[3] = 1.0;
}

std::vector<FitModel> build_registry() {
    std::vector<FitModel> models;

    FitModel transit;
    transit.name = "transit_rabi";
    transit.parameters = {"Omega0", "chi", "t0", "a", "c"};
    transit.units = {"rad/s", "1/s", "s", "", ""};
    transit.positive = {false, true, false, false, false};
    transit.evaluate = transit_eval;
    transit.gradient = transit_grad;
    transit.degenerate = [](std::span<const double>, std::span<const double>) { return std::vector<std::string>{}; };
    models.push_back(std::move(transit));

    FitModel sinusoid;
    sinusoid.name = "sinusoid";
    sinusoid.parameters = {"A", "phi0", "c"};
    sinusoid.units = {"", "rad", ""};
    sinusoid.positive = {false, false, false};
    sinusoid.evaluate = sinusoid_eval;
    sinusoid.gradient = sinusoid_grad;
    sinusoid.degenerate = [](std::span<const double> v, std::span<const double> s) {
        std::vector<std::string> out;
        if (std::abs(v[0]) < 2.0 * s[0] || !(s[1] <= kPi)) out.push_back("phi0");
        return out;
    };
    models.push_back(std::move(sinusoid));

    FitModel step;
    step.name = "erf_step";
    step.parameters = {"a", "b", "s", "t_c"};
    step.units = {"", "", "1/s", "s"};
    step.positive = {false, false, false, false};
    step.evaluate = erf_eval;
    step.gradient = erf_grad;
    step.degenerate = [](std::span<const double> v, std::span<const double> s) {
        std::vector<std::string> out;
        if (std::abs(v[1]) < 2.0 * s[1]) out.insert(out.end(), {"s", "t_c"});
        return out;
    };
    models.push_back(std::move(step));

    FitModel gauss;
    gauss.name = "gaussian";
    gauss.parameters = {"A", "x0", "sigma_g", "c"};
    gauss.units = {"", "x", "x", ""};
    gauss.positive = {false, false, true, false};
    gauss.evaluate = gaussian_eval;
    gauss.gradient = gaussian_grad;
    gauss.degenerate = [](std::span<const double> v, std::span<const double> s) {
        std::vector<std::string> out;
        if (std::abs(v[0]) < 2.0 * s[0]) out.insert(out.end(), {"x0", "sigma_g"});
        return out;
    };
    models.push_back(std::move(gauss));

    return models;
}

}  // namespace

std::size_t FitModel::index_of(std::string_view parameter) const {
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        if (parameters[i] == parameter) return i;
    }
    throw InvalidArgument("model '" + name + "' has no parameter '" + std::string(parameter) + "'");
}

const std::vector<FitModel>& model_registry() {
    static const std::vector<FitModel> registry = build_registry();
    return registry;
}

const FitModel& find_model(std::string_view name) {
    for (const auto& m : model_registry()) {
        if (m.name == name) return m;
    }
    throw InvalidArgument("unknown fit model '" + std::string(name) + "'");
}

double FitResult::value(std::string_view parameter) const {
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        if (parameters[i] == parameter) return values[i];
    }
    throw InvalidArgument("fit result has no parameter '" + std::string(parameter) + "'");
}

double FitResult::sigma(std::string_view parameter) const {
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        if (parameters[i] == parameter) return sigmas[i];
    }
    throw InvalidArgument("fit result has no parameter '" + std::string(parameter) + "'");
}

namespace {

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
}

}  // namespace

RankDeficiencyError::RankDeficiencyError(FitResult partial, std::vector<std::string> parameters)
    : Error("normal matrix is singular; unidentifiable parameters: " + join(parameters)),
      partial_(std::move(partial)),
      parameters_(std::move(parameters)) {}

namespace {

class Problem {
  public:
    Problem(const FitModel& model, std::span<const double> x, std::span<const double> y,
            std::span<const double> sigma, const FitOptions& options)
        : model_(model), x_(x), y_(y), w_(sigma.size()), options_(options) {
        for (std::size_t i = 0; i < sigma.size(); ++i) w_[i] = 1.0 / sigma[i];
    }

    std::size_t points() const { return x_.size(); }
    std::size_t size() const { return model_.size(); }

    // Internal coordinates: log(p) for positive parameters.
    Eigen::VectorXd to_internal(std::span<const double> p) const {
        Eigen::VectorXd q(size());
        for (std::size_t j = 0; j < size(); ++j) q[j] = model_.positive[j] ? std::log(p[j]) : p[j];
        return q;
    }

    std::vector<double> to_external(const Eigen::VectorXd& q) const {
        std::vector<double> p(size());
        for (std::size_t j = 0; j < size(); ++j) p[j] = model_.positive[j] ? std::exp(q[j]) : q[j];
        return p;
    }

    // Weighted residuals (y - f) / sigma.
    Eigen::VectorXd residuals(std::span<const double> p) const {
        Eigen::VectorXd r(points());
        for (std::size_t i = 0; i < points(); ++i) r[i] = (y_[i] - model_.evaluate(p, x_[i])) * w_[i];
        return r;
    }

    // d f / d p weighted by 1/sigma, in external coordinates.
    Eigen::MatrixXd jacobian(std::span<const double> p) const {
        Eigen::MatrixXd jac(points(), size());
        std::vector<double> g(size());
        if (options_.analytic_jacobian && model_.gradient) {
            for (std::size_t i = 0; i < points(); ++i) {
                model_.gradient(p, x_[i], g);
                for (std::size_t j = 0; j < size(); ++j) jac(i, j) = g[j] * w_[i];
            }
            return jac;
        }
        std::vector<double> shifted(p.begin(), p.end());
        for (std::size_t j = 0; j < size(); ++j) {
            const double h = options_.finite_difference_step * std::max(std::abs(p[j]), 1e-12);
            shifted[j] = p[j] + h;
            const double step = shifted[j] - p[j];
            for (std::size_t i = 0; i < points(); ++i) {
                jac(i, j) = (model_.evaluate(shifted, x_[i]) - model_.evaluate(p, x_[i])) / step * w_[i];
            }
            shifted[j] = p[j];
        }
        return jac;
    }

    Eigen::MatrixXd internal_jacobian(std::span<const double> p) const {
        Eigen::MatrixXd jac = jacobian(p);
        for (std::size_t j = 0; j < size(); ++j) {
            if (model_.positive[j]) jac.col(j) *= p[j];
        }
        return jac;
    }

  private:
    const FitModel& model_;
    std::span<const double> x_;
    std::span<const double> y_;
    std::vector<double> w_;
    const FitOptions& options_;
};

bool all_finite(std::span<const double> p) {
    return std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); });
}

// Columns of the unit-diagonal scaled Jacobian that a rank-revealing QR leaves
// outside the numerical range.
std::vector<std::size_t> deficient_columns(const Eigen::MatrixXd& jac) {
    const auto n = jac.cols();
    Eigen::MatrixXd scaled = jac;
    std::vector<std::size_t> out;
    std::vector<bool> zero(n, false);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double norm = scaled.col(j).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            zero[j] = true;
            scaled.col(j).setZero();
        } else {
            scaled.col(j) /= norm;
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = rank; k < n; ++k) out.push_back(static_cast<std::size_t>(perm[k]));
    for (Eigen::Index j = 0; j < n; ++j) {
        if (zero[j] && std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// erf_step is symmetric under (b, s) -> (-b, -s); report b > 0.
void canonicalize(const FitModel& model, std::vector<double>& values) {
    if (model.name == "erf_step" && values[1] < 0.0) {
        values[1] = -values[1];
        values[2] = -values[2];
    }
    if (model.name == "sinusoid") {
        if (values[0] < 0.0) {
            values[0] = -values[0];
            values[1] += kPi;
        }
        values[1] = std::remainder(values[1], kTwoPi);
    }
}

}  // namespace

FitResult fit_curve(const FitModel& model, std::span<const double> x, std::span<const double> y,
                    std::span<const double> sigma, std::span<const double> guess, const FitOptions& options) {
    const std::size_t n = model.size();
    if (x.size() != y.size() || x.size() != sigma.size()) throw InvalidArgument("x, y and sigma differ in length");
    if (guess.size() != n) throw InvalidArgument("guess has the wrong number of parameters for " + model.name);
    if (x.size() < n) throw InvalidArgument("fit needs at least as many points as parameters");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidArgument("data must be finite");
        if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i])) throw InvalidArgument("sigma must be finite and positive");
    }
    if (!all_finite(guess)) throw InvalidArgument("guess must be finite");
    for (std::size_t j = 0; j < n; ++j) {
        if (model.positive[j] && !(guess[j] > 0.0)) {
            throw InvalidArgument("guess for " + model.parameters[j] + " must be positive");
        }
    }

    const Problem problem(model, x, y, sigma, options);
    Eigen::VectorXd q = problem.to_internal(guess);
    std::vector<double> p = problem.to_external(q);
    Eigen::VectorXd r = problem.residuals(p);
    double chi2 = r.squaredNorm();
    if (!std::isfinite(chi2)) throw InvalidArgument("model is not finite at the initial guess");

    double lambda = options.initial_damping;
    bool converged = false;
    int iteration = 0;
    for (; iteration < options.max_iterations && !converged; ++iteration) {
        const Eigen::MatrixXd jac = problem.internal_jacobian(p);
        const Eigen::VectorXd g = jac.transpose() * r;
        if (g.cwiseAbs().maxCoeff() < options.gradient_tolerance || chi2 == 0.0) {
            converged = true;
            break;
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::VectorXd diag = jtj.diagonal();
        for (Eigen::Index j = 0; j < diag.size(); ++j) {
            if (!(diag[j] > 0.0)) diag[j] = 1e-30;
        }
        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            const Eigen::VectorXd step = a.ldlt().solve(g);
            const Eigen::VectorXd q_new = q + step;
            const std::vector<double> p_new = problem.to_external(q_new);
            double chi2_new = std::numeric_limits<double>::infinity();
            Eigen::VectorXd r_new;
            if (step.allFinite() && all_finite(p_new)) {
                r_new = problem.residuals(p_new);
                chi2_new = r_new.squaredNorm();
            }
            if (std::isfinite(chi2_new) && chi2_new <= chi2) {
                const double change = (chi2 - chi2_new) / std::max(chi2_new, std::numeric_limits<double>::min());
                q = q_new;
                p = p_new;
                r = r_new;
                chi2 = chi2_new;
                lambda /= 3.0;
                accepted = true;
                if (change < options.chi2_tolerance) converged = true;
            } else {
                lambda *= 2.0;
                // No step lowers chi-square: a minimum to working precision.
                if (lambda > 1e20) {
                    converged = true;
                    break;
                }
            }
        }
    }

    FitResult result;
    result.model = model.name;
    result.parameters = model.parameters;
    result.units = model.units;
    canonicalize(model, p);
    result.values = p;
    result.chi2 = chi2;
    const std::size_t dof = x.size() > n ? x.size() - n : 0;
    result.chi2_reduced = dof > 0 ? chi2 / static_cast<double>(dof) : std::numeric_limits<double>::quiet_NaN();
    result.converged = converged;
    result.iterations = iteration;
    result.sigmas.assign(n, std::numeric_limits<double>::infinity());
    result.covariance = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());

    const Eigen::MatrixXd jac = problem.jacobian(p);
    const auto deficient = deficient_columns(jac);
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::find(deficient.begin(), deficient.end(), j) == deficient.end()) kept.push_back(j);
    }
    if (!kept.empty()) {
        Eigen::MatrixXd sub(jac.rows(), static_cast<Eigen::Index>(kept.size()));
        for (std::size_t k = 0; k < kept.size(); ++k) sub.col(k) = jac.col(kept[k]);
        // Invert in unit-diagonal scaling for conditioning.
        Eigen::MatrixXd normal = sub.transpose() * sub;
        const Eigen::VectorXd scale = normal.diagonal().cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd scaled = scale.asDiagonal() * normal * scale.asDiagonal();
        const Eigen::MatrixXd inv = scale.asDiagonal() * scaled.inverse() * scale.asDiagonal();
        for (std::size_t a = 0; a < kept.size(); ++a) {
            for (std::size_t b = 0; b < kept.size(); ++b) {
                result.covariance(kept[a], kept[b]) = 0.5 * (inv(a, b) + inv(b, a));
            }
            result.sigmas[kept[a]] = std::sqrt(std::max(inv(a, a), 0.0));
        }
    }

    if (model.degenerate) result.degenerate = model.degenerate(result.values, result.sigmas);
    if (!deficient.empty()) {
        std::vector<std::string> names;
        bool explained = true;
        for (auto j : deficient) {
            names.push_back(model.parameters[j]);
            if (std::find(result.degenerate.begin(), result.degenerate.end(), model.parameters[j]) ==
                result.degenerate.end()) {
                explained = false;
            }
        }
        if (!explained) throw RankDeficiencyError(result, names);
    }
    return result;
}

namespace {

struct Stats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

Stats stats(std::span<const double> y) {
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    return {*lo, *hi, std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size())};
}

std::vector<std::size_t> order_by_x(std::span<const double> x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    return idx;
}

double mean_of(std::span<const double> y, const std::vector<std::size_t>& idx, std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t k = from; k < to; ++k) s += y[idx[k]];
    return s / static_cast<double>(to - from);
}

// Least-squares a, c for y = c + a g with fixed shape g; returns the residual sum of squares.
double linear_amplitude(std::span<const double> y, const std::vector<double>& g, double& a, double& c) {
    const double n = static_cast<double>(y.size());
    double sg = 0.0, sy = 0.0, sgg = 0.0, sgy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sg += g[i];
        sy += y[i];
        sgg += g[i] * g[i];
        sgy += g[i] * y[i];
    }
    const double det = n * sgg - sg * sg;
    if (std::abs(det) < 1e-300) {
        a = 0.0;
        c = sy / n;
    } else {
        a = (n * sgy - sg * sy) / det;
        c = (sy - a * sg) / n;
    }
    double rss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - c - a * g[i];
        rss += d * d;
    }
    return rss;
}

// Phase zeta(t) from y = c + a cos^2(zeta/2), unwrapped assuming zeta grows
// from zero. Values within `band` of a turning point do not switch branch.
std::vector<double> unwrap_transit_phase(std::span<const double> y, const std::vector<std::size_t>& idx, double lo,
                                         double hi) {
    std::vector<double> zeta(idx.size());
    const double band = 0.15;
    int branch = 0;  // zeta in [branch pi, (branch + 1) pi]
    bool armed = false;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const double u = std::clamp((y[idx[k]] - lo) / (hi - lo), 0.0, 1.0);
        // Even branch: u falls from 1 to 0; odd branch: u rises.
        const bool even = branch % 2 == 0;
        const double progress = even ? 1.0 - u : u;
        if (progress > 1.0 - band) armed = true;
        if (armed && progress < 1.0 - 2.0 * band) {
            ++branch;
            armed = false;
        }
        const double base = 2.0 * std::acos(std::sqrt(u));  // in [0, pi]
        zeta[k] = branch * kPi + (branch % 2 == 0 ? base : kPi - base);
    }
    return zeta;
}

InitialGuess guess_transit(std::span<const double> x, std::span<const double> y) {
    const auto idx = order_by_x(x);
    const auto st = stats(y);
    const double span = x[idx.back()] - x[idx.front()];
    InitialGuess out;
    if (st.max - st.min <= 0.0 || span <= 0.0) {
        out.flat = true;
        const double chi = 8.0 / std::max(span, 1e-300);
        out.values = {chi, chi, x[idx.front()] + 0.5 * span, 0.0, st.mean};
        return out;
    }
    const auto zeta = unwrap_transit_phase(y, idx, st.min, st.max);
    const std::size_t n = idx.size();
    const std::size_t tail = std::max<std::size_t>(1, n / 5);
    double zeta_inf = 0.0;
    for (std::size_t k = n - tail; k < n; ++k) zeta_inf += zeta[k];
    zeta_inf = std::max(zeta_inf / static_cast<double>(tail), 0.5);

    // Centre where zeta crosses half its final value.
    std::size_t kc = 0;
    while (kc + 1 < n && zeta[kc] < 0.5 * zeta_inf) ++kc;
    const double t0 = x[idx[kc]];
    // Slope over a window around the centre.
    const std::size_t w = std::max<std::size_t>(1, n / 20);
    const std::size_t k0 = kc > w ? kc - w : 0;
    const std::size_t k1 = std::min(n - 1, kc + w);
    double slope = 0.0;
    if (x[idx[k1]] > x[idx[k0]]) slope = (zeta[k1] - zeta[k0]) / (x[idx[k1]] - x[idx[k0]]);
    double omega0 = slope > 0.0 ? 0.5 * slope : zeta_inf / span;
    double chi = 2.0 * omega0 * kSqrtPi / zeta_inf;

    // Refine (Omega0, chi, t0) on a coarse grid with a and c solved linearly.
    std::vector<double> ys(n), g(n);
    for (std::size_t k = 0; k < n; ++k) ys[k] = y[idx[k]];
    double best_rss = std::numeric_limits<double>::infinity();
    std::vector<double> best{omega0, chi, t0, st.max - st.min, st.min};
    const double dt = span / 40.0;
    for (int pass = 0; pass < 2; ++pass) {
        const double range = pass == 0 ? 0.5 : 0.1;
        const double center_o = best[0], center_c = best[1], center_t = best[2];
        const double t_range = pass == 0 ? 6.0 * dt : 1.0 * dt;
        for (int io = -8; io <= 8; ++io) {
            const double om = center_o * std::exp(range * io / 8.0);
            for (int ic = -8; ic <= 8; ++ic) {
                const double ch = center_c * std::exp(range * ic / 8.0);
                for (int it = -6; it <= 6; ++it) {
                    const double tt = center_t + t_range * it / 6.0;
                    const double p[5] = {om, ch, tt, 1.0, 0.0};
                    for (std::size_t k = 0; k < n; ++k) g[k] = transit_eval(p, x[idx[k]]);
                    double a = 0.0, c = 0.0;
                    const double rss = linear_amplitude(ys, g, a, c);
                    if (rss < best_rss) {
                        best_rss = rss;
                        best = {om, ch, tt, a, c};
                    }
                }
            }
        }
    }
    out.values = best;
    return out;
}

InitialGuess guess_sinusoid(std::span<const double> x, std::span<const double> y) {
    const auto st = stats(y);
    InitialGuess out;
    if (st.max - st.min <= 0.0) {
        out.flat = true;
        out.values = {0.0, 0.0, st.mean};
        return out;
    }
    // Linear least squares for c + alpha cos x + beta sin x.
    Eigen::MatrixXd design(x.size(), 3);
    Eigen::VectorXd rhs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(x[i]);
        design(i, 2) = std::sin(x[i]);
        rhs[i] = y[i];
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
    double amp = 2.0 * std::hypot(coef[1], coef[2]);
    if (!std::isfinite(amp) || amp == 0.0) amp = st.max - st.min;
    out.values = {amp, std::atan2(coef[2], coef[1]), coef.allFinite() ? coef[0] : st.mean};
    return out;
}

InitialGuess guess_erf(std::span<const double> x, std::span<const double> y) {
    const auto idx = order_by_x(x);
    const std::size_t n = idx.size();
    const std::size_t q = std::max<std::size_t>(1, n / 4);
    const double low = mean_of(y, idx, 0, q);
    const double high = mean_of(y, idx, n - q, n);
    InitialGuess out;
    const double b = high - low;
    std::size_t kmax = 0;
    double grad_max = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double dx = x[idx[k + 1]] - x[idx[k]];
        if (dx <= 0.0) continue;
        const double grad = (y[idx[k + 1]] - y[idx[k]]) / dx;
        if (std::abs(grad) > std::abs(grad_max)) {
            grad_max = grad;
            kmax = k;
        }
    }
    const double span = x[idx.back()] - x[idx.front()];
    if (b == 0.0 || grad_max == 0.0) {
        out.flat = stats(y).max == stats(y).min;
        out.values = {low + high, 0.0, span > 0.0 ? 4.0 / span : 1.0, x[idx[n / 2]]};
        return out;
    }
    double tc = 0.5 * (x[idx[kmax]] + x[idx[kmax + 1]]);
    // Slope at the centre is b s / sqrt(pi); keep b > 0 and put the sign in s.
    double s = std::abs(kSqrtPi * grad_max / b);
    const double sign = (b > 0.0) == (grad_max > 0.0) ? 1.0 : -1.0;

    // A noisy gradient overestimates s; refine s and t_c with a and b solved linearly.
    std::vector<double> ys(n), g(n);
    for (std::size_t k = 0; k < n; ++k) ys[k] = y[idx[k]];
    double best_rss = std::numeric_limits<double>::infinity();
    double best_a = low + high, best_b = std::abs(b);
    const double s_lo = std::min(s, 1.0 / span) / 4.0;
    const double s_hi = std::max(s, 1.0 / span) * 4.0;
    const int s_steps = 48;
    double s_best = s, tc_best = tc;
    for (int is = 0; is <= s_steps; ++is) {
        const double ss = s_lo * std::pow(s_hi / s_lo, static_cast<double>(is) / s_steps);
        for (std::size_t kc = 0; kc < n; ++kc) {
            const double tt = x[idx[kc]];
            for (std::size_t k = 0; k < n; ++k) g[k] = std::erf(sign * ss * (x[idx[k]] - tt));
            double amp = 0.0, off = 0.0;
            const double rss = linear_amplitude(ys, g, amp, off);
            if (rss < best_rss && amp > 0.0) {
                best_rss = rss;
                best_a = 2.0 * off;
                best_b = 2.0 * amp;
                s_best = ss;
                tc_best = tt;
            }
        }
    }
    s = s_best;
    tc = tc_best;
    out.values = {best_a, best_b, sign * s, tc};
    return out;
}

InitialGuess guess_gaussian(std::span<const double> x, std::span<const double> y) {
    const auto idx = order_by_x(x);
    const std::size_t n = idx.size();
    const std::size_t edge = std::max<std::size_t>(1, n / 10);
    std::vector<double> edges;
    for (std::size_t k = 0; k < edge; ++k) {
        edges.push_back(y[idx[k]]);
        edges.push_back(y[idx[n - 1 - k]]);
    }
    std::nth_element(edges.begin(), edges.begin() + edges.size() / 2, edges.end());
    const double c = edges[edges.size() / 2];
    const auto st = stats(y);
    InitialGuess out;
    const double span = x[idx.back()] - x[idx.front()];
    if (st.max - st.min <= 0.0) {
        out.flat = true;
        out.values = {0.0, x[idx[n / 2]], span > 0.0 ? span / 4.0 : 1.0, st.mean};
        return out;
    }
    const double sign = (st.max - c) >= (c - st.min) ? 1.0 : -1.0;
    std::size_t kpk = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (sign * (y[idx[k]] - c) > sign * (y[idx[kpk]] - c)) kpk = k;
    }
    const double amp = y[idx[kpk]] - c;
    // Moments over the contiguous region around the peak above a tenth of its height.
    std::size_t lo = kpk, hi = kpk;
    while (lo > 0 && sign * (y[idx[lo - 1]] - c) > 0.1 * std::abs(amp)) --lo;
    while (hi + 1 < n && sign * (y[idx[hi + 1]] - c) > 0.1 * std::abs(amp)) ++hi;
    double w_sum = 0.0, m1 = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
        const double w = std::max(0.0, sign * (y[idx[k]] - c));
        w_sum += w;
        m1 += w * x[idx[k]];
    }
    const double x0 = w_sum > 0.0 ? m1 / w_sum : x[idx[kpk]];
    // Width from the points above half height.
    double sigma_g = 0.0;
    std::size_t above = 0;
    for (std::size_t k = lo; k <= hi; ++k) {
        if (sign * (y[idx[k]] - c) > 0.5 * std::abs(amp)) ++above;
    }
    const double step = span / static_cast<double>(std::max<std::size_t>(n - 1, 1));
    sigma_g = std::max(static_cast<double>(above), 1.0) * step / 2.3548;
    out.values = {amp, x0, sigma_g > 0.0 ? sigma_g : 1.0, c};
    return out;
}

}  // namespace

InitialGuess initial_guess(const FitModel& model, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidArgument("x and y differ in length");
    if (x.size() < 4) throw InvalidArgument("initial guess needs at least 4 points");
    if (model.name == "transit_rabi") return guess_transit(x, y);
    if (model.name == "sinusoid") return guess_sinusoid(x, y);
    if (model.name == "erf_step") return guess_erf(x, y);
    if (model.name == "gaussian") return guess_gaussian(x, y);
    throw InvalidArgument("no initial guess heuristic for model '" + model.name + "'");
}

nlohmann::json fit_result_json(const FitResult& result) {
    nlohmann::json j;
    j["model"] = result.model;
    nlohmann::json params = nlohmann::json::object();
    for (std::size_t i = 0; i < result.parameters.size(); ++i) {
        nlohmann::json p;
        p["value"] = result.values[i];
        p["sigma"] = std::isfinite(result.sigmas[i]) ? nlohmann::json(result.sigmas[i]) : nlohmann::json(nullptr);
        p["unit"] = result.units[i];
        params[result.parameters[i]] = p;
    }
    j["parameters"] = params;
    j["order"] = result.parameters;
    nlohmann::json cov = nlohmann::json::array();
    for (Eigen::Index r = 0; r < result.covariance.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < result.covariance.cols(); ++c) {
            const double v = result.covariance(r, c);
            row.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
        }
        cov.push_back(row);
    }
    j["covariance"] = cov;
    j["chi2"] = result.chi2;
    j["chi2_reduced"] = std::isfinite(result.chi2_reduced) ? nlohmann::json(result.chi2_reduced) : nlohmann::json(nullptr);
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["degenerate"] = result.degenerate;
    return j;
}

}  // namespace tgates
