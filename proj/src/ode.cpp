#include "eisenhart/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eisenhart/errors.hpp"

namespace eisenhart {

std::string_view to_string(Method m) {
    return m == Method::RK4Fixed ? "rk4" : "dp45";
}

Method method_from_string(std::string_view name) {
    if (name == "rk4" || name == "RK4Fixed") return Method::RK4Fixed;
    if (name == "dp45" || name == "DP45Adaptive") return Method::DP45Adaptive;
    throw ArgumentError("unknown integrator method '" + std::string(name) + "'");
}

void IntegratorConfig::validate() const {
    if (method == Method::RK4Fixed && !(step > 0.0 && std::isfinite(step))) {
        throw ArgumentError("RK4 step must be positive");
    }
    if (method == Method::DP45Adaptive && !(abs_tol > 0.0 && rel_tol > 0.0)) {
        throw ArgumentError("tolerances must be positive");
    }
    if (!(output_step >= 0.0)) throw ArgumentError("output_step must be non-negative");
    if (max_steps == 0) throw ArgumentError("max_steps must be positive");
}

namespace {

using Vec = std::vector<double>;

// Evaluates the rhs if y is admissible; false when the state left the domain.
bool try_eval(const OdeRhs& rhs, const OdeGuard& guard, double t, const Vec& y, Vec& out) {
    if (guard && !guard(y)) return false;
    for (double v : y) {
        if (!std::isfinite(v)) return false;
    }
    try {
        rhs(t, y, out);
    } catch (const DomainError&) {
        return false;
    }
    return true;
}

void axpy_into(Vec& out, const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        double s = 0.0;
        for (const auto& [c, k] : terms) s += c * (*k)[i];
        out[i] = y[i] + h * s;
    }
}

void record(OdeSolution& sol, double t, const Vec& y, const Vec& f) {
    sol.t.push_back(t);
    sol.y.push_back(y);
    sol.dydt.push_back(f);
}

OdeSolution rk4(const OdeRhs& rhs, Vec y, double t0, double t1, const IntegratorConfig& cfg,
                const OdeGuard& guard) {
    OdeSolution sol;
    const std::size_t n = y.size();
    Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
    if (!try_eval(rhs, guard, t0, y, k1)) throw DomainError("initial state outside the domain");
    record(sol, t0, y, k1);
    if (t1 == t0) return sol;

    const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / cfg.step - 1e-9));
    if (steps > cfg.max_steps) throw IntegrationError("RK4 step count exceeds max_steps");
    const double h = (t1 - t0) / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = t0 + h * static_cast<double>(s);
        axpy_into(tmp, y, 0.5 * h, {{1.0, &k1}});
        bool ok = try_eval(rhs, guard, t + 0.5 * h, tmp, k2);
        if (ok) {
            axpy_into(tmp, y, 0.5 * h, {{1.0, &k2}});
            ok = try_eval(rhs, guard, t + 0.5 * h, tmp, k3);
        }
        if (ok) {
            axpy_into(tmp, y, h, {{1.0, &k3}});
            ok = try_eval(rhs, guard, t + h, tmp, k4);
        }
        if (ok) {
            axpy_into(tmp, y, h / 6.0, {{1.0, &k1}, {2.0, &k2}, {2.0, &k3}, {1.0, &k4}});
            ok = try_eval(rhs, guard, t + h, tmp, k1);
        }
        if (!ok) {
            sol.exited_domain = true;
            return sol;
        }
        y = tmp;
        ++sol.steps;
        record(sol, s + 1 == steps ? t1 : t0 + h * static_cast<double>(s + 1), y, k1);
    }
    return sol;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Norm {
    double atol, rtol;
    const std::vector<bool>& mask;

    bool on(std::size_t i) const { return mask.empty() || mask[i]; }

    // RMS of v_i / (atol + rtol max(|a_i|, |b_i|)) over controlled components.
    double operator()(const Vec& v, const Vec& a, const Vec& b) const {
        double s = 0.0;
        std::size_t m = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!on(i)) continue;
            const double sc = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
            s += (v[i] / sc) * (v[i] / sc);
            ++m;
        }
        return m == 0 ? 0.0 : std::sqrt(s / static_cast<double>(m));
    }
};

double initial_step(const OdeRhs& rhs, const OdeGuard& guard, double t0, const Vec& y0, const Vec& f0,
                    const Norm& norm, double span) {
    const Vec zero(y0.size(), 0.0);
    const double d0 = norm(y0, y0, zero);
    const double d1 = norm(f0, y0, zero);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    Vec y1(y0.size()), f1(y0.size());
    axpy_into(y1, y0, h0, {{1.0, &f0}});
    if (!try_eval(rhs, guard, t0 + h0, y1, f1)) return h0;
    Vec df(y0.size());
    for (std::size_t i = 0; i < df.size(); ++i) df[i] = f1[i] - f0[i];
    const double d2 = norm(df, y0, zero) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, span});
}

OdeSolution dp45(const OdeRhs& rhs, Vec y, double t0, double t1, const IntegratorConfig& cfg,
                 const OdeGuard& guard, const std::vector<bool>& mask) {
    OdeSolution sol;
    const std::size_t n = y.size();
    if (!mask.empty() && mask.size() != n) throw ArgumentError("error mask size does not match the state");
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n), err(n);
    if (!try_eval(rhs, guard, t0, y, k1)) throw DomainError("initial state outside the domain");
    record(sol, t0, y, k1);
    if (t1 == t0) return sol;

    const Norm norm{cfg.abs_tol, cfg.rel_tol, mask};
    const double span = t1 - t0;
    double h = initial_step(rhs, guard, t0, y, k1, norm, span);
    double t = t0;
    std::size_t next_out = 1;
    const auto out_time = [&](std::size_t k) {
        return cfg.output_step > 0.0 ? std::min(t1, t0 + cfg.output_step * static_cast<double>(k)) : t1;
    };
    int domain_failures = 0;

    while (t < t1) {
        if (sol.steps + sol.rejected >= cfg.max_steps) throw IntegrationError("DP45 exhausted max_steps");
        const double target = out_time(next_out);
        bool lands = false;
        double hs = h;
        if (t + hs >= target - 1e-12 * std::max(1.0, std::abs(target))) {
            hs = target - t;
            lands = true;
        }
        if (!(hs > 1e-14 * std::max(1.0, std::abs(t)))) {
            // Steps collapsing next to the domain boundary (a finite-time
            // singularity such as x -> 0): the current velocity leaves the
            // domain within a negligible fraction of the span.
            axpy_into(tmp, y, 1e-6 * span, {{1.0, &k1}});
            if (domain_failures > 0 || !try_eval(rhs, guard, t, tmp, k2)) {
                sol.exited_domain = true;
                return sol;
            }
            throw IntegrationError("DP45 step size underflow at t = " + std::to_string(t));
        }

        bool ok = true;
        axpy_into(tmp, y, hs, {{a21, &k1}});
        ok = ok && try_eval(rhs, guard, t + c2 * hs, tmp, k2);
        if (ok) axpy_into(tmp, y, hs, {{a31, &k1}, {a32, &k2}});
        ok = ok && try_eval(rhs, guard, t + c3 * hs, tmp, k3);
        if (ok) axpy_into(tmp, y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        ok = ok && try_eval(rhs, guard, t + c4 * hs, tmp, k4);
        if (ok) axpy_into(tmp, y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        ok = ok && try_eval(rhs, guard, t + c5 * hs, tmp, k5);
        if (ok) axpy_into(tmp, y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        ok = ok && try_eval(rhs, guard, t + hs, tmp, k6);
        if (ok) axpy_into(ynew, y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        ok = ok && try_eval(rhs, guard, t + hs, ynew, k7);
        if (!ok) {
            ++sol.rejected;
            ++domain_failures;
            if (domain_failures > 60) {
                sol.exited_domain = true;
                return sol;
            }
            h = 0.25 * hs;
            continue;
        }

        for (std::size_t i = 0; i < n; ++i) {
            err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        }
        const double en = norm(err, y, ynew);
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (!std::isfinite(en) || en > 1.0) {
            ++sol.rejected;
            h = hs * (std::isfinite(en) ? std::min(fac, 1.0) : 0.2);
            continue;
        }

        domain_failures = 0;
        ++sol.steps;
        t = lands ? target : t + hs;
        y.swap(ynew);
        k1.swap(k7);
        if (cfg.output_step <= 0.0 || lands) record(sol, t, y, k1);
        if (lands) ++next_out;
        // A step shortened to hit an output node says little about the next one.
        h = lands ? std::max(h, hs * fac) : hs * fac;
    }
    return sol;
}

}  // namespace

OdeSolution integrate_ode(const OdeRhs& rhs, std::vector<double> y0, double t0, double t1,
                          const IntegratorConfig& config, const OdeGuard& guard,
                          const std::vector<bool>& error_mask) {
    config.validate();
    if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0) throw ArgumentError("need finite t0 <= t1");
    if (config.method == Method::RK4Fixed) return rk4(rhs, std::move(y0), t0, t1, config, guard);
    return dp45(rhs, std::move(y0), t0, t1, config, guard, error_mask);
}

}  // namespace eisenhart
