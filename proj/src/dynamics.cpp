#include "eisenhart/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "eisenhart/errors.hpp"

namespace eisenhart {

namespace {

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw ArgumentError(std::string(what) + " must be finite");
    }
}

Trajectory from_solution(const OdeSolution& sol, std::size_t n, const IntegratorConfig& cfg) {
    Trajectory traj;
    traj.samples.reserve(sol.t.size());
    traj.rates.reserve(sol.t.size());
    for (std::size_t k = 0; k < sol.t.size(); ++k) {
        const auto& y = sol.y[k];
        const auto& f = sol.dydt[k];
        traj.samples.push_back({{y.begin(), y.begin() + n}, {y.begin() + n, y.end()}, sol.t[k]});
        traj.rates.push_back({{f.begin(), f.begin() + n}, {f.begin() + n, f.end()}, sol.t[k]});
    }
    traj.meta.steps = sol.steps;
    traj.meta.rejected = sol.rejected;
    traj.meta.exited_domain = sol.exited_domain;
    traj.meta.uniform = cfg.method == Method::RK4Fixed;
    traj.meta.method = std::string(to_string(cfg.method));
    return traj;
}

double relative_drift(const std::vector<double>& values) {
    double m = 0.0;
    if (values.empty()) return m;
    const double h0 = values.front();
    for (double h : values) m = std::max(m, std::abs(h - h0) / std::max(1.0, std::abs(h0)));
    return m;
}

// Analytic -dH/dq against central differences of H at the first state.
void cross_check_gradient(const MetricChart& metric, const std::vector<double>& q, const std::vector<double>& p,
                          const std::vector<double>& analytic) {
    const double H = metric.hamiltonian(q, p);
    for (std::size_t a = 0; a < q.size(); ++a) {
        const double h = 1e-6 * std::max(1.0, std::abs(q[a]));
        std::vector<double> qp = q, qm = q;
        qp[a] += h;
        qm[a] -= h;
        if (!metric.admissible(qp) || !metric.admissible(qm)) continue;
        const double fd = -(metric.hamiltonian(qp, p) - metric.hamiltonian(qm, p)) / (2.0 * h);
        if (std::abs(fd - analytic[a]) > 1e-5 * (1.0 + std::abs(analytic[a]) + std::abs(H))) {
            throw NumericError("analytic dH/dq disagrees with finite differences along " + metric.labels()[a]);
        }
    }
}

}  // namespace

std::vector<double> Trajectory::parameters() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.t);
    return out;
}

std::vector<double> Trajectory::column(const std::string& label) const {
    if (label == "t" || label == "tau") return parameters();
    const auto pick = [&](const std::vector<std::string>& labels, bool momentum) -> std::optional<std::vector<double>> {
        const auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) return std::nullopt;
        const auto i = static_cast<std::size_t>(it - labels.begin());
        std::vector<double> out;
        out.reserve(samples.size());
        for (const auto& s : samples) out.push_back(momentum ? s.p[i] : s.q[i]);
        return out;
    };
    if (auto c = pick(coord_labels, false)) return *c;
    if (auto c = pick(momentum_labels, true)) return *c;
    throw ArgumentError("unknown trajectory label '" + label + "'");
}

Trajectory newton_flow(const PotentialSpec& potential, double x0, double v0, TimeSpan span,
                       const IntegratorConfig& config) {
    if (!std::isfinite(x0) || !std::isfinite(v0)) throw ArgumentError("initial data must be finite");
    if (!potential.in_domain(x0)) throw DomainError("x0 outside the potential domain");
    const OdeRhs rhs = [&potential](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -potential.eval(y[0], 1);
    };
    const OdeGuard guard = [&potential](std::span<const double> y) { return potential.in_domain(y[0]); };
    const OdeSolution sol = integrate_ode(rhs, {x0, v0}, span.t0, span.t1, config, guard);
    Trajectory traj = from_solution(sol, 1, config);
    traj.coord_labels = {"x"};
    traj.momentum_labels = {"p_x"};
    traj.meta.max_energy_drift = drift_report(traj, potential);
    return traj;
}

Trajectory geodesic_flow(const MetricChart& metric, const PhaseState& state0, TimeSpan span,
                         const IntegratorConfig& config, const std::optional<ScalarField>& time_scale) {
    const auto n = static_cast<std::size_t>(metric.dim());
    if (state0.q.size() != n || state0.p.size() != n) throw ArgumentError("state dimension does not match the metric");
    check_finite(state0.q, "q");
    check_finite(state0.p, "p");
    if (time_scale && time_scale->dim() != metric.dim()) throw ArgumentError("time scale dimension mismatch");
    const std::vector<bool>& deps = metric.depends_on();

    // Writes q' = g^-1 p and p'_a = 1/2 v^T (d_a g) v.
    const auto vector_field = [&metric, &deps, n](std::span<const double> q, std::span<const double> p,
                                                   std::span<double> dq, std::span<double> dp) {
        const MetricJet jet = metric.jet(q, 1);
        Tensor gi;
        try {
            gi = invert_metric(jet.g);
        } catch (const LinearAlgebraError&) {
            // A degenerate metric is the edge of the chart, e.g. |V| -> inf at a pole.
            throw DomainError("metric degenerates along the flow");
        }
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += gi(int(i), int(j)) * p[j];
            dq[i] = v;
        }
        for (std::size_t a = 0; a < n; ++a) {
            if (!deps[a]) {
                dp[a] = 0.0;
                continue;
            }
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) s += dq[i] * jet.dg(int(a), int(i), int(j)) * dq[j];
            }
            dp[a] = 0.5 * s;
        }
    };

    const OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
        const auto q = y.subspan(0, n);
        vector_field(q, y.subspan(n), dy.subspan(0, n), dy.subspan(n));
        if (time_scale) {
            const double s = (*time_scale)(q);
            for (double& v : dy) v *= s;
        }
    };
    const OdeGuard guard = [&](std::span<const double> y) {
        const auto q = y.subspan(0, n);
        return metric.admissible(q) && (!time_scale || (*time_scale)(q) > 0.0);
    };
    std::vector<double> y0 = state0.q;
    y0.insert(y0.end(), state0.p.begin(), state0.p.end());
    if (!guard(y0)) throw DomainError("initial state is not admissible");

    {
        std::vector<double> dq(n), dp(n);
        vector_field(state0.q, state0.p, dq, dp);
        cross_check_gradient(metric, state0.q, state0.p, dp);
    }

    std::vector<bool> mask(2 * n, true);
    for (std::size_t i = 0; i < n; ++i) mask[i] = deps[i];

    const OdeSolution sol = integrate_ode(rhs, std::move(y0), span.t0, span.t1, config, guard, mask);
    Trajectory traj = from_solution(sol, n, config);
    traj.coord_labels = metric.labels();
    for (const auto& l : metric.labels()) traj.momentum_labels.push_back("p_" + l);
    traj.meta.max_energy_drift = drift_report(traj, metric);
    traj.meta.max_cyclic_drift = cyclic_drift(traj, metric);
    return traj;
}

Trajectory geodesic_flow(const LiftedSystem& system, const PhaseState& state0, TimeSpan span,
                         const IntegratorConfig& config) {
    return geodesic_flow(system.metric(), state0, span, config);
}

Trajectory project(const Trajectory& traj, const std::vector<std::string>& labels) {
    std::vector<std::size_t> qi, pi;
    for (const auto& l : labels) {
        const bool known = std::find(traj.coord_labels.begin(), traj.coord_labels.end(), l) != traj.coord_labels.end() ||
                           std::find(traj.momentum_labels.begin(), traj.momentum_labels.end(), l) !=
                               traj.momentum_labels.end();
        if (!known) throw ArgumentError("unknown trajectory label '" + l + "'");
    }
    const auto wanted = [&](const std::string& l) { return std::find(labels.begin(), labels.end(), l) != labels.end(); };
    Trajectory out;
    out.parameter = traj.parameter;
    out.meta = traj.meta;
    for (std::size_t i = 0; i < traj.coord_labels.size(); ++i) {
        if (wanted(traj.coord_labels[i])) {
            qi.push_back(i);
            out.coord_labels.push_back(traj.coord_labels[i]);
        }
    }
    for (std::size_t i = 0; i < traj.momentum_labels.size(); ++i) {
        if (wanted(traj.momentum_labels[i])) {
            pi.push_back(i);
            out.momentum_labels.push_back(traj.momentum_labels[i]);
        }
    }
    const auto restrict = [&](const PhaseState& s) {
        PhaseState r;
        r.t = s.t;
        for (auto i : qi) r.q.push_back(i < s.q.size() ? s.q[i] : 0.0);
        for (auto i : pi) {
            if (i < s.p.size()) r.p.push_back(s.p[i]);
        }
        return r;
    };
    for (const auto& s : traj.samples) out.samples.push_back(restrict(s));
    for (const auto& s : traj.rates) out.rates.push_back(restrict(s));
    return out;
}

Trajectory reparametrize(const Trajectory& traj, const std::function<double(PointView)>& factor) {
    Trajectory out = traj;
    out.parameter = ParameterLabel::tau;
    out.meta.uniform = false;
    double tau = 0.0, prev_n2 = 0.0;
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        const PhaseState& s = traj.samples[k];
        const double n2 = factor(s.q);
        if (!(n2 > 0.0) || !std::isfinite(n2)) {
            throw ReparametrizationError("N^2 <= 0 at parameter " + std::to_string(s.t));
        }
        tau = k == 0 ? s.t : tau + 0.5 * (prev_n2 + n2) * (s.t - traj.samples[k - 1].t);
        prev_n2 = n2;
        out.samples[k].t = tau;
        for (double& p : out.samples[k].p) p /= n2;
        if (k < out.rates.size()) {
            out.rates[k].t = tau;
            for (double& v : out.rates[k].q) v /= n2;
            out.rates[k].p.clear();
        }
    }
    return out;
}

double drift_report(const Trajectory& traj, const MetricChart& metric) {
    std::vector<double> h;
    h.reserve(traj.size());
    for (const auto& s : traj.samples) h.push_back(metric.hamiltonian(s.q, s.p));
    return relative_drift(h);
}

double drift_report(const Trajectory& traj, const LiftedSystem& system) {
    return drift_report(traj, system.metric());
}

double drift_report(const Trajectory& traj, const PotentialSpec& potential) {
    std::vector<double> h;
    h.reserve(traj.size());
    for (const auto& s : traj.samples) h.push_back(0.5 * s.p[0] * s.p[0] + potential.eval(s.q[0]));
    return relative_drift(h);
}

double cyclic_drift(const Trajectory& traj, const MetricChart& metric) {
    double m = 0.0;
    const auto& deps = metric.depends_on();
    for (std::size_t i = 0; i < deps.size(); ++i) {
        if (deps[i]) continue;
        std::vector<double> p;
        p.reserve(traj.size());
        for (const auto& s : traj.samples) p.push_back(s.p[i]);
        m = std::max(m, relative_drift(p));
    }
    return m;
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

std::string to_csv(const Trajectory& traj, const std::vector<std::string>& header_comments) {
    std::ostringstream os;
    for (const auto& c : header_comments) os << "# " << c << '\n';
    os << (traj.parameter == ParameterLabel::t ? "t" : "tau");
    for (const auto& l : traj.coord_labels) os << ',' << l;
    for (const auto& l : traj.momentum_labels) os << ',' << l;
    os << '\n';
    for (const auto& s : traj.samples) {
        os << format_double(s.t);
        for (double v : s.q) os << ',' << format_double(v);
        for (double v : s.p) os << ',' << format_double(v);
        os << '\n';
    }
    return os.str();
}

nlohmann::json to_json(const Trajectory& traj) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : traj.samples) samples.push_back({{"param", s.t}, {"q", s.q}, {"p", s.p}});
    return {{"parameter", traj.parameter == ParameterLabel::t ? "t" : "tau"},
            {"coords", traj.coord_labels},
            {"momenta", traj.momentum_labels},
            {"meta",
             {{"steps", traj.meta.steps},
              {"rejected", traj.meta.rejected},
              {"max_energy_drift", traj.meta.max_energy_drift},
              {"max_cyclic_drift", traj.meta.max_cyclic_drift},
              {"exited_domain", traj.meta.exited_domain},
              {"uniform", traj.meta.uniform},
              {"method", traj.meta.method}}},
            {"samples", samples}};
}

}  // namespace eisenhart
