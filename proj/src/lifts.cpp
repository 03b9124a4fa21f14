#include "eisenhart/lifts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "eisenhart/errors.hpp"

namespace eisenhart {

namespace {

constexpr std::array<std::pair<LiftKind, std::string_view>, 4> kKindNames{{
    {LiftKind::Riemannian11, "riemannian11"},
    {LiftKind::Lorentzian12, "lorentzian12"},
    {LiftKind::Mixed13, "mixed13"},
    {LiftKind::ConformalMixed13, "conformal_mixed13"},
}};

MetricChart::Guard x_guard(std::function<bool(double)> domain) {
    return [domain = std::move(domain)](PointView p) { return !domain || domain(p[0]); };
}

// Samples [lo, hi] and throws ConstructionError where `ok` fails.
void check_on_interval(const std::optional<std::pair<double, double>>& interval,
                       const std::function<bool(double)>& ok, const std::string& what) {
    if (!interval) return;
    const auto [lo, hi] = *interval;
    if (!(lo <= hi)) throw ArgumentError("check_domain needs lo <= hi");
    constexpr int kSamples = 201;
    for (int i = 0; i < kSamples; ++i) {
        const double x = lo + (hi - lo) * i / (kSamples - 1);
        bool good = false;
        try {
            good = ok(x);
        } catch (const DomainError&) {
            good = false;
        }
        if (!good) throw ConstructionError(what + " fails at x = " + std::to_string(x));
    }
}

JetFunction potential_jet(const PotentialSpec& potential) {
    return [potential](double x) { return potential.jet(x); };
}

std::function<bool(double)> potential_domain(const PotentialSpec& potential) {
    return [potential](double x) { return potential.in_domain(x); };
}

}  // namespace

std::string_view to_string(LiftKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

LiftKind lift_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    throw ArgumentError("unknown lift kind '" + std::string(name) + "'");
}

MetricChart riemannian_metric(JetFunction V, double alpha, std::function<bool(double)> domain) {
    if (alpha == 0.0) throw ConstructionError("alpha must be non-zero");
    auto gzz = [V, alpha](double x) { return reciprocal(alpha * V(x)); };
    auto guard = [V, alpha, domain](double x) { return (!domain || domain(x)) && V(x)[0] != 0.0; };
    return MetricChart::along_axis({"x", "z"}, 0,
                                   {{0, 0, [](double) { return jet_constant(1.0); }}, {1, 1, std::move(gzz)}},
                                   x_guard(std::move(guard)));
}

MetricChart pp_wave_metric(JetFunction V, std::function<bool(double)> domain) {
    auto guu = [V](double x) { return -2.0 * V(x); };
    return MetricChart::along_axis({"x", "u", "v"}, 0,
                                   {{0, 0, [](double) { return jet_constant(1.0); }},
                                    {1, 1, std::move(guu)},
                                    {1, 2, [](double) { return jet_constant(1.0); }}},
                                   x_guard(std::move(domain)));
}

MetricChart mixed_metric(JetFunction F1, JetFunction F2, double alpha, std::function<bool(double)> domain) {
    if (alpha == 0.0) throw ConstructionError("alpha must be non-zero");
    auto gzz = [F1, alpha](double x) { return reciprocal(alpha * F1(x)); };
    auto guu = [F2](double x) { return -2.0 * F2(x); };
    auto guard = [F1, domain](double x) { return (!domain || domain(x)) && F1(x)[0] != 0.0; };
    return MetricChart::along_axis({"x", "z", "u", "v"}, 0,
                                   {{0, 0, [](double) { return jet_constant(1.0); }},
                                    {1, 1, std::move(gzz)},
                                    {2, 2, std::move(guu)},
                                    {2, 3, [](double) { return jet_constant(1.0); }}},
                                   x_guard(std::move(guard)));
}

MetricChart conformal_mixed_metric(JetFunction F1, JetFunction V1, JetFunction V2, double alpha,
                                   std::function<bool(double)> domain) {
    if (alpha == 0.0) throw ConstructionError("alpha must be non-zero");
    auto gzz = [F1, alpha](double x) { return reciprocal(alpha * F1(x)); };
    auto guu = [V1, V2](double x) {
        const Jet inv = reciprocal(V2(x));
        return -2.0 * (V1(x) * inv * inv);
    };
    auto guv = [V2](double x) { return reciprocal(V2(x)); };
    auto guard = [F1, V2, domain](double x) {
        return (!domain || domain(x)) && F1(x)[0] != 0.0 && V2(x)[0] != 0.0;
    };
    return MetricChart::along_axis({"x", "z", "u", "v"}, 0,
                                   {{0, 0, [](double) { return jet_constant(1.0); }},
                                    {1, 1, std::move(gzz)},
                                    {2, 2, std::move(guu)},
                                    {2, 3, std::move(guv)}},
                                   x_guard(std::move(guard)));
}

std::vector<int> LiftedSystem::cyclic_coordinates() const {
    std::vector<int> out;
    for (int i = 0; i < metric_.dim(); ++i) {
        if (!metric_.depends_on()[static_cast<std::size_t>(i)]) out.push_back(i);
    }
    return out;
}

std::vector<double> LiftedSystem::recovery_momenta(double p_x) const {
    std::vector<double> p(coords().size(), 0.0);
    p[0] = p_x;
    for (const auto& [label, value] : recovery_.fixed_momenta) {
        p[static_cast<std::size_t>(metric_.index_of(label))] = value;
    }
    return p;
}

double LiftedSystem::recovered_potential(double x) const {
    std::vector<double> q(coords().size(), 0.0);
    q[0] = x;
    const std::vector<double> p = recovery_momenta(0.0);
    return metric_.hamiltonian(q, p) - (recovery_.hamiltonian_level - recovery_.original_energy);
}

nlohmann::json LiftedSystem::to_json() const {
    return {{"lift", std::string(to_string(kind_))},
            {"alpha", alpha_},
            {"coords", coords()},
            {"potential", potential_.to_json()},
            {"recovery",
             {{"fixed_momenta", recovery_.fixed_momenta},
              {"hamiltonian_level", recovery_.hamiltonian_level},
              {"original_energy", recovery_.original_energy},
              {"null", recovery_.null}}}};
}

LiftedSystem build_lift(LiftKind kind, const PotentialSpec& potential, double alpha, double original_energy,
                        const LiftOptions& options) {
    if (!std::isfinite(alpha) || !std::isfinite(original_energy)) {
        throw ArgumentError("alpha and energy must be finite");
    }
    const double h = original_energy;
    const auto domain = potential_domain(potential);
    const JetFunction V = potential_jet(potential);
    RecoveryConstraint rec;
    rec.original_energy = h;
    std::map<std::string, JetFunction> aux;

    switch (kind) {
    case LiftKind::Riemannian11: {
        if (!(alpha > 0.0)) throw ConstructionError("Riemannian lift needs alpha > 0 so that alpha p_z^2 = 2");
        check_on_interval(options.check_domain, [&](double x) { return alpha * potential.eval(x) > 0.0; },
                          "alpha V > 0");
        auto guard = [potential, alpha](double x) { return potential.in_domain(x) && alpha * potential.eval(x) > 0.0; };
        rec.fixed_momenta = {{"z", std::sqrt(2.0 / alpha)}};
        rec.hamiltonian_level = h;
        rec.null = false;
        aux["V"] = V;
        return LiftedSystem(kind, alpha, potential, riemannian_metric(V, alpha, std::move(guard)), std::move(aux),
                            std::move(rec));
    }
    case LiftKind::Lorentzian12: {
        check_on_interval(options.check_domain, domain, "potential domain");
        rec.fixed_momenta = {{"u", -h}, {"v", 1.0}};
        rec.hamiltonian_level = 0.0;
        rec.null = true;
        aux["V"] = V;
        return LiftedSystem(kind, alpha, potential, pp_wave_metric(V, domain), std::move(aux), std::move(rec));
    }
    case LiftKind::Mixed13: {
        if (potential.family() != Family::ErmakovOscillator) {
            throw ArgumentError("Mixed13 lift needs the Ermakov-oscillator family");
        }
        if (alpha == 0.0) throw ConstructionError("alpha must be non-zero");
        const PotentialParams& pp = potential.params();
        if (!(pp.V0 / alpha > 0.0)) throw ConstructionError("Mixed13 needs V0 / alpha > 0 for a real p_z");
        check_on_interval(options.check_domain, domain, "potential domain");
        const double x0 = pp.x0, omega = pp.omega, offset = pp.offset;
        JetFunction F1 = [x0](double x) {
            const double s = x - x0;
            return reciprocal(Jet{s * s, 2.0 * s, 2.0, 0.0});
        };
        JetFunction F2 = [x0, omega, offset](double x) {
            const double s = x - x0;
            return Jet{0.5 * omega * s * s + offset, omega * s, omega, 0.0};
        };
        rec.fixed_momenta = {{"z", std::sqrt(2.0 * pp.V0 / alpha)}, {"u", -h}, {"v", 1.0}};
        rec.hamiltonian_level = 0.0;
        rec.null = true;
        aux["F1"] = F1;
        aux["F2"] = F2;
        return LiftedSystem(kind, alpha, potential, mixed_metric(F1, F2, alpha, domain), std::move(aux),
                            std::move(rec));
    }
    case LiftKind::ConformalMixed13: {
        if (potential.family() != Family::Morse && potential.family() != Family::Exponential) {
            throw ArgumentError("ConformalMixed13 lift needs the Morse or exponential family");
        }
        if (alpha == 0.0) throw ConstructionError("alpha must be non-zero");
        if (options.v2_amplitude == 0.0) throw ConstructionError("V2 amplitude must be non-zero");
        const PotentialParams& pp = potential.params();
        const double level = h - pp.offset;
        if (level != 0.0 && !(-level / alpha > 0.0)) {
            throw ConstructionError("ConformalMixed13 needs alpha p_z^2 / 2 = -(h - offset); sign of alpha is incompatible");
        }
        check_on_interval(options.check_domain, domain, "potential domain");
        const double lambda = pp.lambda, x0 = pp.x0, s = options.v2_amplitude, pu = options.coupling_momentum;
        const double c1 = pp.V1 - pu * s;
        const double c2 = potential.family() == Family::Morse ? pp.V2 : 0.0;
        const auto expo = [x0](double amplitude, double rate, double x) {
            const double e = amplitude * std::exp(rate * (x - x0));
            return Jet{e, rate * e, rate * rate * e, rate * rate * rate * e};
        };
        JetFunction V1 = [=](double x) { return expo(c1, lambda, x) + expo(c2, 2.0 * lambda, x); };
        JetFunction V2 = [=](double x) { return expo(s, lambda, x); };
        JetFunction F1 = [](double) { return jet_constant(1.0); };
        rec.fixed_momenta = {{"z", level == 0.0 ? 0.0 : std::sqrt(-2.0 * level / alpha)}, {"u", pu}, {"v", 1.0}};
        rec.hamiltonian_level = 0.0;
        rec.null = true;
        aux["F1"] = F1;
        aux["V1"] = V1;
        aux["V2"] = V2;
        return LiftedSystem(kind, alpha, potential, conformal_mixed_metric(F1, V1, V2, alpha, domain),
                            std::move(aux), std::move(rec));
    }
    }
    throw ArgumentError("unknown lift kind");
}

double lifted_hamiltonian(const LiftedSystem& system, std::span<const double> q, std::span<const double> p) {
    const auto n = system.coords().size();
    if (q.size() != n || p.size() != n) throw ArgumentError("state dimension does not match the lifted system");
    return system.metric().hamiltonian(q, p);
}

double ResidualVector::max_relative() const {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double s = std::max(scales[i], std::numeric_limits<double>::min());
        m = std::max(m, std::abs(values[i]) / s);
    }
    return m;
}

ResidualVector flatness_residual(LiftKind kind, std::span<const JetFunction> functions, double x) {
    const std::size_t needed = (kind == LiftKind::Riemannian11 || kind == LiftKind::Lorentzian12) ? 1 : 2;
    if (functions.size() != needed) throw ArgumentError("wrong number of functions for this lift kind");
    ResidualVector r;
    switch (kind) {
    case LiftKind::Riemannian11: {
        const Jet v = functions[0](x);
        r.values = {2.0 * v[2] * v[0] - 3.0 * v[1] * v[1]};
        r.scales = {std::abs(2.0 * v[2] * v[0]) + 3.0 * v[1] * v[1]};
        break;
    }
    case LiftKind::Lorentzian12: {
        const Jet v = functions[0](x);
        r.values = {v[3]};
        r.scales = {std::abs(v[0]) + std::abs(v[1]) + std::abs(v[2]) + std::abs(v[3])};
        break;
    }
    case LiftKind::Mixed13: {
        const Jet f1 = functions[0](x);
        const Jet f2 = functions[1](x);
        r.values = {2.0 * f1[2] * f1[0] - 3.0 * f1[1] * f1[1], 2.0 * f2[2] * f1[0] + f2[1] * f1[1]};
        r.scales = {std::abs(2.0 * f1[2] * f1[0]) + 3.0 * f1[1] * f1[1],
                    std::abs(2.0 * f2[2] * f1[0]) + std::abs(f2[1] * f1[1])};
        break;
    }
    case LiftKind::ConformalMixed13: {
        const Jet v1 = functions[0](x);
        const Jet v2 = functions[1](x);
        r.values = {3.0 * v2[0] * (v1[2] * v2[0] - 3.0 * v1[1] * v2[1]) + 6.0 * v1[0] * v2[1] * v2[1],
                    v2[2] * v2[0] - v2[1] * v2[1]};
        r.scales = {3.0 * std::abs(v2[0]) * (std::abs(v1[2] * v2[0]) + 3.0 * std::abs(v1[1] * v2[1])) +
                        6.0 * std::abs(v1[0]) * v2[1] * v2[1],
                    std::abs(v2[2] * v2[0]) + v2[1] * v2[1]};
        break;
    }
    }
    return r;
}

ResidualVector flatness_residual(const LiftedSystem& system, double x) {
    const auto& aux = system.aux();
    switch (system.kind()) {
    case LiftKind::Riemannian11:
    case LiftKind::Lorentzian12: {
        const std::array<JetFunction, 1> f{aux.at("V")};
        return flatness_residual(system.kind(), f, x);
    }
    case LiftKind::Mixed13: {
        const std::array<JetFunction, 2> f{aux.at("F1"), aux.at("F2")};
        return flatness_residual(system.kind(), f, x);
    }
    case LiftKind::ConformalMixed13: {
        const std::array<JetFunction, 2> f{aux.at("V1"), aux.at("V2")};
        return flatness_residual(system.kind(), f, x);
    }
    }
    throw ArgumentError("unknown lift kind");
}

}  // namespace eisenhart
