#include "eisenhart/linearize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "eisenhart/errors.hpp"
#include "eisenhart/kernels.hpp"

namespace eisenhart {

Point CoordinateMap::to_new(PointView old_point) const {
    if (old_domain && !old_domain(old_point)) throw DomainError(name + ": point outside the old chart");
    return forward(old_point);
}

Point CoordinateMap::to_old(PointView new_point) const {
    if (new_domain && !new_domain(new_point)) throw DomainError(name + ": point outside the new chart");
    return inverse(new_point);
}

std::vector<double> CoordinateMap::momenta_to_new(PointView new_point, PointView old_momenta) const {
    const Tensor J = jacobian(new_point);
    const int n = J.dim();
    if (old_momenta.size() != static_cast<std::size_t>(n)) throw ArgumentError("momentum dimension mismatch");
    std::vector<double> P(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) P[std::size_t(j)] += J(i, j) * old_momenta[std::size_t(i)];
    }
    return P;
}

std::vector<double> CoordinateMap::momenta_to_old(PointView new_point, PointView new_momenta) const {
    // p = J^-T P, i.e. solve J^T p = P.
    const Tensor J = jacobian(new_point);
    const int n = J.dim();
    if (new_momenta.size() != static_cast<std::size_t>(n)) throw ArgumentError("momentum dimension mismatch");
    Eigen::MatrixXd Jt(n, n);
    Eigen::VectorXd P(n);
    for (int i = 0; i < n; ++i) {
        P(i) = new_momenta[std::size_t(i)];
        for (int j = 0; j < n; ++j) Jt(i, j) = J(j, i);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(Jt);
    if (!lu.isInvertible()) throw LinearAlgebraError(name + ": singular Jacobian");
    const Eigen::VectorXd p = lu.solve(P);
    return {p.data(), p.data() + n};
}

CoordinateMap ermakov_map(double alpha, double V0) {
    if (!(alpha * V0 > 0.0) || !std::isfinite(alpha * V0)) throw ArgumentError("ermakov_map needs alpha V0 > 0");
    const double k = std::sqrt(alpha * V0);
    CoordinateMap m;
    m.name = "ermakov_map";
    m.old_labels = {"x", "z"};
    m.new_labels = {"X", "Y"};
    m.forward = [k](PointView q) { return Point{q[0] * std::cos(q[1] / k), q[0] * std::sin(q[1] / k)}; };
    // atan2 agrees with atan(Y/X) on X > 0 and stays continuous beyond it.
    m.inverse = [k](PointView Q) { return Point{std::hypot(Q[0], Q[1]), k * std::atan2(Q[1], Q[0])}; };
    m.jacobian = [k](PointView Q) {
        const double X = Q[0], Y = Q[1];
        const double r2 = X * X + Y * Y, r = std::sqrt(r2);
        Tensor J(2, 2);
        J(0, 0) = X / r;
        J(0, 1) = Y / r;
        J(1, 0) = -k * Y / r2;
        J(1, 1) = k * X / r2;
        return J;
    };
    m.old_domain = [k](PointView q) { return q[0] > 0.0 && std::abs(q[1] / k) < std::numbers::pi / 2; };
    m.new_domain = [](PointView Q) { return Q[0] > 0.0; };
    return m;
}

CoordinateMap oscillator_map(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ArgumentError("oscillator_map needs omega > 0");
    const double w = std::sqrt(omega);
    CoordinateMap m;
    m.name = "oscillator_map";
    m.old_labels = {"x", "u", "v"};
    m.new_labels = {"X", "Y", "Z"};
    m.forward = [w](PointView q) {
        const double zb = std::tan(w * q[1]);
        const double X = q[0] * std::sqrt(1.0 + zb * zb);
        const double Y = 0.5 * (2.0 * q[2] / w + zb - zb * q[0] * q[0]);
        return Point{X, Y, zb - Y};
    };
    m.inverse = [w](PointView Q) {
        const double zb = Q[1] + Q[2];
        const double s = 1.0 + zb * zb;
        return Point{Q[0] / std::sqrt(s), std::atan(zb) / w, 0.5 * w * (2.0 * Q[1] - zb + zb * Q[0] * Q[0] / s)};
    };
    m.jacobian = [w](PointView Q) {
        const double X = Q[0], zb = Q[1] + Q[2];
        const double s = 1.0 + zb * zb;
        const double dxdz = -X * zb / (s * std::sqrt(s));
        const double dvdz = X * X * (1.0 - zb * zb) / (s * s);
        Tensor J(3, 2);
        J(0, 0) = 1.0 / std::sqrt(s);
        J(0, 1) = dxdz;
        J(0, 2) = dxdz;
        J(1, 1) = 1.0 / (w * s);
        J(1, 2) = 1.0 / (w * s);
        J(2, 0) = w * zb * X / s;
        J(2, 1) = 0.5 * w * (1.0 + dvdz);
        J(2, 2) = 0.5 * w * (-1.0 + dvdz);
        return J;
    };
    m.old_domain = [w](PointView q) { return std::abs(w * q[1]) < std::numbers::pi / 2; };
    m.new_domain = [](PointView Q) { return std::isfinite(Q[0] + Q[1] + Q[2]); };
    return m;
}

namespace {

double sqrt_potential(const PotentialSpec& potential, double x) {
    if (!potential.in_domain(x)) throw DomainError("straightening: x outside the potential domain");
    const double v = potential.eval(x);
    if (!(v > 0.0)) throw DomainError("straightening needs V > 0");
    return std::sqrt(v);
}

// Inverse of the increasing function X(x) by bracket expansion from x_ref and TOMS 748.
double invert_straightened(const PotentialSpec& potential, double target, double x_ref) {
    if (target == 0.0) return x_ref;
    const auto f = [&](double x) { return straightened_coordinate(potential, x, x_ref) - target; };
    const auto admissible = [&](double x) { return potential.in_domain(x) && potential.eval(x) > 0.0; };
    const double dir = target > 0.0 ? 1.0 : -1.0;
    double lo = x_ref, flo = -target;
    double step = std::max(1e-3, std::abs(target) / sqrt_potential(potential, x_ref));
    for (int it = 0; it < 400; ++it) {
        double cand = lo + dir * step;
        int shrink = 0;
        while (!admissible(cand) && shrink < 200) {
            cand = 0.5 * (lo + cand);
            ++shrink;
        }
        if (!admissible(cand) || cand == lo) break;
        const double fc = f(cand);
        if (fc == 0.0) return cand;
        if ((fc > 0.0) == (flo < 0.0)) {
            double a = std::min(lo, cand), b = std::max(lo, cand);
            double fa = a == lo ? flo : fc, fb = a == lo ? fc : flo;
            std::uintmax_t iters = 200;
            const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                             boost::math::tools::eps_tolerance<double>(52), iters);
            return 0.5 * (r.first + r.second);
        }
        lo = cand;
        flo = fc;
        if (shrink == 0) step *= 2.0;
    }
    throw DomainError("straightening: target outside the image of X(x)");
}

}  // namespace

double straightened_coordinate(const PotentialSpec& potential, double x, double x_ref) {
    sqrt_potential(potential, x_ref);
    sqrt_potential(potential, x);
    if (x == x_ref) return 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const auto integrand = [&](double s) { return sqrt_potential(potential, s); };
    // A single 31-point rule settles most short intervals; otherwise adapt.
    // Boost's relative tolerance is kept reachable (1e-12) because its error
    // report is unreliable when the requested tolerance is below rounding.
    double error = 0.0;
    double value = GK::integrate(integrand, x_ref, x, 0, 1e-12, &error);
    if (!(error <= 1e-11)) value = GK::integrate(integrand, x_ref, x, 20, 1e-12, &error);
    if (!std::isfinite(value) || error > 1e-10 * std::max(1.0, std::abs(value))) {
        throw NumericError("straightening quadrature did not converge");
    }
    return value;
}

CoordinateMap null_straightening(const PotentialSpec& potential, double x_ref) {
    sqrt_potential(potential, x_ref);
    CoordinateMap m;
    m.name = "null_straightening";
    m.old_labels = {"x", "z"};
    m.new_labels = {"X", "z"};
    m.forward = [potential, x_ref](PointView q) {
        return Point{straightened_coordinate(potential, q[0], x_ref), q[1]};
    };
    m.inverse = [potential, x_ref](PointView Q) { return Point{invert_straightened(potential, Q[0], x_ref), Q[1]}; };
    m.jacobian = [potential, x_ref](PointView Q) {
        const double x = invert_straightened(potential, Q[0], x_ref);
        Tensor J(2, 2);
        J(0, 0) = 1.0 / sqrt_potential(potential, x);
        J(1, 1) = 1.0;
        return J;
    };
    m.old_domain = [potential](PointView q) { return potential.in_domain(q[0]) && potential.eval(q[0]) > 0.0; };
    m.new_domain = [](PointView Q) { return std::isfinite(Q[0]) && std::isfinite(Q[1]); };
    return m;
}

std::vector<double> resample_uniform(const Trajectory& traj, std::size_t index, std::size_t n) {
    if (traj.size() < 2 || n < 2) throw ArgumentError("resampling needs at least two samples");
    if (traj.rates.size() != traj.size()) throw ArgumentError("resampling needs coordinate rates");
    std::vector<double> t, y, dy;
    t.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        t.push_back(traj.samples[k].t);
        y.push_back(traj.samples[k].q.at(index));
        dy.push_back(traj.rates[k].q.at(index));
    }
    const double a = t.front(), b = t.back();
    const boost::math::interpolators::cubic_hermite<std::vector<double>> spline(std::move(t), std::move(y),
                                                                               std::move(dy));
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = k + 1 == n ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
        out[k] = spline(s);
    }
    return out;
}

namespace {

double segment_distance(PointView p, const Point& a, const Point& b) {
    double ab2 = 0.0, apab = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        ab2 += (b[k] - a[k]) * (b[k] - a[k]);
        apab += (p[k] - a[k]) * (b[k] - a[k]);
    }
    const double s = ab2 > 0.0 ? std::clamp(apab / ab2, 0.0, 1.0) : 0.0;
    double d2 = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double c = a[k] + s * (b[k] - a[k]) - p[k];
        d2 += c * c;
    }
    return std::sqrt(d2);
}

kernels::PointCloud to_cloud(const std::vector<Point>& pts) {
    kernels::PointCloud c;
    if (pts.empty()) return c;
    c.columns.assign(pts.front().size(), std::vector<double>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t k = 0; k < pts[i].size(); ++k) c.columns[k][i] = pts[i][k];
    }
    return c;
}

double directed_hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
    const auto hits = kernels::nearest_points(to_cloud(a), to_cloud(b));
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t j = hits[i].index;
        double d = std::sqrt(hits[i].distance_sq);
        if (j > 0) d = std::min(d, segment_distance(a[i], b[j - 1], b[j]));
        if (j + 1 < b.size()) d = std::min(d, segment_distance(a[i], b[j], b[j + 1]));
        worst = std::max(worst, d);
    }
    return worst;
}

std::vector<Point> dense_path(const Trajectory& traj, std::size_t n) {
    const std::size_t dim = traj.coord_labels.size();
    std::vector<std::vector<double>> cols(dim);
    for (std::size_t k = 0; k < dim; ++k) cols[k] = resample_uniform(traj, k, n);
    std::vector<Point> pts(n, Point(dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < dim; ++k) pts[i][k] = cols[k][i];
    }
    return pts;
}

}  // namespace

double polyline_hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
    if (a.empty() || b.empty()) throw ArgumentError("empty polyline");
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

ConformalComparison conformal_geodesic_compare(const MetricChart& metric, const ScalarField& n2,
                                               const PhaseState& state0, TimeSpan span,
                                               const IntegratorConfig& config) {
    ConformalComparison out;
    out.hamiltonian = metric.hamiltonian(state0.q, state0.p);
    out.null = std::abs(out.hamiltonian) < 1e-10;
    const MetricChart rescaled = conformally_rescale(metric, n2);
    const Trajectory a = geodesic_flow(metric, state0, span, config);
    const Trajectory b = geodesic_flow(rescaled, state0, span, config, n2);
    if (a.meta.exited_domain || b.meta.exited_domain) throw DomainError("conformal comparison left the domain");
    constexpr std::size_t kDense = 4001;
    out.path_distance = polyline_hausdorff(dense_path(a, kDense), dense_path(b, kDense));
    out.energy_drift = std::max(a.meta.max_energy_drift, drift_report(b, rescaled));
    out.cyclic_drift = std::max(a.meta.max_cyclic_drift, b.meta.max_cyclic_drift);
    return out;
}

StraighteningCheck straightening_check(const PotentialSpec& potential, double x0, TimeSpan span,
                                       const IntegratorConfig& config, std::size_t samples, double x_ref) {
    if (samples < 3) throw ArgumentError("need at least three resampling points");
    const auto domain = [potential](double x) { return potential.in_domain(x) && potential.eval(x) > 0.0; };
    if (!domain(x0)) throw DomainError("straightening needs V(x0) > 0");
    const MetricChart metric = riemannian_metric([potential](double x) { return potential.jet(x); }, -1.0, domain);
    const double pz = 1.0;
    const PhaseState s0{{x0, 0.0}, {std::sqrt(potential.eval(x0)) * pz, pz}, span.t0};
    const Trajectory traj = geodesic_flow(metric, s0, span, config);
    if (traj.meta.exited_domain) throw DomainError("null geodesic left the domain");

    Trajectory tau = reparametrize(traj, [&potential](PointView q) { return potential.eval(q[0]); });
    const CoordinateMap map = null_straightening(potential, x_ref);
    for (std::size_t k = 0; k < tau.size(); ++k) {
        const double x = tau.samples[k].q[0];
        tau.samples[k].q = map.to_new(tau.samples[k].q);
        tau.rates[k].q[0] *= std::sqrt(potential.eval(x));  // dX/dtau = sqrt(V) dx/dtau
    }
    tau.coord_labels = map.new_labels;

    StraighteningCheck out;
    const double t_first = tau.samples.front().t, t_last = tau.samples.back().t;
    out.tau_step = (t_last - t_first) / static_cast<double>(samples - 1);
    out.samples = samples;
    const auto X = resample_uniform(tau, 0, samples);
    const auto z = resample_uniform(tau, 1, samples);
    out.max_X_second_difference = kernels::max_abs_second_difference(X, out.tau_step);
    out.max_z_second_difference = kernels::max_abs_second_difference(z, out.tau_step);
    out.energy_drift = traj.meta.max_energy_drift;
    out.cyclic_drift = traj.meta.max_cyclic_drift;
    return out;
}

namespace {

IntegratorConfig on_grid(IntegratorConfig cfg, TimeSpan span, std::size_t samples) {
    if (cfg.method == Method::DP45Adaptive) cfg.output_step = (span.t1 - span.t0) / static_cast<double>(samples);
    return cfg;
}

void fill_explicit(RoundtripReport& r, const Trajectory& reference, const std::function<std::optional<double>(double)>& x_of_t) {
    for (const auto& s : reference.samples) {
        const auto x = x_of_t(s.t);
        if (!x) {
            ++r.skipped;
            continue;
        }
        r.t.push_back(s.t);
        r.x.push_back(*x);
        r.x_reference.push_back(s.q[0]);
    }
}

}  // namespace

RoundtripReport roundtrip(const PotentialSpec& potential, double x0, double v0, TimeSpan span,
                          const RoundtripOptions& options) {
    if (options.samples < 2) throw ArgumentError("roundtrip needs at least two samples");
    if (!(span.t1 > span.t0)) throw ArgumentError("roundtrip needs t1 > t0");
    RoundtripReport r;
    r.family = potential.family();
    const PotentialParams& pp = potential.params();
    const double h = 0.5 * v0 * v0 + potential.eval(x0);

    // No explicit real map for these two: compare through the lifted geodesics.
    if (r.family == Family::ErmakovOscillator) {
        return lift_projection(potential, LiftKind::Mixed13, pp.V0 > 0.0 ? 1.0 : -1.0, x0, v0, span, options);
    }
    // Attractive inverse square: no real momenta in the Riemannian lift.
    if (r.family == Family::Ermakov && pp.V0 < 0.0) {
        return lift_projection(potential, LiftKind::Lorentzian12, 1.0, x0, v0, span, options);
    }
    if (r.family == Family::Morse) {
        return lift_projection(potential, LiftKind::ConformalMixed13, h - pp.offset > 0.0 ? -1.0 : 1.0, x0, v0, span,
                               options);
    }

    const Trajectory reference = newton_flow(potential, x0, v0, span, on_grid(options.reference, span, options.samples));
    r.reference_drift = reference.meta.max_energy_drift;
    r.partial = reference.meta.exited_domain;

    switch (potential.family()) {
    case Family::Oscillator: {
        r.lift_kind = LiftKind::Lorentzian12;
        r.map_used = "oscillator_map";
        const LiftedSystem lift = build_lift(r.lift_kind, potential, 0.0, h);
        const CoordinateMap map = oscillator_map(pp.omega);
        const double w = std::sqrt(pp.omega);
        // The map is written for V = omega s^2 / 2 with s = x - x0 and no offset.
        const double s0 = x0 - pp.x0;
        std::vector<double> p_old = lift.recovery_momenta(v0);
        p_old[1] += pp.offset;
        const Point Q0 = map.to_new(Point{s0, 0.0, 0.0});
        const std::vector<double> P = map.momenta_to_new(Q0, p_old);
        // New metric at Zb = 0 is diag(1, 1, -1): the null line direction is (P_X, P_Y, -P_Z).
        const std::array<double, 3> d{P[0], P[1], -P[2]};
        const double dzb = d[1] + d[2];
        fill_explicit(r, reference, [&](double t) -> std::optional<double> {
            // u = t - t0; the chart covers |w u| < pi/2 and repeats with x -> -x every pi / w.
            const double phase = w * (t - span.t0);
            const double branch = std::round(phase / std::numbers::pi);
            if (std::abs(std::cos(phase)) < 1e-9) return std::nullopt;
            const double sigma = std::tan(phase) / dzb;
            const Point Q{Q0[0] + sigma * d[0], Q0[1] + sigma * d[1], Q0[2] + sigma * d[2]};
            const Point q = map.to_old(Q);
            const double sign = std::fmod(std::abs(branch), 2.0) == 0.0 ? 1.0 : -1.0;
            return pp.x0 + sign * q[0];
        });
        break;
    }
    case Family::Ermakov: {
        r.lift_kind = LiftKind::Riemannian11;
        r.map_used = "ermakov_map";
        const double alpha = 1.0;
        const LiftedSystem lift = build_lift(r.lift_kind, potential, alpha, h);
        const CoordinateMap map = ermakov_map(alpha, pp.V0);
        const Point Q0 = map.to_new(Point{x0 - pp.x0, options.z0});
        const std::vector<double> P = map.momenta_to_new(Q0, lift.recovery_momenta(v0));
        // Flat new chart: straight line with velocity P, same time t.
        fill_explicit(r, reference, [&](double t) -> std::optional<double> {
            const double dt = t - span.t0;
            const Point Q{Q0[0] + P[0] * dt, Q0[1] + P[1] * dt};
            return pp.x0 + map.inverse(Q)[0];
        });
        break;
    }
    default:
        throw ArgumentError("roundtrip supports the oscillator, ermakov, ermakov_oscillator and morse families");
    }
    r.compared = r.x.size();
    r.max_deviation = kernels::max_abs_difference(r.x, r.x_reference);
    return r;
}

RoundtripReport lift_projection(const PotentialSpec& potential, LiftKind kind, double alpha, double x0, double v0,
                                TimeSpan span, const RoundtripOptions& options) {
    if (options.samples < 2) throw ArgumentError("need at least two samples");
    if (!(span.t1 > span.t0)) throw ArgumentError("need t1 > t0");
    RoundtripReport r;
    r.family = potential.family();
    r.lift_kind = kind;
    r.map_used = "lifted_geodesic_projection";
    const double h = 0.5 * v0 * v0 + potential.eval(x0);
    const Trajectory reference = newton_flow(potential, x0, v0, span, on_grid(options.reference, span, options.samples));
    r.reference_drift = reference.meta.max_energy_drift;

    const LiftedSystem lift = build_lift(kind, potential, alpha, h);
    std::vector<double> q0(lift.coords().size(), 0.0);
    q0[0] = x0;
    for (std::size_t i = 1; i < q0.size(); ++i) {
        const std::string& l = lift.coords()[i];
        q0[i] = l == "z" ? options.z0 : l == "u" ? options.u0 : options.v0_ext;
    }
    const PhaseState s0{q0, lift.recovery_momenta(v0), span.t0};
    const Trajectory lifted = geodesic_flow(lift, s0, span, on_grid(options.lifted, span, options.samples));
    r.energy_drift = lifted.meta.max_energy_drift;
    r.cyclic_drift = lifted.meta.max_cyclic_drift;
    r.partial = reference.meta.exited_domain || lifted.meta.exited_domain;
    const std::size_t n = std::min(lifted.size(), reference.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(lifted.samples[k].t - reference.samples[k].t) > 1e-9 * std::max(1.0, std::abs(span.t1))) {
            throw NumericError("sample grids of the lifted and Newton flows disagree");
        }
        r.t.push_back(reference.samples[k].t);
        r.x.push_back(lifted.samples[k].q[0]);
        r.x_reference.push_back(reference.samples[k].q[0]);
    }
    r.compared = n;
    r.max_deviation = kernels::max_abs_difference(r.x, r.x_reference);
    return r;
}

nlohmann::json to_json(const RoundtripReport& r, bool with_samples) {
    nlohmann::json j{{"family", std::string(to_string(r.family))},
                     {"lift_kind", std::string(to_string(r.lift_kind))},
                     {"map_used", r.map_used},
                     {"max_deviation", r.max_deviation},
                     {"partial", r.partial},
                     {"compared", r.compared},
                     {"skipped", r.skipped},
                     {"energy_drift", r.energy_drift},
                     {"cyclic_drift", r.cyclic_drift},
                     {"reference_drift", r.reference_drift}};
    if (with_samples) {
        j["t"] = r.t;
        j["x"] = r.x;
        j["x_reference"] = r.x_reference;
    }
    return j;
}

}  // namespace eisenhart
