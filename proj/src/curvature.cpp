#include "eisenhart/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "eisenhart/errors.hpp"
#include "eisenhart/parallel.hpp"

namespace eisenhart {

namespace {

// Connection coefficients and as many of their derivatives as the jet allows.
struct Connection {
    Tensor gi;       // g^kl
    Tensor gamma;    // (k, i, j)
    Tensor dgi;      // (a, k, l)
    Tensor dgamma;   // (m, k, i, j)           jet order >= 2
    Tensor ddgamma;  // (p, m, k, i, j)        jet order >= 3
};

Connection connection(const MetricJet& jet) {
    const int n = jet.dim();
    if (jet.order < 1) throw ArgumentError("Christoffel symbols need first metric partials");
    Connection c;
    c.gi = invert_metric(jet.g);
    const Tensor& gi = c.gi;

    Tensor first(n, 3);  // Gamma_lij
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                first(l, i, j) = 0.5 * (jet.dg(i, l, j) + jet.dg(j, l, i) - jet.dg(l, i, j));

    c.gamma = Tensor(n, 3);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += gi(k, l) * first(l, i, j);
                c.gamma(k, i, j) = s;
            }

    c.dgi = Tensor(n, 3);
    for (int a = 0; a < n; ++a)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                double s = 0.0;
                for (int b = 0; b < n; ++b)
                    for (int e = 0; e < n; ++e) s -= gi(k, b) * jet.dg(a, b, e) * gi(e, l);
                c.dgi(a, k, l) = s;
            }
    if (jet.order < 2) return c;

    Tensor dfirst(n, 4);  // d_m Gamma_lij
    for (int m = 0; m < n; ++m)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    dfirst(m, l, i, j) = 0.5 * (jet.ddg(m, i, l, j) + jet.ddg(m, j, l, i) - jet.ddg(m, l, i, j));

    c.dgamma = Tensor(n, 4);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) s += c.dgi(m, k, l) * first(l, i, j) + gi(k, l) * dfirst(m, l, i, j);
                    c.dgamma(m, k, i, j) = s;
                }
    if (jet.order < 3) return c;

    Tensor ddgi(n, 4);  // d_p d_m g^kl
    for (int p = 0; p < n; ++p)
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int b = 0; b < n; ++b)
                        for (int e = 0; e < n; ++e) {
                            s -= c.dgi(p, k, b) * jet.dg(m, b, e) * gi(e, l);
                            s -= gi(k, b) * jet.ddg(p, m, b, e) * gi(e, l);
                            s -= gi(k, b) * jet.dg(m, b, e) * c.dgi(p, e, l);
                        }
                    ddgi(p, m, k, l) = s;
                }

    c.ddgamma = Tensor(n, 5);
    for (int p = 0; p < n; ++p)
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        double s = 0.0;
                        for (int l = 0; l < n; ++l) {
                            const double ddfirst = 0.5 * (jet.dddg(p, m, i, l, j) + jet.dddg(p, m, j, l, i) -
                                                          jet.dddg(p, m, l, i, j));
                            s += ddgi(p, m, k, l) * first(l, i, j) + c.dgi(m, k, l) * dfirst(p, l, i, j) +
                                 c.dgi(p, k, l) * dfirst(m, l, i, j) + gi(k, l) * ddfirst;
                        }
                        c.ddgamma(p, m, k, i, j) = s;
                    }
    return c;
}

// R^i_jkl
Tensor riemann_up(const Connection& c) {
    const int n = c.gamma.dim();
    Tensor r(n, 4);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = c.dgamma(k, i, j, l) - c.dgamma(l, i, j, k);
                    for (int m = 0; m < n; ++m) s += c.gamma(i, k, m) * c.gamma(m, j, l) - c.gamma(i, l, m) * c.gamma(m, j, k);
                    r(i, j, k, l) = s;
                }
    return r;
}

Tensor lower_first(const Tensor& g, const Tensor& rup) {
    const int n = g.dim();
    Tensor r(n, 4);
    for (int a = 0; a < n; ++a)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int i = 0; i < n; ++i) s += g(a, i) * rup(i, j, k, l);
                    r(a, j, k, l) = s;
                }
    return r;
}

RicciResult contract(const Tensor& gi, const Tensor& rup) {
    const int n = gi.dim();
    RicciResult out{Tensor(n, 2), 0.0};
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += rup(i, j, i, l);
            out.ricci(j, l) = s;
        }
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) out.scalar += gi(j, l) * out.ricci(j, l);
    return out;
}

RicciGradient ricci_gradient_from(const Connection& c, const RicciResult& rr) {
    const int n = c.gamma.dim();
    RicciGradient out{Tensor(n, 3), Tensor(n, 1)};
    for (int p = 0; p < n; ++p)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) {
                    // d_p R^i_jil
                    s += c.ddgamma(p, i, i, j, l) - c.ddgamma(p, l, i, j, i);
                    for (int m = 0; m < n; ++m) {
                        s += c.dgamma(p, i, i, m) * c.gamma(m, j, l) + c.gamma(i, i, m) * c.dgamma(p, m, j, l) -
                             c.dgamma(p, i, l, m) * c.gamma(m, j, i) - c.gamma(i, l, m) * c.dgamma(p, m, j, i);
                    }
                }
                out.ricci(p, j, l) = s;
            }
    for (int p = 0; p < n; ++p) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) s += c.dgi(p, j, l) * rr.ricci(j, l) + c.gi(j, l) * out.ricci(p, j, l);
        out.scalar(p) = s;
    }
    return out;
}

Tensor cotton_from(const Tensor& g, const Connection& c, const RicciResult& rr, const RicciGradient& dr) {
    const int n = g.dim();
    Tensor cov(n, 3);  // (m, nu, k) = nabla_k R_m nu
    for (int m = 0; m < n; ++m)
        for (int nu = 0; nu < n; ++nu)
            for (int k = 0; k < n; ++k) {
                double s = dr.ricci(k, m, nu);
                for (int l = 0; l < n; ++l) s -= c.gamma(l, k, m) * rr.ricci(l, nu) + c.gamma(l, k, nu) * rr.ricci(m, l);
                cov(m, nu, k) = s;
            }
    Tensor out(n, 3);
    for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu)
            for (int ka = 0; ka < n; ++ka)
                out(mu, nu, ka) = cov(mu, nu, ka) - cov(ka, nu, mu) +
                                  0.25 * (dr.scalar(mu) * g(nu, ka) - dr.scalar(ka) * g(nu, mu));
    return out;
}

Tensor weyl_from(const Tensor& g, const Tensor& rl, const RicciResult& rr) {
    const int n = g.dim();
    const double c1 = 2.0 / (n - 2);
    const double c2 = 2.0 / ((n - 1.0) * (n - 2.0));
    const Tensor& ric = rr.ricci;
    Tensor out(n, 4);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    const double ga_ric = 0.5 * (g(a, c) * ric(d, b) - g(a, d) * ric(c, b));
                    const double gb_ric = 0.5 * (g(b, c) * ric(d, a) - g(b, d) * ric(c, a));
                    const double gg = 0.5 * (g(a, c) * g(d, b) - g(a, d) * g(c, b));
                    out(a, b, c, d) = rl(a, b, c, d) - c1 * (ga_ric - gb_ric) + c2 * rr.scalar * gg;
                }
    return out;
}

void require_point(const MetricChart& metric, PointView point) {
    if (static_cast<int>(point.size()) != metric.dim()) throw DimensionError("point dimension does not match chart");
}

}  // namespace

Tensor christoffel(const MetricChart& metric, PointView point) {
    require_point(metric, point);
    return connection(metric.jet(point, 1)).gamma;
}

Tensor christoffel_gradient(const MetricChart& metric, PointView point) {
    require_point(metric, point);
    return connection(metric.jet(point, 2)).dgamma;
}

Tensor christoffel_gradient_fd(const MetricChart& metric, PointView point, double h) {
    require_point(metric, point);
    const int n = metric.dim();
    Tensor out(n, 4);
    for (int m = 0; m < n; ++m) {
        Point xp(point.begin(), point.end()), xm = xp;
        xp[static_cast<std::size_t>(m)] += h;
        xm[static_cast<std::size_t>(m)] -= h;
        const Tensor gp = christoffel(metric, xp);
        const Tensor gm = christoffel(metric, xm);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out(m, k, i, j) = (gp(k, i, j) - gm(k, i, j)) / (2.0 * h);
    }
    return out;
}

Tensor riemann(const MetricChart& metric, PointView point) {
    require_point(metric, point);
    const MetricJet jet = metric.jet(point, 2);
    return lower_first(jet.g, riemann_up(connection(jet)));
}

RicciResult ricci(const MetricChart& metric, PointView point) {
    require_point(metric, point);
    const Connection c = connection(metric.jet(point, 2));
    return contract(c.gi, riemann_up(c));
}

RicciGradient ricci_gradient(const MetricChart& metric, PointView point) {
    require_point(metric, point);
    const Connection c = connection(metric.jet(point, 3));
    return ricci_gradient_from(c, contract(c.gi, riemann_up(c)));
}

RicciGradient ricci_gradient_fd(const MetricChart& metric, PointView point, double h) {
    require_point(metric, point);
    const int n = metric.dim();
    RicciGradient out{Tensor(n, 3), Tensor(n, 1)};
    for (int m = 0; m < n; ++m) {
        Point xp(point.begin(), point.end()), xm = xp;
        xp[static_cast<std::size_t>(m)] += h;
        xm[static_cast<std::size_t>(m)] -= h;
        const RicciResult rp = ricci(metric, xp);
        const RicciResult rm = ricci(metric, xm);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out.ricci(m, i, j) = (rp.ricci(i, j) - rm.ricci(i, j)) / (2.0 * h);
        out.scalar(m) = (rp.scalar - rm.scalar) / (2.0 * h);
    }
    return out;
}

Tensor cotton_york(const MetricChart& metric, PointView point) {
    if (metric.dim() != 3) throw DimensionError("Cotton-York tensor is defined for dimension 3 only");
    require_point(metric, point);
    const MetricJet jet = metric.jet(point, 3);
    const Connection c = connection(jet);
    const RicciResult rr = contract(c.gi, riemann_up(c));
    return cotton_from(jet.g, c, rr, ricci_gradient_from(c, rr));
}

Tensor weyl(const MetricChart& metric, PointView point) {
    if (metric.dim() < 4) throw DimensionError("Weyl tensor requires dimension >= 4");
    require_point(metric, point);
    const MetricJet jet = metric.jet(point, 2);
    const Connection c = connection(jet);
    const Tensor rup = riemann_up(c);
    return weyl_from(jet.g, lower_first(jet.g, rup), contract(c.gi, rup));
}

CurvatureBundle curvature(const MetricChart& metric, PointView point) {
    require_point(metric, point);
    const int n = metric.dim();
    const MetricJet jet = metric.jet(point, n == 3 ? 3 : 2);
    const Connection c = connection(jet);
    const Tensor rup = riemann_up(c);
    const RicciResult rr = contract(c.gi, rup);

    CurvatureBundle b;
    b.point.assign(point.begin(), point.end());
    b.metric = jet.g;
    b.christoffel = c.gamma;
    b.riemann_lower = lower_first(jet.g, rup);
    b.ricci = rr.ricci;
    b.scalar = rr.scalar;
    if (n == 3) b.cotton_york = cotton_from(jet.g, c, rr, ricci_gradient_from(c, rr));
    if (n >= 4) b.weyl = weyl_from(jet.g, b.riemann_lower, rr);
    return b;
}

double SymmetryViolations::max() const { return std::max({antisymmetry, pair_symmetry, bianchi, weyl_trace}); }

SymmetryViolations symmetry_violations(const CurvatureBundle& b) {
    const Tensor& r = b.riemann_lower;
    const int n = r.dim();
    SymmetryViolations v;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    v.antisymmetry = std::max({v.antisymmetry, std::abs(r(i, j, k, l) + r(j, i, k, l)),
                                               std::abs(r(i, j, k, l) + r(i, j, l, k))});
                    v.pair_symmetry = std::max(v.pair_symmetry, std::abs(r(i, j, k, l) - r(k, l, i, j)));
                    v.bianchi = std::max(v.bianchi, std::abs(r(i, j, k, l) + r(i, k, l, j) + r(i, l, j, k)));
                }
    if (b.weyl) {
        const Tensor gi = invert_metric(b.metric);
        const Tensor& w = *b.weyl;
        // Trace over each index pair; the remaining two indices are free.
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q)
                for (int e = 0; e < n; ++e)
                    for (int f = 0; f < n; ++f) {
                        double s = 0.0;
                        for (int a = 0; a < n; ++a)
                            for (int c = 0; c < n; ++c) {
                                int idx[4];
                                int free_slot = 0;
                                for (int slot = 0; slot < 4; ++slot) {
                                    if (slot == p) idx[slot] = a;
                                    else if (slot == q) idx[slot] = c;
                                    else idx[slot] = (free_slot++ == 0) ? e : f;
                                }
                                s += gi(a, c) * w(idx[0], idx[1], idx[2], idx[3]);
                            }
                        v.weyl_trace = std::max(v.weyl_trace, std::abs(s));
                    }
    }
    return v;
}

std::string_view to_string(Flatness f) {
    switch (f) {
    case Flatness::Flat:
        return "Flat";
    case Flatness::ConformallyFlat:
        return "ConformallyFlat";
    case Flatness::NotConformallyFlat:
        return "NotConformallyFlat";
    }
    return "unknown";
}

CurvatureReport curvature_report(const MetricChart& metric, std::span<const Point> grid) {
    if (grid.empty()) throw ArgumentError("flatness classification needs a non-empty grid");
    const int n = metric.dim();

    CurvatureReport rep;
    rep.dim = n;
    rep.points.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const CurvatureBundle b = curvature(metric, grid[i]);
        PointCurvature& pc = rep.points[i];
        pc.point = b.point;
        pc.riemann_norm = b.riemann_lower.norm();
        pc.ricci_norm = b.ricci.norm();
        pc.scalar = b.scalar;
        if (b.cotton_york) pc.conformal_norm = b.cotton_york->norm();
        if (b.weyl) pc.conformal_norm = b.weyl->norm();
        pc.symmetry_violation = symmetry_violations(b).max();
        if (pc.symmetry_violation > 1e-8 * (1.0 + pc.riemann_norm)) {
            throw NumericError("curvature identities violated at grid point " + std::to_string(i));
        }
    });

    for (const auto& pc : rep.points) {
        rep.max_riemann = std::max(rep.max_riemann, pc.riemann_norm);
        rep.max_scalar = std::max(rep.max_scalar, std::abs(pc.scalar));
        if (pc.conformal_norm) rep.max_conformal = std::max(rep.max_conformal, *pc.conformal_norm);
    }
    rep.tolerance = 1e-6 * (1.0 + rep.max_riemann);

    if (n == 2) {
        rep.verdict = rep.max_scalar < rep.tolerance ? Flatness::Flat : Flatness::ConformallyFlat;
    } else if (rep.max_riemann < rep.tolerance) {
        rep.verdict = Flatness::Flat;
    } else {
        rep.verdict = rep.max_conformal < rep.tolerance ? Flatness::ConformallyFlat : Flatness::NotConformallyFlat;
    }
    return rep;
}

Flatness classify_flatness(const MetricChart& metric, std::span<const Point> grid) {
    return curvature_report(metric, grid).verdict;
}

nlohmann::json to_json(const CurvatureReport& report) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : report.points) {
        nlohmann::json e{{"point", p.point},
                         {"riemann_norm", p.riemann_norm},
                         {"ricci_norm", p.ricci_norm},
                         {"ricci_scalar", p.scalar},
                         {"symmetry_violation", p.symmetry_violation}};
        if (p.conformal_norm) e[report.dim == 3 ? "cotton_york_norm" : "weyl_norm"] = *p.conformal_norm;
        pts.push_back(std::move(e));
    }
    return {{"dim", report.dim},
            {"verdict", std::string(to_string(report.verdict))},
            {"tolerance", report.tolerance},
            {"max_riemann_norm", report.max_riemann},
            {"max_abs_ricci_scalar", report.max_scalar},
            {"max_conformal_norm", report.max_conformal},
            {"points", pts}};
}

}  // namespace eisenhart
