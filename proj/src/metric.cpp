#include "eisenhart/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "eisenhart/errors.hpp"

namespace eisenhart {

namespace {

Eigen::MatrixXd to_matrix(const Tensor& g) {
    const int n = g.dim();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g(i, j);
    return m;
}

void check_order(int order) {
    if (order < 0 || order > 3) throw ArgumentError("jet order must be in 0..3");
}

}  // namespace

MetricJet MetricJet::zero(int dim, int order) {
    check_order(order);
    MetricJet j;
    j.order = order;
    j.g = Tensor(dim, 2);
    if (order >= 1) j.dg = Tensor(dim, 3);
    if (order >= 2) j.ddg = Tensor(dim, 4);
    if (order >= 3) j.dddg = Tensor(dim, 5);
    return j;
}

ScalarJet ScalarJet::zero(int dim, int order) {
    check_order(order);
    ScalarJet j;
    j.order = order;
    if (order >= 1) j.grad = Tensor(dim, 1);
    if (order >= 2) j.hess = Tensor(dim, 2);
    if (order >= 3) j.third = Tensor(dim, 3);
    return j;
}

ScalarField::ScalarField(int dim, Provider provider, std::vector<bool> depends_on)
    : dim_(dim), provider_(std::move(provider)), depends_on_(std::move(depends_on)) {
    if (depends_on_.empty()) depends_on_.assign(static_cast<std::size_t>(dim), true);
    if (static_cast<int>(depends_on_.size()) != dim) throw DimensionError("depends_on size mismatch");
}

ScalarField ScalarField::along_axis(int dim, int axis, JetFunction f) {
    if (axis < 0 || axis >= dim) throw ArgumentError("axis out of range");
    std::vector<bool> deps(static_cast<std::size_t>(dim), false);
    deps[static_cast<std::size_t>(axis)] = true;
    auto provider = [dim, axis, f = std::move(f)](PointView p, int order) {
        ScalarJet s = ScalarJet::zero(dim, order);
        const Jet v = f(p[static_cast<std::size_t>(axis)]);
        s.value = v[0];
        if (order >= 1) s.grad(axis) = v[1];
        if (order >= 2) s.hess(axis, axis) = v[2];
        if (order >= 3) s.third(axis, axis, axis) = v[3];
        return s;
    };
    return ScalarField(dim, std::move(provider), std::move(deps));
}

ScalarField ScalarField::constant(int dim, double c) {
    auto provider = [dim, c](PointView, int order) {
        ScalarJet s = ScalarJet::zero(dim, order);
        s.value = c;
        return s;
    };
    return ScalarField(dim, std::move(provider), std::vector<bool>(static_cast<std::size_t>(dim), false));
}

MetricChart::MetricChart(std::vector<std::string> labels, JetProvider jet, Guard guard,
                         std::vector<bool> depends_on)
    : labels_(std::move(labels)), jet_(std::move(jet)), guard_(std::move(guard)),
      depends_on_(std::move(depends_on)) {
    if (labels_.size() < 2) throw DimensionError("metric charts need dimension >= 2");
    if (!jet_) throw ArgumentError("metric chart needs a jet provider");
    if (depends_on_.empty()) depends_on_.assign(labels_.size(), true);
    if (depends_on_.size() != labels_.size()) throw DimensionError("depends_on size mismatch");
}

MetricChart MetricChart::along_axis(std::vector<std::string> labels, int axis,
                                    std::vector<AxisComponent> components, Guard guard) {
    const int n = static_cast<int>(labels.size());
    if (axis < 0 || axis >= n) throw ArgumentError("axis out of range");
    for (const auto& c : components) {
        if (c.i < 0 || c.j < 0 || c.i >= n || c.j >= n) throw ArgumentError("component index out of range");
        if (!c.f) throw ArgumentError("component needs a callable");
    }
    std::vector<bool> deps(static_cast<std::size_t>(n), false);
    deps[static_cast<std::size_t>(axis)] = true;

    auto provider = [n, axis, components = std::move(components)](PointView p, int order) {
        MetricJet j = MetricJet::zero(n, order);
        const double s = p[static_cast<std::size_t>(axis)];
        for (const auto& c : components) {
            const Jet v = c.f(s);
            for (const auto& [a, b] : {std::pair{c.i, c.j}, std::pair{c.j, c.i}}) {
                j.g(a, b) = v[0];
                if (order >= 1) j.dg(axis, a, b) = v[1];
                if (order >= 2) j.ddg(axis, axis, a, b) = v[2];
                if (order >= 3) j.dddg(axis, axis, axis, a, b) = v[3];
            }
        }
        return j;
    };
    return MetricChart(std::move(labels), std::move(provider), std::move(guard), std::move(deps));
}

MetricChart MetricChart::from_components(std::vector<std::string> labels,
                                         std::function<Tensor(PointView)> components, Guard guard,
                                         double step) {
    const int n = static_cast<int>(labels.size());
    if (!(step > 0.0)) throw ArgumentError("finite-difference step must be positive");
    auto provider = [n, components = std::move(components), step](PointView p, int order) {
        MetricJet j = MetricJet::zero(n, order);
        j.g = components(p);
        // Nested central differences along the multi-index `axes`.
        std::function<Tensor(Point, std::span<const int>)> diff = [&](Point x, std::span<const int> axes) {
            if (axes.empty()) return components(x);
            const auto a = static_cast<std::size_t>(axes.front());
            Point xp = x, xm = x;
            xp[a] += step;
            xm[a] -= step;
            Tensor out = diff(xp, axes.subspan(1)) - diff(xm, axes.subspan(1));
            out *= 0.5 / step;
            return out;
        };
        const Point base(p.begin(), p.end());
        std::vector<int> idx;
        const auto fill = [&](Tensor& target, int depth) {
            idx.assign(static_cast<std::size_t>(depth), 0);
            while (true) {
                const Tensor d = diff(base, idx);
                for (int i = 0; i < n; ++i)
                    for (int k = 0; k < n; ++k) {
                        if (depth == 1) target(idx[0], i, k) = d(i, k);
                        if (depth == 2) target(idx[0], idx[1], i, k) = d(i, k);
                        if (depth == 3) target(idx[0], idx[1], idx[2], i, k) = d(i, k);
                    }
                int pos = depth - 1;
                while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == n) idx[static_cast<std::size_t>(pos--)] = 0;
                if (pos < 0) break;
            }
        };
        if (order >= 1) fill(j.dg, 1);
        if (order >= 2) fill(j.ddg, 2);
        if (order >= 3) fill(j.dddg, 3);
        return j;
    };
    return MetricChart(std::move(labels), std::move(provider), std::move(guard));
}

MetricChart MetricChart::flat(const std::vector<int>& signature, std::vector<std::string> labels) {
    const int n = static_cast<int>(signature.size());
    if (labels.empty()) {
        for (int i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i));
    }
    if (static_cast<int>(labels.size()) != n) throw DimensionError("label count must match signature");
    auto provider = [n, signature](PointView, int order) {
        MetricJet j = MetricJet::zero(n, order);
        for (int i = 0; i < n; ++i) j.g(i, i) = signature[static_cast<std::size_t>(i)];
        return j;
    };
    return MetricChart(std::move(labels), std::move(provider), {},
                       std::vector<bool>(static_cast<std::size_t>(n), false));
}

int MetricChart::index_of(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw ArgumentError("unknown coordinate label '" + label + "'");
    return static_cast<int>(it - labels_.begin());
}

bool MetricChart::admissible(PointView p) const {
    if (static_cast<int>(p.size()) != dim()) return false;
    for (double v : p) {
        if (!std::isfinite(v)) return false;
    }
    return !guard_ || guard_(p);
}

MetricJet MetricChart::jet(PointView p, int order) const {
    check_order(order);
    if (static_cast<int>(p.size()) != dim()) throw DimensionError("point dimension does not match chart");
    if (!admissible(p)) {
        std::ostringstream os;
        os << "point (";
        for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
        os << ") is outside the chart domain";
        throw DomainError(os.str());
    }
    return jet_(p, order);
}

std::vector<int> MetricChart::signature(PointView p) const {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_matrix(components(p)));
    std::vector<int> sig;
    for (int i = 0; i < dim(); ++i) sig.push_back(es.eigenvalues()(i) < 0.0 ? -1 : 1);
    return sig;
}

double MetricChart::hamiltonian(PointView q, PointView momenta) const {
    if (static_cast<int>(momenta.size()) != dim()) throw DimensionError("momentum dimension does not match chart");
    const Tensor gi = invert_metric(components(q));
    double h = 0.0;
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j) h += gi(i, j) * momenta[static_cast<std::size_t>(i)] * momenta[static_cast<std::size_t>(j)];
    return 0.5 * h;
}

Tensor invert_metric(const Tensor& g) {
    const int n = g.dim();
    const Eigen::MatrixXd m = to_matrix(g);
    if (!m.allFinite()) throw LinearAlgebraError("metric has non-finite components");
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) throw LinearAlgebraError("metric is singular");
    const Eigen::MatrixXd inv = lu.inverse();
    Tensor out(n, 2);
    // Symmetrize to remove round-off asymmetry.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = 0.5 * (inv(i, j) + inv(j, i));
    return out;
}

MetricChart conformally_rescale(const MetricChart& metric, const ScalarField& factor) {
    const int n = metric.dim();
    if (factor.dim() != n) throw DimensionError("conformal factor dimension does not match chart");
    std::vector<bool> deps(static_cast<std::size_t>(n));
    for (std::size_t a = 0; a < deps.size(); ++a) deps[a] = metric.depends_on()[a] || factor.depends_on()[a];

    auto provider = [metric, factor, n](PointView p, int order) {
        const MetricJet b = metric.jet(p, order);
        const ScalarJet w = factor.jet(p, order);
        MetricJet j = MetricJet::zero(n, order);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                j.g(i, k) = w.value * b.g(i, k);
                for (int a = 0; a < n && order >= 1; ++a) {
                    j.dg(a, i, k) = w.grad(a) * b.g(i, k) + w.value * b.dg(a, i, k);
                    for (int c = 0; c < n && order >= 2; ++c) {
                        j.ddg(a, c, i, k) = w.hess(a, c) * b.g(i, k) + w.grad(a) * b.dg(c, i, k) +
                                            w.grad(c) * b.dg(a, i, k) + w.value * b.ddg(a, c, i, k);
                        for (int e = 0; e < n && order >= 3; ++e) {
                            j.dddg(a, c, e, i, k) =
                                w.third(a, c, e) * b.g(i, k) + w.hess(a, c) * b.dg(e, i, k) +
                                w.hess(a, e) * b.dg(c, i, k) + w.hess(c, e) * b.dg(a, i, k) +
                                w.grad(a) * b.ddg(c, e, i, k) + w.grad(c) * b.ddg(a, e, i, k) +
                                w.grad(e) * b.ddg(a, c, i, k) + w.value * b.dddg(a, c, e, i, k);
                        }
                    }
                }
            }
        return j;
    };
    auto guard = [metric, factor](PointView p) { return metric.admissible(p) && factor(p) > 0.0; };
    return MetricChart(metric.labels(), std::move(provider), std::move(guard), std::move(deps));
}

}  // namespace eisenhart
