#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "eisenhart/curvature.hpp"
#include "eisenhart/errors.hpp"
#include "eisenhart/lifts.hpp"
#include "eisenhart/metric.hpp"

using namespace eisenhart;

namespace {

Jet ermakov_jet(double x) { return PotentialSpec::ermakov(1.0).jet(x); }
Jet oscillator_jet(double x) { return PotentialSpec::oscillator(1.0).jet(x); }
Jet quartic_jet(double x) { return PotentialSpec::polynomial({0, 0, 0, 0, 1}).jet(x); }
Jet exp_jet(double x, double rate) {
    const double e = std::exp(rate * x);
    return {e, rate * e, rate * rate * e, rate * rate * rate * e};
}

std::vector<Point> x_grid(int dim, double a, double b, int n) {
    std::vector<Point> grid;
    for (int i = 0; i < n; ++i) {
        Point p(static_cast<std::size_t>(dim), 0.3);
        p[0] = a + (b - a) * i / (n - 1);
        grid.push_back(p);
    }
    return grid;
}

// N^2 = (1 + x^2/10)^2 as a jet.
Jet conformal_factor(double x) {
    const Jet n{1.0 + x * x / 10.0, x / 5.0, 0.2, 0.0};
    return n * n;
}

MetricChart rescaled_flat(int dim) {
    std::vector<int> sig(static_cast<std::size_t>(dim), 1);
    return conformally_rescale(MetricChart::flat(sig), ScalarField::along_axis(dim, 0, conformal_factor));
}

// Independent oracle: Christoffels from central differences of g, Riemann
// from central differences of those, then lowered.
Tensor christoffel_from_components(const MetricChart& m, const Point& p, double h) {
    const int n = m.dim();
    std::vector<Tensor> dg;
    for (int a = 0; a < n; ++a) {
        Point pp = p, pm = p;
        pp[static_cast<std::size_t>(a)] += h;
        pm[static_cast<std::size_t>(a)] -= h;
        Tensor d = m.components(pp) - m.components(pm);
        d *= 0.5 / h;
        dg.push_back(d);
    }
    const Tensor gi = invert_metric(m.components(p));
    Tensor gamma(n, 3);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += gi(k, l) * (dg[static_cast<std::size_t>(i)](l, j) + dg[static_cast<std::size_t>(j)](l, i) -
                                     dg[static_cast<std::size_t>(l)](i, j));
                gamma(k, i, j) = 0.5 * s;
            }
    return gamma;
}

Tensor riemann_oracle(const MetricChart& m, const Point& p) {
    const int n = m.dim();
    const double h = 1e-3;
    const Tensor G = christoffel_from_components(m, p, 1e-5);
    std::vector<Tensor> dG;
    for (int a = 0; a < n; ++a) {
        Point pp = p, pm = p;
        pp[static_cast<std::size_t>(a)] += h;
        pm[static_cast<std::size_t>(a)] -= h;
        Tensor d = christoffel_from_components(m, pp, 1e-5) - christoffel_from_components(m, pm, 1e-5);
        d *= 0.5 / h;
        dG.push_back(d);
    }
    Tensor up(n, 4);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double r = dG[static_cast<std::size_t>(k)](i, j, l) - dG[static_cast<std::size_t>(l)](i, j, k);
                    for (int q = 0; q < n; ++q) r += G(i, k, q) * G(q, j, l) - G(i, l, q) * G(q, j, k);
                    up(i, j, k, l) = r;
                }
    const Tensor g = m.components(p);
    Tensor low(n, 4);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int q = 0; q < n; ++q) s += g(i, q) * up(q, j, k, l);
                    low(i, j, k, l) = s;
                }
    return low;
}

}  // namespace

TEST_CASE("christoffel symbols") {
    const auto flat = MetricChart::flat({1, 1});
    const Point p{0.4, -1.2};
    CHECK(christoffel(flat, p).max_abs() == 0.0);

    const auto polar = riemannian_metric(ermakov_jet, 1.0);
    const Tensor G = christoffel(polar, Point{2.0, 0.0});
    CHECK(G(0, 1, 1) == doctest::Approx(-2.0));
    CHECK(G(1, 0, 1) == doctest::Approx(0.5));
    CHECK(G(1, 1, 0) == doctest::Approx(0.5));

    const auto pp = pp_wave_metric(oscillator_jet);
    CHECK(christoffel(pp, Point{1.0, 0.0, 0.0})(0, 1, 1) == doctest::Approx(1.0));
}

TEST_CASE("singular metric") {
    const auto singular = MetricChart::from_components({"a", "b"}, [](PointView) {
        Tensor g(2, 2);
        g(0, 0) = 1.0;
        g(0, 1) = g(1, 0) = 1.0;
        g(1, 1) = 1.0;
        return g;
    });
    const Point p{0.0, 0.0};
    CHECK_THROWS_AS(christoffel(singular, p), LinearAlgebraError);
    CHECK_THROWS_AS(riemann(singular, p), LinearAlgebraError);
    CHECK_THROWS_AS(ricci(singular, p), LinearAlgebraError);
}

TEST_CASE("scalar curvature of the two-dimensional lift") {
    CHECK(ricci(MetricChart::flat({1, 1, 1}), Point{1, 2, 3}).scalar == 0.0);

    const auto linear = riemannian_metric([](double x) { return Jet{x, 1.0, 0.0, 0.0}; }, 1.0,
                                          [](double x) { return x > 0.0; });
    CHECK(ricci(linear, Point{1.0, 0.0}).scalar == doctest::Approx(-1.5).epsilon(1e-10));

    const auto erm = riemannian_metric(ermakov_jet, 1.0);
    for (double x : {0.4, 1.0, 3.7}) CHECK(std::abs(ricci(erm, Point{x, 0.0}).scalar) < 1e-10);

    // Oracle: dx^2 + w^2 dz^2 has R = -2 w''/w, with w = V^{-1/2}.
    const auto v = [](double x) { return Jet{1.0 + x * x, 2.0 * x, 2.0, 0.0}; };
    const auto m = riemannian_metric(v, 1.0);
    for (double x : {-1.3, 0.0, 0.8, 2.2}) {
        const auto w = [](double s) { return 1.0 / std::sqrt(1.0 + s * s); };
        const double h = 1e-3;
        const double w2 = (w(x + h) - 2.0 * w(x) + w(x - h)) / (h * h);
        const double oracle = -2.0 * w2 / w(x);
        CHECK(ricci(m, Point{x, 0.0}).scalar == doctest::Approx(oracle).epsilon(1e-5));
    }
}

TEST_CASE("riemann against a finite-difference oracle") {
    const auto F1 = [](double x) { return PotentialSpec::ermakov(1.0).jet(x); };
    const auto F2 = [](double x) { return Jet{0.5 * x * x + 0.05 * x * x * x, x + 0.15 * x * x, 1.0 + 0.3 * x, 0.3}; };
    const auto m = mixed_metric(F1, F2, 1.0);
    const Point p{1.3, 0.2, -0.4, 0.7};
    const Tensor r = riemann(m, p);
    const Tensor oracle = riemann_oracle(m, p);
    CHECK(r.max_abs() > 1e-2);
    CHECK((r - oracle).max_abs() < 1e-5 * (1.0 + r.max_abs()));

    const auto quartic = pp_wave_metric(quartic_jet);
    const Point q{1.1, 0.3, 0.0};
    CHECK((riemann(quartic, q) - riemann_oracle(quartic, q)).max_abs() < 1e-4);
}

TEST_CASE("cotton-york tensor") {
    const Point p{1.0, 0.0, 0.0};
    CHECK(cotton_york(MetricChart::flat({1, 1, -1}), p).max_abs() == 0.0);
    CHECK(cotton_york(pp_wave_metric(oscillator_jet), p).norm() < 1e-6);
    CHECK(cotton_york(pp_wave_metric(quartic_jet), p).norm() > 1e-3);
    CHECK(cotton_york(rescaled_flat(3), Point{0.9, 0.1, 0.2}).norm() < 1e-10);
    CHECK_THROWS_AS(cotton_york(MetricChart::flat({1, 1}), Point{0.0, 0.0}), DimensionError);
    CHECK_THROWS_AS(cotton_york(MetricChart::flat({1, 1, 1, -1}), Point{0, 0, 0, 0}), DimensionError);
}

TEST_CASE("weyl tensor") {
    CHECK(weyl(MetricChart::flat({1, 1, 1, -1}), Point{0, 0, 0, 0}).max_abs() == 0.0);

    const auto F2 = [](double x) { return PotentialSpec::oscillator(1.0).jet(x); };
    const auto mixed = mixed_metric(ermakov_jet, F2, 1.0);
    CHECK(weyl(mixed, Point{1.3, 0.0, 0.0, 0.0}).norm() < 1e-6);

    const auto V1 = [](double x) { return exp_jet(x, 1.0) + exp_jet(x, 2.0); };
    const auto V2 = [](double x) { return exp_jet(x, 1.0); };
    const auto cm = conformal_mixed_metric([](double) { return jet_constant(1.0); }, V1, V2, 1.0);
    CHECK(weyl(cm, Point{0.7, 0.0, 0.0, 0.0}).norm() < 1e-6);

    CHECK(weyl(rescaled_flat(4), Point{1.4, 0.1, 0.2, 0.3}).norm() < 1e-10);
    CHECK_THROWS_AS(weyl(MetricChart::flat({1, 1, 1}), Point{0, 0, 0}), DimensionError);
}

TEST_CASE("curvature bundles satisfy the algebraic identities") {
    const auto F2 = [](double x) { return Jet{0.5 * x * x + 0.05 * x * x * x, x + 0.15 * x * x, 1.0 + 0.3 * x, 0.3}; };
    const auto m = mixed_metric(ermakov_jet, F2, 1.0);
    const auto b = curvature(m, Point{1.2, 0.0, 0.0, 0.0});
    CHECK(b.weyl.has_value());
    CHECK_FALSE(b.cotton_york.has_value());
    CHECK(symmetry_violations(b).max() < 1e-12 * (1.0 + b.riemann_lower.max_abs()));

    const auto b3 = curvature(pp_wave_metric(quartic_jet), Point{0.8, 0.0, 0.0});
    CHECK(b3.cotton_york.has_value());
    CHECK(symmetry_violations(b3).max() < 1e-12 * (1.0 + b3.riemann_lower.max_abs()));
}

TEST_CASE("analytic gradients match finite differences") {
    const auto F2 = [](double x) { return Jet{0.5 * x * x + 0.05 * x * x * x, x + 0.15 * x * x, 1.0 + 0.3 * x, 0.3}; };
    const std::vector<MetricChart> charts{
        riemannian_metric([](double x) { return Jet{1.0 + x * x, 2.0 * x, 2.0, 0.0}; }, 1.0),
        pp_wave_metric(quartic_jet),
        mixed_metric(ermakov_jet, F2, 1.0),
        rescaled_flat(3),
    };
    for (const auto& m : charts) {
        Point p(static_cast<std::size_t>(m.dim()), 0.2);
        p[0] = 1.1;
        const Tensor a = christoffel_gradient(m, p);
        const Tensor f = christoffel_gradient_fd(m, p);
        CHECK((a - f).max_abs() < 1e-4 * (1.0 + a.max_abs()));

        const auto ra = ricci_gradient(m, p);
        const auto rf = ricci_gradient_fd(m, p);
        CHECK((ra.ricci - rf.ricci).max_abs() < 1e-4 * (1.0 + ra.ricci.max_abs()));
        CHECK((ra.scalar - rf.scalar).max_abs() < 1e-4 * (1.0 + ra.scalar.max_abs()));
    }
}

TEST_CASE("flatness classification") {
    CHECK(classify_flatness(riemannian_metric(ermakov_jet, 1.0), x_grid(2, 0.5, 3.0, 50)) == Flatness::Flat);
    CHECK(classify_flatness(pp_wave_metric(oscillator_jet), x_grid(3, -2.0, 2.0, 41)) == Flatness::ConformallyFlat);
    CHECK(classify_flatness(pp_wave_metric(quartic_jet), x_grid(3, -2.0, 2.0, 41)) == Flatness::NotConformallyFlat);
    CHECK(classify_flatness(rescaled_flat(3), x_grid(3, -2.0, 2.0, 21)) == Flatness::ConformallyFlat);
    CHECK(classify_flatness(rescaled_flat(4), x_grid(4, -2.0, 2.0, 21)) == Flatness::ConformallyFlat);
    CHECK(classify_flatness(MetricChart::flat({1, 1, 1, -1}), x_grid(4, -1.0, 1.0, 5)) == Flatness::Flat);
    CHECK(classify_flatness(riemannian_metric([](double x) { return Jet{1.0 + x * x, 2.0 * x, 2.0, 0.0}; }, 1.0),
                            x_grid(2, -1.0, 1.0, 11)) == Flatness::ConformallyFlat);

    const std::vector<Point> empty;
    CHECK_THROWS_AS(classify_flatness(MetricChart::flat({1, 1}), empty), ArgumentError);
}

TEST_CASE("curvature reports are invariant under grid permutation") {
    const auto m = pp_wave_metric(quartic_jet);
    auto grid = x_grid(3, -2.0, 2.0, 30);
    const auto ref = curvature_report(m, grid);
    std::mt19937_64 rng(7);
    std::shuffle(grid.begin(), grid.end(), rng);
    const auto shuffled = curvature_report(m, grid);
    CHECK(shuffled.verdict == ref.verdict);
    CHECK(std::abs(shuffled.max_riemann - ref.max_riemann) < 1e-8);
    CHECK(std::abs(shuffled.max_conformal - ref.max_conformal) < 1e-8);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto it = std::find_if(ref.points.begin(), ref.points.end(),
                                     [&](const PointCurvature& pc) { return pc.point == grid[i]; });
        REQUIRE(it != ref.points.end());
        CHECK(std::abs(shuffled.points[i].riemann_norm - it->riemann_norm) < 1e-8);
    }
    const auto j = to_json(ref);
    CHECK(j.at("verdict") == "NotConformallyFlat");
}
