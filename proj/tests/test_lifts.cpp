#include <doctest.h>

#include <cmath>
#include <vector>

#include "eisenhart/curvature.hpp"
#include "eisenhart/dynamics.hpp"
#include "eisenhart/errors.hpp"
#include "eisenhart/lifts.hpp"

using namespace eisenhart;

namespace {

Jet exp_jet(double x, double rate) {
    const double e = std::exp(rate * x);
    return {e, rate * e, rate * rate * e, rate * rate * rate * e};
}

std::vector<Point> x_grid(int dim, double a, double b, int n) {
    std::vector<Point> grid;
    for (int i = 0; i < n; ++i) {
        Point p(static_cast<std::size_t>(dim), 0.0);
        p[0] = a + (b - a) * i / (n - 1);
        grid.push_back(p);
    }
    return grid;
}

}  // namespace

TEST_CASE("riemannian lift of the Ermakov potential") {
    const auto sys = build_lift(LiftKind::Riemannian11, PotentialSpec::ermakov(1.0), 2.0, 0.5);
    CHECK(sys.coords() == std::vector<std::string>{"x", "z"});
    CHECK(sys.recovery().fixed_momenta.at("z") == doctest::Approx(1.0));
    CHECK(sys.recovery().hamiltonian_level == doctest::Approx(0.5));
    CHECK_FALSE(sys.recovery().null);
    for (double x : {0.5, 1.0, 2.0}) {
        const Tensor g = sys.metric().components(Point{x, 0.0});
        CHECK(g(0, 0) == doctest::Approx(1.0));
        CHECK(g(1, 1) == doctest::Approx(x * x / 2.0));
        CHECK(g(0, 1) == 0.0);
    }
    CHECK(sys.cyclic_coordinates() == std::vector<int>{1});
}

TEST_CASE("lorentzian lift of the oscillator") {
    const auto sys = build_lift(LiftKind::Lorentzian12, PotentialSpec::oscillator(1.0), 1.0, 0.5);
    CHECK(sys.coords() == std::vector<std::string>{"x", "u", "v"});
    CHECK(sys.recovery().fixed_momenta.at("u") == doctest::Approx(-0.5));
    CHECK(sys.recovery().fixed_momenta.at("v") == doctest::Approx(1.0));
    CHECK(sys.recovery().hamiltonian_level == 0.0);
    CHECK(sys.recovery().null);
    const Tensor g = sys.metric().components(Point{1.5, 0.0, 0.0});
    CHECK(g(1, 1) == doctest::Approx(-1.5 * 1.5));
    CHECK(g(1, 2) == doctest::Approx(1.0));
}

TEST_CASE("conformal mixed lift of the Morse potential") {
    const auto morse = PotentialSpec::morse(1.0, 1.0, 1.0);
    const auto sys = build_lift(LiftKind::ConformalMixed13, morse, -1.0, 2.0);
    CHECK(std::abs(sys.recovery().fixed_momenta.at("z")) == doctest::Approx(2.0));
    CHECK(sys.recovery().hamiltonian_level == 0.0);
    CHECK_THROWS_AS(build_lift(LiftKind::ConformalMixed13, morse, 1.0, 2.0), ConstructionError);
}

TEST_CASE("lift construction errors") {
    CHECK_THROWS_AS(build_lift(LiftKind::Riemannian11, PotentialSpec::ermakov(1.0), -1.0, 0.5), ConstructionError);
    LiftOptions opts;
    opts.check_domain = std::pair{-1.0, 1.0};
    CHECK_THROWS_AS(build_lift(LiftKind::Riemannian11, PotentialSpec::oscillator(1.0), 1.0, 0.5, opts),
                    ConstructionError);
    CHECK_THROWS_AS(build_lift(LiftKind::Mixed13, PotentialSpec::oscillator(1.0), 1.0, 0.5), ArgumentError);
    CHECK_THROWS_AS(build_lift(LiftKind::ConformalMixed13, PotentialSpec::ermakov(1.0), 1.0, 0.5), ArgumentError);
    CHECK_THROWS_AS(build_lift(LiftKind::Mixed13, PotentialSpec::ermakov_oscillator(0.5, 1.0), -1.0, 0.5),
                    ConstructionError);
    CHECK_THROWS_AS(lift_kind_from_string("kaluza_klein"), ArgumentError);
    CHECK(lift_kind_from_string(to_string(LiftKind::Mixed13)) == LiftKind::Mixed13);
}

TEST_CASE("lifted hamiltonian values") {
    const auto r11 = build_lift(LiftKind::Riemannian11, PotentialSpec::ermakov(1.0), 2.0, 0.5);
    const std::vector<double> q{1.0, 0.0}, p{0.0, 1.0};
    CHECK(lifted_hamiltonian(r11, q, p) == doctest::Approx(1.0));

    const auto l12 = build_lift(LiftKind::Lorentzian12, PotentialSpec::oscillator(1.0), 1.0, 0.5);
    const std::vector<double> q3{2.0, 0.0, 0.0}, p3{1.0, 0.0, 1.0};
    CHECK(lifted_hamiltonian(l12, q3, p3) == doctest::Approx(2.5));

    const auto m13 = build_lift(LiftKind::Mixed13, PotentialSpec::ermakov_oscillator(0.5, 1.0), 1.0, 1.0);
    for (const LiftedSystem* s : {&r11, &l12, &m13}) {
        const std::vector<double> zq(s->coords().size(), 1.0), zp(s->coords().size(), 0.0);
        CHECK(lifted_hamiltonian(*s, zq, zp) == 0.0);
    }
    CHECK_THROWS_AS(lifted_hamiltonian(r11, q3, p3), ArgumentError);
    CHECK_THROWS_AS(lifted_hamiltonian(r11, q, p3), ArgumentError);
}

TEST_CASE("recovered potential") {
    const auto eo = PotentialSpec::ermakov_oscillator(0.5, 1.0);
    const std::vector<LiftedSystem> systems{
        build_lift(LiftKind::Riemannian11, PotentialSpec::ermakov(0.5), 1.0, 1.0),
        build_lift(LiftKind::Lorentzian12, PotentialSpec::oscillator(2.0, 0.0, 0.3), 1.0, 1.0),
        build_lift(LiftKind::Mixed13, eo, 1.0, 1.3),
        build_lift(LiftKind::ConformalMixed13, PotentialSpec::morse(1.0, 1.0, 1.0), -1.0, 2.0),
    };
    for (const auto& s : systems) {
        CAPTURE(to_string(s.kind()));
        for (double x : {0.6, 1.2, 2.0}) {
            CHECK(s.recovered_potential(x) == doctest::Approx(s.potential().eval(x)).epsilon(1e-12));
        }
        const auto p = s.recovery_momenta(0.4);
        CHECK(p.size() == s.coords().size());
        CHECK(p[0] == 0.4);
    }
}

TEST_CASE("flatness residuals") {
    const std::vector<JetFunction> erm{[](double x) { return PotentialSpec::ermakov(1.0).jet(x); }};
    const auto r = flatness_residual(LiftKind::Riemannian11, erm, 1.7);
    REQUIRE(r.values.size() == 1);
    CHECK(std::abs(r.values[0]) < 1e-12 * r.scales[0]);

    const std::vector<JetFunction> osc{[](double x) { return PotentialSpec::oscillator(1.3, 0.0, 0.7).jet(x); }};
    CHECK(flatness_residual(LiftKind::Lorentzian12, osc, 0.9).values == std::vector<double>{0.0});

    const std::vector<JetFunction> morse{[](double x) { return exp_jet(x, 1.0) + exp_jet(x, 2.0); },
                                         [](double x) { return exp_jet(x, 1.0); }};
    const auto rm = flatness_residual(LiftKind::ConformalMixed13, morse, 0.3);
    REQUIRE(rm.values.size() == 2);
    CHECK(rm.max_relative() < 1e-14);

    const std::vector<JetFunction> eo{[](double x) { return PotentialSpec::ermakov(1.0).jet(x); },
                                      [](double x) { return PotentialSpec::oscillator(1.0).jet(x); }};
    CHECK(flatness_residual(LiftKind::Mixed13, eo, 1.3).max_relative() < 1e-14);

    const std::vector<JetFunction> quartic{[](double x) { return PotentialSpec::polynomial({0, 0, 0, 0, 1}).jet(x); }};
    CHECK(flatness_residual(LiftKind::Lorentzian12, quartic, 1.0).values[0] == doctest::Approx(24.0));

    CHECK_THROWS_AS(flatness_residual(LiftKind::Riemannian11, erm, -1.0), DomainError);
    CHECK(ResidualVector{}.max_relative() == 0.0);
}

TEST_CASE("residuals agree with the curvature verdict") {
    struct Case {
        LiftKind kind;
        PotentialSpec potential;
        double alpha;
        double energy;
        double a, b;
    };
    const std::vector<Case> cases{
        {LiftKind::Riemannian11, PotentialSpec::ermakov(1.0), 1.0, 1.0, 0.5, 3.0},
        {LiftKind::Riemannian11, PotentialSpec::exponential(1.0, 1.0), 1.0, 1.0, -1.0, 1.0},
        {LiftKind::Lorentzian12, PotentialSpec::oscillator(1.0, 0.0, 0.2), 1.0, 1.0, -2.0, 2.0},
        {LiftKind::Lorentzian12, PotentialSpec::polynomial({0, 0, 0, 0, 1}), 1.0, 1.0, -2.0, 2.0},
        {LiftKind::Lorentzian12, PotentialSpec::morse(1.0, 1.0, 1.0), 1.0, 1.0, -1.0, 1.0},
        {LiftKind::Mixed13, PotentialSpec::ermakov_oscillator(0.5, 1.0), 1.0, 2.0, 0.5, 3.0},
        {LiftKind::ConformalMixed13, PotentialSpec::morse(1.0, 1.0, 1.0), -1.0, 2.0, -1.0, 1.0},
    };
    for (const auto& c : cases) {
        CAPTURE(to_string(c.kind));
        CAPTURE(c.potential.name());
        const auto sys = build_lift(c.kind, c.potential, c.alpha, c.energy);
        const auto grid = x_grid(static_cast<int>(sys.coords().size()), c.a, c.b, 25);
        double worst = 0.0;
        for (const auto& p : grid) worst = std::max(worst, flatness_residual(sys, p[0]).max_relative());
        const bool residual_zero = worst < 1e-10;
        const Flatness verdict = classify_flatness(sys.metric(), grid);
        const bool geometric = sys.coords().size() == 2 ? verdict == Flatness::Flat : verdict != Flatness::NotConformallyFlat;
        CHECK(residual_zero == geometric);
    }
}

TEST_CASE("lifted hamiltonian along the Newton flow equals the level") {
    const auto eo = PotentialSpec::ermakov_oscillator(0.5, 1.0);
    struct Case {
        LiftKind kind;
        PotentialSpec potential;
        double alpha;
    };
    const std::vector<Case> cases{
        {LiftKind::Riemannian11, PotentialSpec::ermakov(0.5), 1.0},
        {LiftKind::Lorentzian12, PotentialSpec::oscillator(1.0), 1.0},
        {LiftKind::Mixed13, eo, 1.0},
        {LiftKind::ConformalMixed13, PotentialSpec::morse(1.0, 1.0, 1.0), -1.0},
    };
    IntegratorConfig cfg;
    cfg.abs_tol = cfg.rel_tol = 1e-12;
    for (const auto& c : cases) {
        const double x0 = 1.2, v0 = 0.1;
        const double h = 0.5 * v0 * v0 + c.potential.eval(x0);
        const auto sys = build_lift(c.kind, c.potential, c.alpha, h);
        const auto newton = newton_flow(c.potential, x0, v0, {0.0, 2.0}, cfg);
        for (const auto& s : newton.samples) {
            std::vector<double> q(sys.coords().size(), 0.0);
            q[0] = s.q[0];
            const auto p = sys.recovery_momenta(s.p[0]);
            CHECK(lifted_hamiltonian(sys, q, p) ==
                  doctest::Approx(sys.recovery().hamiltonian_level).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("lift json") {
    const auto sys = build_lift(LiftKind::Lorentzian12, PotentialSpec::oscillator(1.0), 1.0, 0.5);
    const auto j = sys.to_json();
    CHECK(j.at("lift") == "lorentzian12");
    CHECK(j.at("coords").size() == 3);
}
