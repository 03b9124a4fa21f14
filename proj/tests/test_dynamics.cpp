#include <doctest.h>

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "eisenhart/dynamics.hpp"
#include "eisenhart/errors.hpp"
#include "eisenhart/lifts.hpp"

using namespace eisenhart;

namespace {

IntegratorConfig tight() {
    IntegratorConfig cfg;
    cfg.abs_tol = cfg.rel_tol = 1e-12;
    return cfg;
}

IntegratorConfig rk4(double step) {
    IntegratorConfig cfg;
    cfg.method = Method::RK4Fixed;
    cfg.step = step;
    return cfg;
}

double final_x(const Trajectory& t) { return t.samples.back().q[0]; }

}  // namespace

TEST_CASE("newton flow closed forms") {
    const double pi = std::numbers::pi;
    const auto osc = newton_flow(PotentialSpec::oscillator(1.0), 1.0, 0.0, {0.0, pi}, tight());
    CHECK(osc.samples.back().t == pi);
    CHECK(std::abs(final_x(osc) + 1.0) < 1e-8);

    const auto erm = newton_flow(PotentialSpec::ermakov(0.5), 1.0, 0.0, {0.0, 1.0}, tight());
    CHECK(std::abs(final_x(erm) - std::sqrt(2.0)) < 1e-8);
    for (const auto& s : erm.samples) CHECK(std::abs(s.q[0] - std::sqrt(1.0 + s.t * s.t)) < 1e-8);

    const auto free = newton_flow(PotentialSpec::linear(0.0, 0.0), 0.0, 1.0, {0.0, 5.0}, rk4(1e-2));
    CHECK(final_x(free) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(free.meta.uniform);
    CHECK(free.coord_labels == std::vector<std::string>{"x"});
    CHECK(free.momentum_labels == std::vector<std::string>{"p_x"});
}

TEST_CASE("rk4 is fourth order") {
    const auto osc = PotentialSpec::oscillator(1.0);
    const auto err = [&](double h) { return std::abs(final_x(newton_flow(osc, 1.0, 0.0, {0.0, 2.0}, rk4(h))) - std::cos(2.0)); };
    const double ratio = err(0.1) / err(0.05);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("geodesic flows reproduce the Newton flow") {
    // Effective force 1/2 alpha p_z^2 V0 * 2/x^3 = 2/x^3, so x = sqrt(1 + 2 t^2).
    const auto r11 = build_lift(LiftKind::Riemannian11, PotentialSpec::ermakov(1.0), 2.0, 1.0);
    const auto t1 = geodesic_flow(r11, {{1.0, 0.0}, {0.0, 1.0}, 0.0}, {0.0, 1.0}, tight());
    CHECK(std::abs(final_x(t1) - std::sqrt(3.0)) < 1e-6);
    for (const auto& s : t1.samples) CHECK(std::abs(s.q[0] - std::sqrt(1.0 + 2.0 * s.t * s.t)) < 1e-6);

    const auto l12 = build_lift(LiftKind::Lorentzian12, PotentialSpec::oscillator(1.0), 1.0, 0.5);
    const auto t2 = geodesic_flow(l12, {{1.0, 0.0, 0.0}, l12.recovery_momenta(0.0), 0.0}, {0.0, std::numbers::pi},
                                  tight());
    CHECK(std::abs(final_x(t2) + 1.0) < 1e-6);
    // du/dt = p_v = 1.
    CHECK(t2.samples.back().q[1] == doctest::Approx(std::numbers::pi).epsilon(1e-12));
    CHECK(t2.meta.max_energy_drift < 1e-10);
    CHECK(t2.meta.max_cyclic_drift < 1e-12);
}

TEST_CASE("zero momenta give a constant trajectory") {
    const auto sys = build_lift(LiftKind::Mixed13, PotentialSpec::ermakov_oscillator(0.5, 1.0), 1.0, 1.0);
    const auto traj = geodesic_flow(sys.metric(), {{1.3, 0.2, 0.4, -0.1}, {0.0, 0.0, 0.0, 0.0}, 0.0}, {0.0, 3.0},
                                    tight());
    for (const auto& s : traj.samples) {
        CHECK(s.q == std::vector<double>{1.3, 0.2, 0.4, -0.1});
        CHECK(s.p == std::vector<double>{0.0, 0.0, 0.0, 0.0});
    }
    CHECK(drift_report(traj, sys) == 0.0);
    const auto proj = project(traj, {"x", "p_x"});
    for (const auto& s : proj.samples) CHECK(s.q == std::vector<double>{1.3});
}

TEST_CASE("projection") {
    const auto sys = build_lift(LiftKind::Lorentzian12, PotentialSpec::oscillator(1.0), 1.0, 0.5);
    const auto traj = geodesic_flow(sys, {{1.0, 0.0, 0.0}, sys.recovery_momenta(0.0), 0.0}, {0.0, 2.0}, tight());
    const auto once = project(traj, {"x", "p_x"});
    CHECK(once.size() == traj.size());
    CHECK(once.coord_labels == std::vector<std::string>{"x"});
    CHECK(once.momentum_labels == std::vector<std::string>{"p_x"});
    const auto twice = project(once, {"x", "p_x"});
    CHECK(twice.column("x") == once.column("x"));
    CHECK(twice.column("p_x") == once.column("p_x"));
    CHECK(once.column("x") == traj.column("x"));
    CHECK_THROWS_AS(project(traj, {"w"}), ArgumentError);
    CHECK_THROWS_AS(traj.column("w"), ArgumentError);
}

TEST_CASE("reparametrization") {
    const auto traj = newton_flow(PotentialSpec::oscillator(1.0), 1.0, 0.0, {0.0, 2.0}, rk4(1e-2));
    const auto same = reparametrize(traj, [](PointView) { return 1.0; });
    CHECK(same.parameter == ParameterLabel::tau);
    CHECK(same.parameters() == traj.parameters());

    const auto doubled = reparametrize(traj, [](PointView) { return 2.0; });
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(doubled.samples[i].t == 2.0 * traj.samples[i].t);
        CHECK(doubled.samples[i].p[0] == traj.samples[i].p[0] / 2.0);
    }
    CHECK_THROWS_AS(reparametrize(traj, [](PointView q) { return q[0]; }), ReparametrizationError);
}

TEST_CASE("energy drift") {
    const auto free = newton_flow(PotentialSpec::linear(0.0, 0.0), 0.0, 1.0, {0.0, 5.0}, rk4(1e-2));
    CHECK(drift_report(free, PotentialSpec::linear(0.0, 0.0)) < 1e-12);

    IntegratorConfig cfg;
    const auto osc = newton_flow(PotentialSpec::oscillator(1.0), 1.0, 0.0, {0.0, 100.0}, cfg);
    CHECK(drift_report(osc, PotentialSpec::oscillator(1.0)) < 1e-8);
    CHECK(osc.meta.max_energy_drift == drift_report(osc, PotentialSpec::oscillator(1.0)));
}

TEST_CASE("extended initial data does not change the projection") {
    const auto sys = build_lift(LiftKind::Riemannian11, PotentialSpec::ermakov(0.5), 1.0, 1.0);
    const auto p0 = sys.recovery_momenta(0.3);
    const auto a = geodesic_flow(sys, {{1.0, 0.0}, p0, 0.0}, {0.0, 5.0}, tight());
    const auto b = geodesic_flow(sys, {{1.0, 4.2}, p0, 0.0}, {0.0, 5.0}, tight());
    CHECK(a.column("x") == b.column("x"));
    CHECK(a.column("t") == b.column("t"));
}

TEST_CASE("domain exit truncates") {
    // Attractive inverse square: x = sqrt(1 - t^2) reaches the singularity at t = 1.
    const auto traj = newton_flow(PotentialSpec::ermakov(-0.5), 1.0, 0.0, {0.0, 3.0}, tight());
    CHECK(traj.meta.exited_domain);
    CHECK(traj.samples.back().t <= 1.0);
    CHECK(traj.samples.back().t > 0.999);
    for (const auto& s : traj.samples) CHECK(s.q[0] > 0.0);
}

TEST_CASE("integration errors") {
    IntegratorConfig cfg;
    cfg.max_steps = 10;
    CHECK_THROWS_AS(newton_flow(PotentialSpec::oscillator(1.0), 1.0, 0.0, {0.0, 100.0}, cfg), IntegrationError);

    IntegratorConfig bad;
    bad.abs_tol = -1.0;
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    CHECK(method_from_string("rk4") == Method::RK4Fixed);
    CHECK(to_string(Method::DP45Adaptive) == "dp45");
    CHECK_THROWS_AS(method_from_string("euler"), ArgumentError);

    // A jet whose first derivative disagrees with its values.
    const auto broken = MetricChart::along_axis(
        {"x", "z"}, 0,
        {{0, 0, [](double) { return jet_constant(1.0); }},
         {1, 1, [](double x) { return Jet{1.0 + x * x, 0.0, 0.0, 0.0}; }}});
    CHECK_THROWS_AS(geodesic_flow(broken, {{1.0, 0.0}, {0.1, 1.0}, 0.0}, {0.0, 1.0}, tight()), NumericError);
}

TEST_CASE("dense output grid") {
    IntegratorConfig cfg;
    cfg.output_step = 0.25;
    const auto traj = newton_flow(PotentialSpec::oscillator(1.0), 1.0, 0.0, {0.0, 2.0}, cfg);
    REQUIRE(traj.size() == 9);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(traj.samples[i].t == doctest::Approx(0.25 * static_cast<double>(i)).epsilon(1e-15));
        CHECK(std::abs(traj.samples[i].q[0] - std::cos(traj.samples[i].t)) < 1e-9);
    }
}

TEST_CASE("csv output") {
    const auto run = [] {
        return newton_flow(PotentialSpec::ermakov(0.5), 1.0, 0.1, {0.0, 1.0}, IntegratorConfig{});
    };
    const std::string a = to_csv(run(), {"seed 0"});
    const std::string b = to_csv(run(), {"seed 0"});
    CHECK(a == b);

    std::istringstream in(a);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# seed 0");
    std::getline(in, line);
    CHECK(line == "t,x,p_x");

    // Every printed value parses back to the sampled double.
    const auto traj = run();
    for (std::size_t i = 0; std::getline(in, line); ++i) {
        REQUIRE(i < traj.size());
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const std::string x = line.substr(c1 + 1, c2 - c1 - 1);
        double parsed = 0.0;
        std::from_chars(x.data(), x.data() + x.size(), parsed);
        CHECK(parsed == traj.samples[i].q[0]);
    }

    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    const auto j = to_json(traj);
    CHECK(j.at("samples").size() == traj.size());
}
