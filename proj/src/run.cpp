#include "eisenhart/run.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "eisenhart/acceptance.hpp"
#include "eisenhart/curvature.hpp"
#include "eisenhart/errors.hpp"
#include "eisenhart/linearize.hpp"

namespace eisenhart {

namespace {

std::vector<Point> grid_points(const RunConfig& c, std::size_t dim) {
    std::vector<Point> pts;
    const auto n = c.grid.n_points;
    for (std::size_t i = 0; i < n; ++i) {
        Point p(dim, 0.0);
        p[0] = c.grid.x_min + (c.grid.x_max - c.grid.x_min) * static_cast<double>(i) / static_cast<double>(n - 1);
        pts.push_back(p);
    }
    return pts;
}

LiftedSystem make_lift(const RunConfig& c) {
    LiftOptions opts;
    opts.check_domain = std::pair{c.grid.x_min, c.grid.x_max};
    return build_lift(*c.lift, *c.potential, c.alpha, c.original_energy(), opts);
}

std::vector<std::string> common_header(const RunConfig& c) {
    std::vector<std::string> h{"command: " + std::string(to_string(c.command)), "seed: " + std::to_string(c.seed)};
    if (c.potential) h.push_back("potential: " + c.potential->to_json().dump());
    if (c.lift) h.push_back("lift: " + std::string(to_string(*c.lift)));
    return h;
}

std::string csv_table(const std::vector<std::string>& comments, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    for (const auto& c : comments) os << "# " << c << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << '\n';
    }
    return os.str();
}

struct Report {
    std::string body;
    std::string summary;  // printed to stdout when the body goes to a file
    int code = kExitOk;
};

Report do_curvature(const RunConfig& c) {
    const LiftedSystem lift = make_lift(c);
    const auto grid = grid_points(c, lift.coords().size());
    const CurvatureReport rep = curvature_report(lift.metric(), grid);
    Report r;
    r.summary = "verdict: " + std::string(to_string(rep.verdict));
    if (c.format == OutputFormat::Json) {
        nlohmann::json j = to_json(rep);
        j["lift"] = lift.to_json();
        r.body = j.dump(2) + "\n";
        return r;
    }
    auto comments = common_header(c);
    comments.push_back(r.summary);
    comments.push_back("tolerance: " + format_double(rep.tolerance));
    std::vector<std::vector<double>> rows;
    for (const auto& p : rep.points) {
        rows.push_back({p.point[0], p.riemann_norm, p.ricci_norm, p.scalar, p.conformal_norm.value_or(0.0),
                        p.symmetry_violation});
    }
    r.body = csv_table(comments, {"x", "riemann_norm", "ricci_norm", "scalar", "conformal_norm", "symmetry_violation"},
                       rows);
    return r;
}

Report do_flatness(const RunConfig& c) {
    const LiftedSystem lift = make_lift(c);
    const auto grid = grid_points(c, lift.coords().size());
    const Flatness verdict = classify_flatness(lift.metric(), grid);
    Report r;
    r.summary = "verdict: " + std::string(to_string(verdict));
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    double worst = 0.0;
    for (const auto& p : grid) {
        const ResidualVector res = flatness_residual(lift, p[0]);
        width = res.values.size();
        std::vector<double> row{p[0]};
        for (std::size_t i = 0; i < res.values.size(); ++i) {
            row.push_back(res.values[i]);
            row.push_back(res.scales[i]);
        }
        worst = std::max(worst, res.max_relative());
        rows.push_back(row);
    }
    if (c.format == OutputFormat::Json) {
        nlohmann::json table = nlohmann::json::array();
        for (const auto& row : rows) table.push_back(row);
        r.body = nlohmann::json{{"verdict", std::string(to_string(verdict))},
                                {"lift", lift.to_json()},
                                {"max_relative_residual", worst},
                                {"residuals", table}}
                     .dump(2) +
                 "\n";
        return r;
    }
    std::vector<std::string> cols{"x"};
    for (std::size_t i = 0; i < width; ++i) {
        cols.push_back("residual_" + std::to_string(i));
        cols.push_back("scale_" + std::to_string(i));
    }
    auto comments = common_header(c);
    comments.push_back(r.summary);
    comments.push_back("max_relative_residual: " + format_double(worst));
    r.body = csv_table(comments, cols, rows);
    return r;
}

Report do_lift(const RunConfig& c) {
    const LiftedSystem lift = make_lift(c);
    const std::vector<double> p = lift.recovery_momenta(c.initial.v0);
    Report r;
    r.summary = "lift: " + std::string(to_string(lift.kind())) + ", coords " + std::to_string(lift.coords().size());
    if (c.format == OutputFormat::Json) {
        nlohmann::json j = lift.to_json();
        j["recovery_momenta"] = p;
        r.body = j.dump(2) + "\n";
        return r;
    }
    std::ostringstream os;
    for (const auto& line : common_header(c)) os << "# " << line << '\n';
    os << "key,value\n";
    os << "alpha," << format_double(lift.alpha()) << '\n';
    os << "hamiltonian_level," << format_double(lift.recovery().hamiltonian_level) << '\n';
    os << "original_energy," << format_double(lift.recovery().original_energy) << '\n';
    os << "null," << (lift.recovery().null ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < p.size(); ++i) os << "p_" << lift.coords()[i] << ',' << format_double(p[i]) << '\n';
    r.body = os.str();
    return r;
}

Report do_integrate(const RunConfig& c) {
    Trajectory traj;
    if (c.lift) {
        const LiftedSystem lift = make_lift(c);
        std::vector<double> q(lift.coords().size(), 0.0);
        q[0] = c.initial.x0;
        for (std::size_t i = 1; i < q.size(); ++i) {
            const auto& l = lift.coords()[i];
            q[i] = l == "z" ? c.initial.z0 : l == "u" ? c.initial.u0 : c.initial.v_ext0;
        }
        traj = geodesic_flow(lift, {q, lift.recovery_momenta(c.initial.v0), c.t_span.t0}, c.t_span, c.integrator);
    } else {
        traj = newton_flow(*c.potential, c.initial.x0, c.initial.v0, c.t_span, c.integrator);
    }
    Report r;
    r.summary = "samples: " + std::to_string(traj.size()) + (traj.meta.exited_domain ? " (exited domain)" : "");
    if (c.format == OutputFormat::Json) {
        r.body = to_json(traj).dump(2) + "\n";
        return r;
    }
    auto comments = common_header(c);
    comments.push_back("method: " + traj.meta.method);
    comments.push_back("steps: " + std::to_string(traj.meta.steps) + ", rejected: " + std::to_string(traj.meta.rejected));
    comments.push_back("exited_domain: " + std::string(traj.meta.exited_domain ? "true" : "false"));
    comments.push_back("max_energy_drift: " + format_double(traj.meta.max_energy_drift));
    r.body = to_csv(traj, comments);
    return r;
}

Report do_roundtrip(const RunConfig& c) {
    RoundtripOptions opts;
    opts.z0 = c.initial.z0;
    opts.u0 = c.initial.u0;
    opts.v0_ext = c.initial.v_ext0;
    const RoundtripReport rep = roundtrip(*c.potential, c.initial.x0, c.initial.v0, c.t_span, opts);
    Report r;
    r.summary = "max_deviation: " + format_double(rep.max_deviation) + (rep.partial ? " (partial)" : "");
    if (c.format == OutputFormat::Json) {
        r.body = to_json(rep, true).dump(2) + "\n";
        return r;
    }
    auto comments = common_header(c);
    comments.push_back("lift_kind: " + std::string(to_string(rep.lift_kind)));
    comments.push_back("map_used: " + rep.map_used);
    comments.push_back(r.summary);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < rep.t.size(); ++k) rows.push_back({rep.t[k], rep.x[k], rep.x_reference[k]});
    r.body = csv_table(comments, {"t", "x", "x_reference"}, rows);
    return r;
}

Report do_suite(const RunConfig& c) {
    AcceptanceOptions opts;
    opts.verbose = c.verbose;
    const auto results = run_acceptance(opts);
    Report r;
    bool all = true;
    for (const auto& x : results) all = all && x.passed;
    r.code = all ? kExitOk : kExitSuiteFailure;
    r.summary = all ? "suite: all criteria passed" : "suite: FAILED";
    if (c.format == OutputFormat::Json && !c.output_path.empty()) {
        r.body = nlohmann::json{{"passed", all}, {"criteria", to_json(results)}}.dump(2) + "\n";
        return r;
    }
    std::ostringstream os;
    for (const auto& x : results) os << format_result(x) << '\n';
    os << r.summary << '\n';
    r.body = os.str();
    return r;
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ArgumentError*>(&e) ||
        dynamic_cast<const ConstructionError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
        dynamic_cast<const nlohmann::json::exception*>(&e)) {
        return kExitInvalidConfig;
    }
    return kExitNumericFailure;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    Report rep;
    try {
        switch (config.command) {
        case Command::Curvature: rep = do_curvature(config); break;
        case Command::Flatness: rep = do_flatness(config); break;
        case Command::Lift: rep = do_lift(config); break;
        case Command::Integrate: rep = do_integrate(config); break;
        case Command::Roundtrip: rep = do_roundtrip(config); break;
        case Command::Suite: rep = do_suite(config); break;
        }
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        err << (code == kExitInvalidConfig ? "invalid configuration: " : "numeric failure: ") << e.what() << '\n';
        return code;
    }
    if (config.output_path.empty()) {
        out << rep.body;
    } else {
        std::ofstream f(config.output_path, std::ios::binary);
        if (!f) {
            err << "invalid configuration: cannot write '" << config.output_path << "'\n";
            return kExitInvalidConfig;
        }
        f << rep.body;
        out << rep.summary << '\n';
    }
    if (config.verbose) err << rep.summary << '\n';
    return rep.code;
}

}  // namespace eisenhart
