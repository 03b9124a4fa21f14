#include "eisenhart/config.hpp"

#include <cmath>
#include <fstream>

#include "eisenhart/errors.hpp"

namespace eisenhart {

namespace {

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::Curvature, "curvature"}, {Command::Flatness, "flatness"},   {Command::Lift, "lift"},
    {Command::Integrate, "integrate"}, {Command::Roundtrip, "roundtrip"}, {Command::Suite, "suite"},
};

double number(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(std::string("'") + key + "' must be finite");
    return d;
}

const nlohmann::json& object(const nlohmann::json& j, const char* key) {
    static const nlohmann::json empty = nlohmann::json::object();
    if (!j.contains(key)) return empty;
    if (!j.at(key).is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
    return j.at(key);
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> known, const std::string& where) {
    for (const auto& [k, _] : j.items()) {
        if (std::find(known.begin(), known.end(), k) == known.end()) {
            throw ConfigError("unknown key '" + k + "' in " + where);
        }
    }
}

}  // namespace

std::string_view to_string(Command c) {
    for (const auto& [k, n] : kCommands) {
        if (k == c) return n;
    }
    return "unknown";
}

Command command_from_string(std::string_view name) {
    for (const auto& [k, n] : kCommands) {
        if (n == name) return k;
    }
    throw ConfigError("unknown command '" + std::string(name) + "'");
}

double RunConfig::original_energy() const {
    if (energy) return *energy;
    if (!potential) return 0.0;
    return 0.5 * initial.v0 * initial.v0 + potential->eval(initial.x0);
}

RunConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"command", "potential", "lift", "alpha", "energy", "grid", "initial", "t_span", "integrator",
                    "output", "seed"},
                   "config");
    RunConfig c;
    if (!j.contains("command") || !j.at("command").is_string()) throw ConfigError("'command' (string) is required");
    c.command = command_from_string(j.at("command").get<std::string>());

    try {
        if (j.contains("potential")) c.potential = PotentialSpec::from_json(j.at("potential"));
        if (j.contains("lift")) {
            if (!j.at("lift").is_string()) throw ConfigError("'lift' must be a string");
            c.lift = lift_kind_from_string(j.at("lift").get<std::string>());
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (c.command != Command::Suite && !c.potential) throw ConfigError("'potential' is required for this command");
    if ((c.command == Command::Curvature || c.command == Command::Flatness || c.command == Command::Lift) && !c.lift) {
        throw ConfigError("'lift' is required for this command");
    }

    c.alpha = number(j, "alpha", c.alpha);
    if (j.contains("energy")) c.energy = number(j, "energy", 0.0);

    const auto& grid = object(j, "grid");
    reject_unknown(grid, {"x_min", "x_max", "n_points"}, "grid");
    c.grid.x_min = number(grid, "x_min", c.grid.x_min);
    c.grid.x_max = number(grid, "x_max", c.grid.x_max);
    if (grid.contains("n_points")) {
        if (!grid.at("n_points").is_number_integer() || grid.at("n_points").get<long long>() < 2) {
            throw ConfigError("grid.n_points must be an integer >= 2");
        }
        c.grid.n_points = grid.at("n_points").get<std::size_t>();
    }
    if (!(c.grid.x_min < c.grid.x_max)) throw ConfigError("grid needs x_min < x_max");

    const auto& init = object(j, "initial");
    reject_unknown(init, {"x0", "v0", "z0", "u0", "v_ext0"}, "initial");
    c.initial.x0 = number(init, "x0", c.initial.x0);
    c.initial.v0 = number(init, "v0", c.initial.v0);
    c.initial.z0 = number(init, "z0", c.initial.z0);
    c.initial.u0 = number(init, "u0", c.initial.u0);
    c.initial.v_ext0 = number(init, "v_ext0", c.initial.v_ext0);

    if (j.contains("t_span")) {
        const auto& ts = j.at("t_span");
        if (!ts.is_array() || ts.size() != 2 || !ts[0].is_number() || !ts[1].is_number()) {
            throw ConfigError("'t_span' must be [t0, t1]");
        }
        c.t_span = {ts[0].get<double>(), ts[1].get<double>()};
        if (!(c.t_span.t1 > c.t_span.t0)) throw ConfigError("t_span needs t1 > t0");
    }

    const auto& integ = object(j, "integrator");
    reject_unknown(integ, {"method", "step", "abs_tol", "rel_tol", "max_steps", "output_step"}, "integrator");
    try {
        if (integ.contains("method")) c.integrator.method = method_from_string(integ.at("method").get<std::string>());
        c.integrator.step = number(integ, "step", c.integrator.step);
        c.integrator.abs_tol = number(integ, "abs_tol", c.integrator.abs_tol);
        c.integrator.rel_tol = number(integ, "rel_tol", c.integrator.rel_tol);
        c.integrator.output_step = number(integ, "output_step", c.integrator.output_step);
        if (integ.contains("max_steps")) {
            if (!integ.at("max_steps").is_number_unsigned()) throw ConfigError("max_steps must be a positive integer");
            c.integrator.max_steps = integ.at("max_steps").get<std::size_t>();
        }
        c.integrator.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("integrator: ") + e.what());
    }

    const auto& out = object(j, "output");
    reject_unknown(out, {"path", "format"}, "output");
    if (out.contains("path")) {
        if (!out.at("path").is_string()) throw ConfigError("output.path must be a string");
        c.output_path = out.at("path").get<std::string>();
    }
    if (out.contains("format")) {
        const std::string f = out.at("format").is_string() ? out.at("format").get<std::string>() : "";
        if (f == "csv") {
            c.format = OutputFormat::Csv;
        } else if (f == "json") {
            c.format = OutputFormat::Json;
        } else {
            throw ConfigError("output.format must be \"csv\" or \"json\"");
        }
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j);
}

}  // namespace eisenhart
