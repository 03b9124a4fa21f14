#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "eisenhart/dynamics.hpp"
#include "eisenhart/lifts.hpp"
#include "eisenhart/ode.hpp"
#include "eisenhart/potentials.hpp"

namespace eisenhart {

// Invalid run configuration (maps to exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Command { Curvature, Flatness, Lift, Integrate, Roundtrip, Suite };
enum class OutputFormat { Csv, Json };

std::string_view to_string(Command c);
Command command_from_string(std::string_view name);

struct GridSpec {
    double x_min = 0.5;
    double x_max = 3.0;
    std::size_t n_points = 50;
};

struct InitialData {
    double x0 = 1.0;
    double v0 = 0.0;
    // Extended coordinates of lifted flows.
    double z0 = 0.0;
    double u0 = 0.0;
    double v_ext0 = 0.0;
};

/// {
///   "command": "integrate",
///   "potential": {"family": "oscillator", "params": {"omega": 1}},
///   "lift": "lorentzian12", "alpha": 1, "energy": 0.5,
///   "grid": {"x_min": 0.5, "x_max": 3, "n_points": 50},
///   "initial": {"x0": 1, "v0": 0, "z0": 0, "u0": 0, "v_ext0": 0},
///   "t_span": [0, 10],
///   "integrator": {"method": "dp45", "step": 1e-3, "abs_tol": 1e-10, "rel_tol": 1e-10,
///                  "max_steps": 2000000, "output_step": 0},
///   "output": {"path": "out.csv", "format": "csv"},
///   "seed": 0
/// }
/// Only "command" is required; "potential" is required by every command but suite.
struct RunConfig {
    Command command = Command::Suite;
    std::optional<PotentialSpec> potential;
    std::optional<LiftKind> lift;
    double alpha = 1.0;
    std::optional<double> energy;  // default: from the initial data
    GridSpec grid;
    InitialData initial;
    TimeSpan t_span{0.0, 10.0};
    IntegratorConfig integrator;
    std::string output_path;
    OutputFormat format = OutputFormat::Csv;
    std::uint64_t seed = 0;
    bool verbose = false;

    double original_energy() const;
};

/// Throws ConfigError with a message naming the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace eisenhart
