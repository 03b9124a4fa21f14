#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eisenhart/lifts.hpp"
#include "eisenhart/metric.hpp"
#include "eisenhart/ode.hpp"
#include "eisenhart/potentials.hpp"

namespace eisenhart {

struct PhaseState {
    std::vector<double> q;
    std::vector<double> p;
    double t = 0.0;
};

enum class ParameterLabel { t, tau };

struct TrajectoryMeta {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    double max_energy_drift = 0.0;  // relative, see drift_report
    double max_cyclic_drift = 0.0;  // relative drift of conserved momenta
    bool exited_domain = false;
    bool uniform = false;           // fixed-step sample grid
    std::string method;
};

struct Trajectory {
    std::vector<std::string> coord_labels;
    std::vector<std::string> momentum_labels;
    ParameterLabel parameter = ParameterLabel::t;
    std::vector<PhaseState> samples;
    // d/d(parameter) of q and p at each sample when known (empty otherwise).
    std::vector<PhaseState> rates;
    TrajectoryMeta meta;

    std::size_t size() const { return samples.size(); }
    std::vector<double> parameters() const;

    /// Column by label: "t"/"tau", a coordinate label or a momentum label.
    std::vector<double> column(const std::string& label) const;
};

struct TimeSpan {
    double t0 = 0.0;
    double t1 = 0.0;
};

/// x' = p_x, p_x' = -V'(x), labels {x} / {p_x}.
Trajectory newton_flow(const PotentialSpec& potential, double x0, double v0, TimeSpan span,
                       const IntegratorConfig& config);

/// Geodesic flow of H = 1/2 g^ij p_i p_j. With `time_scale` = N^2 the
/// right-hand side is multiplied by N^2(q) (the flow of `metric` in the
/// time t with dt = N^-2 ds).
Trajectory geodesic_flow(const MetricChart& metric, const PhaseState& state0, TimeSpan span,
                         const IntegratorConfig& config, const std::optional<ScalarField>& time_scale = {});

Trajectory geodesic_flow(const LiftedSystem& system, const PhaseState& state0, TimeSpan span,
                         const IntegratorConfig& config);

/// Restriction to the given coordinate and momentum labels, in trajectory
/// order. Throws ArgumentError for an unknown label.
Trajectory project(const Trajectory& traj, const std::vector<std::string>& labels);

/// Resamples the parameter as tau = t0 + int N^2(q) dt (trapezoid on the
/// sample grid) and rescales momenta p' = p / N^2. Coordinate rates are
/// carried over as dq/dtau = (dq/dt) / N^2; momentum rates are dropped.
/// Throws ReparametrizationError where N^2 <= 0.
Trajectory reparametrize(const Trajectory& traj, const std::function<double(PointView)>& factor);

/// max_k |H_k - H_0| / max(1, |H_0|).
double drift_report(const Trajectory& traj, const LiftedSystem& system);
double drift_report(const Trajectory& traj, const MetricChart& metric);
double drift_report(const Trajectory& traj, const PotentialSpec& potential);

/// Max relative change of the momenta conjugate to cyclic coordinates.
double cyclic_drift(const Trajectory& traj, const MetricChart& metric);

/// Header "t,x,...,p_x,..." and one row per sample with 17 significant digits.
std::string to_csv(const Trajectory& traj, const std::vector<std::string>& header_comments = {});
nlohmann::json to_json(const Trajectory& traj);

/// 17 significant digits, shortest exponent form ("%.17g").
std::string format_double(double v);

}  // namespace eisenhart
