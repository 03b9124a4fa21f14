#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eisenhart/dynamics.hpp"
#include "eisenhart/lifts.hpp"
#include "eisenhart/metric.hpp"
#include "eisenhart/potentials.hpp"

namespace eisenhart {

/// A point transformation between an "old" chart (the lift) and a "new"
/// chart in which the dynamics is linear. Momenta transform with the
/// Jacobian J = d(old)/d(new):  P_new = J^T p_old.
struct CoordinateMap {
    std::string name;
    std::vector<std::string> old_labels;
    std::vector<std::string> new_labels;
    std::function<Point(PointView)> forward;   // old -> new
    std::function<Point(PointView)> inverse;   // new -> old
    std::function<Tensor(PointView)> jacobian; // d old^i / d new^j at a new point
    std::function<bool(PointView)> old_domain;
    std::function<bool(PointView)> new_domain;

    /// Checked wrappers: throw DomainError outside the domains.
    Point to_new(PointView old_point) const;
    Point to_old(PointView new_point) const;

    std::vector<double> momenta_to_new(PointView new_point, PointView old_momenta) const;
    std::vector<double> momenta_to_old(PointView new_point, PointView new_momenta) const;
};

/// (X, Y) -> (x, z) = (sqrt(X^2 + Y^2), sqrt(alpha V0) atan(Y / X)) on X > 0.
/// Takes the Riemannian11 Ermakov Hamiltonian to (P_X^2 + P_Y^2) / 2: the
/// lift metric dx^2 + x^2 dz^2 / (alpha V0) is polar in the angle z / sqrt(alpha V0).
/// Throws ArgumentError unless alpha V0 > 0.
CoordinateMap ermakov_map(double alpha, double V0);

/// (X, Y, Z) -> (x, u, v) with Zb = Y + Z:
///   x = X / sqrt(1 + Zb^2),  u = atan(Zb) / sqrt(omega),
///   v = sqrt(omega) / 2 (2 Y - Zb + Zb X^2 / (1 + Zb^2)).
/// Pulls dx^2 + 2 du dv - omega x^2 du^2 back to (dX^2 + dY^2 - dZ^2) / (1 + Zb^2).
/// Throws ArgumentError unless omega > 0.
CoordinateMap oscillator_map(double omega);

/// (X, z) -> (x, z) with X(x) = int_{x_ref}^x sqrt(V). Requires V > 0;
/// quadrature to 1e-10 absolute, inverse by bracketed root finding.
CoordinateMap null_straightening(const PotentialSpec& potential, double x_ref = 0.0);

/// X(x) alone (same quadrature as the map). Throws DomainError where V <= 0
/// and NumericError when the quadrature does not converge.
double straightened_coordinate(const PotentialSpec& potential, double x, double x_ref = 0.0);

struct ConformalComparison {
    double path_distance = 0.0;  // symmetric Hausdorff distance of the two paths
    bool null = false;           // |H| < 1e-10 at the initial state
    double hamiltonian = 0.0;
    double energy_drift = 0.0;   // worst of the two flows
    double cyclic_drift = 0.0;
};

/// Geodesics of g and of N^2 g from the same point and covector. The N^2 g
/// flow runs in the time t with dt = N^-2 ds (s its affine parameter), so
/// both start with the same velocity; the paths are compared as point sets.
ConformalComparison conformal_geodesic_compare(const MetricChart& metric, const ScalarField& n2,
                                               const PhaseState& state0, TimeSpan span,
                                               const IntegratorConfig& config = {});

/// Symmetric Hausdorff distance between two polylines (rows are points).
double polyline_hausdorff(const std::vector<Point>& a, const std::vector<Point>& b);

/// Cubic Hermite resampling of coordinate `index` on `n` uniform parameter
/// values between the first and last sample. Needs coordinate rates.
std::vector<double> resample_uniform(const Trajectory& traj, std::size_t index, std::size_t n);

struct StraighteningCheck {
    double max_X_second_difference = 0.0;  // |d^2 X / d tau^2| on the uniform grid
    double max_z_second_difference = 0.0;
    double tau_step = 0.0;
    std::size_t samples = 0;
    double energy_drift = 0.0;
    double cyclic_drift = 0.0;
};

/// Null geodesic of dx^2 - dz^2 / V from (x0, 0) with p_z = 1 and
/// p_x = sqrt(V(x0)), straightened by `null_straightening` and reparametrized
/// by dtau = V dt, then resampled to `samples` uniform tau values.
StraighteningCheck straightening_check(const PotentialSpec& potential, double x0, TimeSpan span,
                                       const IntegratorConfig& config, std::size_t samples = 201,
                                       double x_ref = 0.0);

struct RoundtripOptions {
    std::size_t samples = 1000;
    IntegratorConfig reference{Method::DP45Adaptive, 1e-3, 1e-12, 1e-12};
    IntegratorConfig lifted{Method::DP45Adaptive, 1e-3, 1e-12, 1e-12};
    // Extended-coordinate initial data of the lifted flow.
    double z0 = 0.0;
    double u0 = 0.0;
    double v0_ext = 0.0;
};

struct RoundtripReport {
    Family family = Family::Oscillator;
    LiftKind lift_kind = LiftKind::Lorentzian12;
    std::string map_used;
    double max_deviation = 0.0;
    bool partial = false;
    std::size_t compared = 0;
    std::size_t skipped = 0;      // samples on a chart singularity
    double energy_drift = 0.0;    // lifted flow (0 for explicit maps)
    double cyclic_drift = 0.0;
    double reference_drift = 0.0; // newton_flow energy drift
    std::vector<double> t;
    std::vector<double> x;        // recovered x(t)
    std::vector<double> x_reference;
};

/// Lift, solve in the linear chart (straight lines for Oscillator and
/// Ermakov, lifted geodesics for ErmakovOscillator and Morse), map back and
/// compare x(t) against newton_flow.
RoundtripReport roundtrip(const PotentialSpec& potential, double x0, double v0, TimeSpan span,
                          const RoundtripOptions& options = {});

/// x(t) of the lifted geodesic flow with recovery momenta against
/// newton_flow on a common grid of `options.samples` steps.
RoundtripReport lift_projection(const PotentialSpec& potential, LiftKind kind, double alpha, double x0, double v0,
                                TimeSpan span, const RoundtripOptions& options = {});

nlohmann::json to_json(const RoundtripReport& report, bool with_samples = false);

}  // namespace eisenhart
