#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eisenhart/jet.hpp"
#include "eisenhart/metric.hpp"
#include "eisenhart/potentials.hpp"

namespace eisenhart {

/// The four Eisenhart lifts of a one-dimensional Newtonian system.
///
///   Riemannian11      (x, z)        dx^2 + dz^2 / (alpha V)
///   Lorentzian12      (x, u, v)     dx^2 + 2 du dv - 2 V du^2
///   Mixed13           (x, z, u, v)  dx^2 + dz^2 / (alpha F1) + 2 du dv - 2 F2 du^2
///   ConformalMixed13  (x, z, u, v)  dx^2 + dz^2 / (alpha F1) + (2 / V2) du dv - 2 (V1 / V2^2) du^2
///
/// Every lifted Hamiltonian is the geodesic one, 1/2 g^ij p_i p_j. In the
/// null charts u is the time-like coordinate: p_v = 1 gives du/dt = 1.
enum class LiftKind { Riemannian11, Lorentzian12, Mixed13, ConformalMixed13 };

std::string_view to_string(LiftKind kind);
LiftKind lift_kind_from_string(std::string_view name);

/// Conserved-momentum conditions under which the lifted flow projects onto
/// the original x-dynamics with energy `original_energy`.
struct RecoveryConstraint {
    std::map<std::string, double> fixed_momenta;  // keyed by coordinate label: "z", "u", "v"
    double hamiltonian_level = 0.0;               // value of the lifted Hamiltonian
    double original_energy = 0.0;                 // h = p_x^2 / 2 + V(x)
    bool null = false;
};

/// Optional knobs of `build_lift`.
struct LiftOptions {
    // When set, alpha V > 0 (and the other nondegeneracy conditions) are
    // checked on a sample of this interval.
    std::optional<std::pair<double, double>> check_domain;
    // ConformalMixed13 split V = V1 + p_u V2 with V2 = amplitude e^{lambda (x - x0)}.
    double v2_amplitude = 1.0;
    double coupling_momentum = 0.0;  // p_u for ConformalMixed13
};

class LiftedSystem {
public:
    LiftKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    const PotentialSpec& potential() const { return potential_; }
    const MetricChart& metric() const { return metric_; }
    const std::vector<std::string>& coords() const { return metric_.labels(); }
    const RecoveryConstraint& recovery() const { return recovery_; }

    /// Auxiliary functions by name: "V" | "F1","F2" | "V1","V2".
    const std::map<std::string, JetFunction>& aux() const { return aux_; }

    /// Indices of coordinates the metric does not depend on.
    std::vector<int> cyclic_coordinates() const;

    /// Momentum vector at position x satisfying the recovery constraint for
    /// the given x-momentum. Cyclic momenta come from `recovery()`.
    std::vector<double> recovery_momenta(double p_x) const;

    /// The lifted Hamiltonian minus the x-kinetic term with the recovery
    /// momenta inserted, i.e. V(x) + constant.
    double recovered_potential(double x) const;

    nlohmann::json to_json() const;

private:
    friend LiftedSystem build_lift(LiftKind, const PotentialSpec&, double, double, const LiftOptions&);

    LiftedSystem(LiftKind kind, double alpha, PotentialSpec potential, MetricChart metric,
                 std::map<std::string, JetFunction> aux, RecoveryConstraint recovery)
        : kind_(kind), alpha_(alpha), potential_(std::move(potential)), metric_(std::move(metric)),
          aux_(std::move(aux)), recovery_(std::move(recovery)) {}

    LiftKind kind_;
    double alpha_;
    PotentialSpec potential_;
    MetricChart metric_;
    std::map<std::string, JetFunction> aux_;
    RecoveryConstraint recovery_;
};

/// Builds the lift of `potential` of the given kind with momenta solved from
/// the original energy h. Compatibility:
///   Riemannian11      any V with alpha V > 0; alpha p_z^2 = 2, level h
///   Lorentzian12      any V; p_v = 1, p_u = -h, level 0 (null)
///   Mixed13           ErmakovOscillator; F1 = (x-x0)^-2, F2 = omega/2 (x-x0)^2 + offset,
///                     p_z = sqrt(2 V0 / alpha), p_v = 1, p_u = -h, level 0
///   ConformalMixed13  Morse / Exponential; F1 = 1, V1 + p_u V2 = V - offset,
///                     p_v = 1, alpha p_z^2 / 2 = -(h - offset), level 0
/// Throws ConstructionError when the metric would degenerate or momenta
/// cannot be real, ArgumentError for an incompatible family.
LiftedSystem build_lift(LiftKind kind, const PotentialSpec& potential, double alpha, double original_energy,
                        const LiftOptions& options = {});

/// 1/2 g^ij p_i p_j at (q, p). Throws ArgumentError on a dimension mismatch.
double lifted_hamiltonian(const LiftedSystem& system, std::span<const double> q, std::span<const double> p);

// Metric builders for given auxiliary functions (no recovery data).
MetricChart riemannian_metric(JetFunction V, double alpha, std::function<bool(double)> domain = {});
MetricChart pp_wave_metric(JetFunction V, std::function<bool(double)> domain = {});
MetricChart mixed_metric(JetFunction F1, JetFunction F2, double alpha, std::function<bool(double)> domain = {});
MetricChart conformal_mixed_metric(JetFunction F1, JetFunction V1, JetFunction V2, double alpha,
                                   std::function<bool(double)> domain = {});

/// Left-hand sides of the flatness conditions at x, with a scale per entry
/// (sum of the absolute values of the terms) for relative comparisons.
///   Riemannian11      [2 V'' V - 3 V'^2]                          functions: V
///   Lorentzian12      [V''']                                      functions: V
///   Mixed13           [2 F1'' F1 - 3 F1'^2, 2 F2'' F1 + F2' F1']  functions: F1, F2
///   ConformalMixed13  [3 V2 (V1'' V2 - 3 V1' V2') + 6 V1 V2'^2,
///                      V2'' V2 - V2'^2]                           functions: V1, V2
struct ResidualVector {
    std::vector<double> values;
    std::vector<double> scales;

    /// max |value| / max(scale, tiny); 0 for an empty vector.
    double max_relative() const;
};

ResidualVector flatness_residual(LiftKind kind, std::span<const JetFunction> functions, double x);

/// Residual of the conditions for the auxiliary functions of a built lift.
ResidualVector flatness_residual(const LiftedSystem& system, double x);

}  // namespace eisenhart
