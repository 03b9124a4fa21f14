#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eisenhart/metric.hpp"
#include "eisenhart/tensor.hpp"

namespace eisenhart {

// Conventions:
//   Gamma^k_ij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij)
//   R^i_jkl    = d_k Gamma^i_jl - d_l Gamma^i_jk + Gamma^i_km Gamma^m_jl - Gamma^i_lm Gamma^m_jk
//   R_jl       = R^i_jil,  R = g^jl R_jl
//   T_[ab]     = 1/2 (T_ab - T_ba)

/// Christoffel symbols of the second kind, indexed (k, i, j).
Tensor christoffel(const MetricChart& metric, PointView point);

/// d_m Gamma^k_ij from the second metric partials, indexed (m, k, i, j).
Tensor christoffel_gradient(const MetricChart& metric, PointView point);

/// Same quantity by central differences of `christoffel` with step h.
Tensor christoffel_gradient_fd(const MetricChart& metric, PointView point, double h = 1e-5);

/// Fully covariant Riemann tensor R_ijkl.
Tensor riemann(const MetricChart& metric, PointView point);

struct RicciResult {
    Tensor ricci;  // R_ij
    double scalar = 0.0;
};
RicciResult ricci(const MetricChart& metric, PointView point);

struct RicciGradient {
    Tensor ricci;   // (m, i, j) = d_m R_ij
    Tensor scalar;  // (m)       = d_m R
};

/// Analytic gradient of the Ricci tensor and scalar from third metric partials.
RicciGradient ricci_gradient(const MetricChart& metric, PointView point);

/// Same by central differences of `ricci` with step h.
RicciGradient ricci_gradient_fd(const MetricChart& metric, PointView point, double h = 1e-4);

/// Cotton-York tensor, indexed (mu, nu, kappa):
///   C = R_mu nu;kappa - R_kappa nu;mu + 1/4 (R_;mu g_nu kappa - R_;kappa g_nu mu).
/// Throws DimensionError unless dim == 3.
Tensor cotton_york(const MetricChart& metric, PointView point);

/// Weyl tensor C_mu nu kappa lambda. Throws DimensionError when dim < 4.
Tensor weyl(const MetricChart& metric, PointView point);

struct CurvatureBundle {
    Point point;
    Tensor metric;       // g_ij
    Tensor christoffel;  // Gamma^k_ij
    Tensor riemann_lower;
    Tensor ricci;
    double scalar = 0.0;
    std::optional<Tensor> cotton_york;  // dim == 3
    std::optional<Tensor> weyl;         // dim >= 4
};

CurvatureBundle curvature(const MetricChart& metric, PointView point);

/// Largest violations of the algebraic identities of a bundle, in absolute terms:
/// Riemann antisymmetry in each pair, pair symmetry, first Bianchi identity
/// and (when present) the tracelessness of the Weyl tensor.
struct SymmetryViolations {
    double antisymmetry = 0.0;
    double pair_symmetry = 0.0;
    double bianchi = 0.0;
    double weyl_trace = 0.0;

    double max() const;
};
SymmetryViolations symmetry_violations(const CurvatureBundle& bundle);

enum class Flatness { Flat, ConformallyFlat, NotConformallyFlat };
std::string_view to_string(Flatness f);

struct PointCurvature {
    Point point;
    double riemann_norm = 0.0;
    double ricci_norm = 0.0;
    double scalar = 0.0;
    std::optional<double> conformal_norm;  // Cotton-York (n=3) or Weyl (n>=4) norm
    double symmetry_violation = 0.0;
};

struct CurvatureReport {
    int dim = 0;
    std::vector<PointCurvature> points;  // same order as the input grid
    double max_riemann = 0.0;
    double max_scalar = 0.0;
    double max_conformal = 0.0;
    double tolerance = 0.0;  // 1e-6 (1 + max_riemann)
    Flatness verdict = Flatness::NotConformallyFlat;
};

/// Evaluates curvature on every grid point (in parallel) and classifies:
///   n = 2: Flat iff max |R| < tol, else ConformallyFlat;
///   n = 3: Flat iff max |Riemann| < tol, else ConformallyFlat iff max |Cotton-York| < tol;
///   n >= 4: Flat iff max |Riemann| < tol, else ConformallyFlat iff max |Weyl| < tol.
/// Throws ArgumentError for an empty grid and NumericError when a bundle
/// violates its algebraic identities beyond 1e-8 (1 + |Riemann|).
CurvatureReport curvature_report(const MetricChart& metric, std::span<const Point> grid);

Flatness classify_flatness(const MetricChart& metric, std::span<const Point> grid);

nlohmann::json to_json(const CurvatureReport& report);

}  // namespace eisenhart
