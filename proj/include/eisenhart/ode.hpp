#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace eisenhart {

enum class Method { RK4Fixed, DP45Adaptive };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

struct IntegratorConfig {
    Method method = Method::DP45Adaptive;
    double step = 1e-3;        // RK4Fixed: nominal step (rounded so the span is covered exactly)
    double abs_tol = 1e-10;    // DP45Adaptive
    double rel_tol = 1e-10;
    std::size_t max_steps = 2'000'000;
    // DP45Adaptive: when > 0 the integrator also lands on t0 + k * output_step
    // and only those nodes (plus the end point) are recorded.
    double output_step = 0.0;

    /// Throws ArgumentError on non-positive tolerances or step.
    void validate() const;
};

/// dy/dt = f(t, y), written into dydt.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
/// Domain predicate on states; a DomainError thrown by the rhs counts as a violation too.
using OdeGuard = std::function<bool(std::span<const double> y)>;

struct OdeSolution {
    std::vector<double> t;
    std::vector<std::vector<double>> y;
    std::vector<std::vector<double>> dydt;  // f(t, y) at every sample
    std::size_t steps = 0;
    std::size_t rejected = 0;
    bool exited_domain = false;
};

/// Integrates from t0 to t1 > t0. Components with error_mask[i] == false
/// are left out of the DP45 error norm, so they cannot influence the step
/// sequence (empty mask = all components). Leaving the guard's domain
/// truncates the solution and sets exited_domain. Throws IntegrationError
/// when max_steps is exhausted or the step size underflows.
OdeSolution integrate_ode(const OdeRhs& rhs, std::vector<double> y0, double t0, double t1,
                          const IntegratorConfig& config, const OdeGuard& guard = {},
                          const std::vector<bool>& error_mask = {});

}  // namespace eisenhart
