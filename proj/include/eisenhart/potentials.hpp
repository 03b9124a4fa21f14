#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eisenhart/jet.hpp"

namespace eisenhart {

enum class Family { Linear, Oscillator, Ermakov, ErmakovOscillator, Morse, Exponential, Polynomial, Custom };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// Named parameters shared by the built-in families. Unused entries stay 0.
///
///   Linear              V = -a x - b x^2 / 2            (force a + b x)
///   Oscillator          V = omega/2 (x - x0)^2
///   Ermakov             V = V0 / (x - x0)^2,           x > x0
///   ErmakovOscillator   V = omega/2 (x - x0)^2 + V0 / (x - x0)^2
///   Morse               V = V1 e^{lambda (x-x0)} + V2 e^{2 lambda (x-x0)}
///   Exponential         V = V1 e^{lambda (x-x0)}
///   Polynomial          V = sum_k coefficients[k] (x - x0)^k
///
/// `offset` is added to every family.
struct PotentialParams {
    double V0 = 0.0;
    double omega = 0.0;
    double lambda = 0.0;
    double V1 = 0.0;
    double V2 = 0.0;
    double x0 = 0.0;
    double a = 0.0;
    double b = 0.0;
    double offset = 0.0;
    std::vector<double> coefficients;
};

/// Immutable description of a one-dimensional potential with exact
/// derivatives up to third order.
class PotentialSpec {
public:
    static PotentialSpec linear(double a, double b);
    static PotentialSpec oscillator(double omega, double x0 = 0.0, double offset = 0.0);
    static PotentialSpec ermakov(double V0, double x0 = 0.0);
    static PotentialSpec ermakov_oscillator(double V0, double omega, double x0 = 0.0);
    static PotentialSpec morse(double V1, double V2, double lambda, double x0 = 0.0);
    static PotentialSpec exponential(double V1, double lambda, double x0 = 0.0);
    static PotentialSpec polynomial(std::vector<double> coefficients, double x0 = 0.0);

    /// Build from a family and raw parameters; validates the family invariants.
    static PotentialSpec from_params(Family family, const PotentialParams& params);

    /// Custom potential with user supplied derivatives.
    static PotentialSpec custom(JetFunction jet, std::function<bool(double)> domain = {},
                                std::string name = "custom");

    /// Custom potential known only through its values. Derivatives come from
    /// central finite differences, so agreement with exact values is only
    /// at the 1e-4 level.
    static PotentialSpec custom_values(std::function<double(double)> value,
                                       std::function<bool(double)> domain = {},
                                       std::string name = "custom");

    /// {"family": "ermakov", "params": {"V0": 1.0, "x0": 0.0}}
    /// {"family": "polynomial", "params": {"coefficients": [0, 0, 0, 0, 1]}}
    static PotentialSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    Family family() const { return family_; }
    const PotentialParams& params() const { return params_; }
    const std::string& name() const { return name_; }

    bool in_domain(double x) const;

    /// V, V', V'', V''' at x. Throws DomainError outside the domain.
    Jet jet(double x) const;

    /// d^order V / dx^order. Throws ArgumentError for order outside 0..3.
    double eval(double x, int order = 0) const;

    double force(double x) const { return -eval(x, 1); }

private:
    PotentialSpec() = default;

    Family family_ = Family::Linear;
    PotentialParams params_;
    std::string name_;
    JetFunction custom_jet_;
    std::function<bool(double)> custom_domain_;
};

double eval_potential(const PotentialSpec& spec, double x, int order);

/// F(x) = -V'(x).
double force(const PotentialSpec& spec, double x);

/// Default step for `fd_derivative`: 1e-5 max(1,|x|), 1e-4, 1e-3 for orders 1..3.
double default_fd_step(int order, double x);

/// Central finite-difference estimate of the order-k derivative (k = 1..3) on
/// a stencil of 2k+1 points x + j h, |j| <= k. Throws DomainError when a
/// stencil point fails `domain`.
double fd_derivative(const std::function<double(double)>& f, double x, int order, double h,
                     const std::function<bool(double)>& domain = {});

}  // namespace eisenhart
