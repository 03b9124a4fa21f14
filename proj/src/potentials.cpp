#include "eisenhart/potentials.hpp"

#include <array>
#include <cmath>
#include <map>

#include "eisenhart/errors.hpp"

namespace eisenhart {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 8> kFamilyNames{{
    {Family::Linear, "linear"},
    {Family::Oscillator, "oscillator"},
    {Family::Ermakov, "ermakov"},
    {Family::ErmakovOscillator, "ermakov_oscillator"},
    {Family::Morse, "morse"},
    {Family::Exponential, "exponential"},
    {Family::Polynomial, "polynomial"},
    {Family::Custom, "custom"},
}};

Jet quadratic_jet(double omega, double s) { return {0.5 * omega * s * s, omega * s, omega, 0.0}; }

Jet inverse_square_jet(double V0, double s) {
    const double r = 1.0 / s;
    const double r2 = r * r;
    return {V0 * r2, -2.0 * V0 * r2 * r, 6.0 * V0 * r2 * r2, -24.0 * V0 * r2 * r2 * r};
}

// Horner evaluation of sum c_k s^k and its first three derivatives.
Jet polynomial_jet(const std::vector<double>& c, double s) {
    Jet j{};
    for (auto k = c.size(); k-- > 0;) {
        j[3] = j[3] * s + j[2];
        j[2] = j[2] * s + j[1];
        j[1] = j[1] * s + j[0];
        j[0] = j[0] * s + c[k];
    }
    return {j[0], j[1], 2.0 * j[2], 6.0 * j[3]};
}

Jet exponential_jet(double amplitude, double rate, double s) {
    const double e = amplitude * std::exp(rate * s);
    return {e, rate * e, rate * rate * e, rate * rate * rate * e};
}

void validate(Family family, const PotentialParams& p) {
    switch (family) {
    case Family::Ermakov:
    case Family::ErmakovOscillator:
        if (p.V0 == 0.0) throw ArgumentError("Ermakov potential requires V0 != 0");
        break;
    case Family::Morse:
    case Family::Exponential:
        if (p.lambda == 0.0) throw ArgumentError("exponential-type potential requires lambda != 0");
        break;
    case Family::Polynomial:
        if (p.coefficients.empty()) throw ArgumentError("polynomial potential needs coefficients");
        for (double c : p.coefficients) {
            if (!std::isfinite(c)) throw ArgumentError("potential parameters must be finite");
        }
        break;
    default:
        break;
    }
    for (double v : {p.V0, p.omega, p.lambda, p.V1, p.V2, p.x0, p.a, p.b, p.offset}) {
        if (!std::isfinite(v)) throw ArgumentError("potential parameters must be finite");
    }
}

double& param_slot(PotentialParams& p, std::string_view key) {
    if (key == "V0") return p.V0;
    if (key == "omega") return p.omega;
    if (key == "lambda") return p.lambda;
    if (key == "V1") return p.V1;
    if (key == "V2") return p.V2;
    if (key == "x0") return p.x0;
    if (key == "a") return p.a;
    if (key == "b") return p.b;
    if (key == "offset") return p.offset;
    throw ArgumentError("unknown potential parameter '" + std::string(key) + "'");
}

}  // namespace

std::string_view to_string(Family family) {
    for (const auto& [f, name] : kFamilyNames) {
        if (f == family) return name;
    }
    return "unknown";
}

Family family_from_string(std::string_view name) {
    for (const auto& [f, n] : kFamilyNames) {
        if (n == name) return f;
    }
    throw ArgumentError("unknown potential family '" + std::string(name) + "'");
}

PotentialSpec PotentialSpec::from_params(Family family, const PotentialParams& params) {
    if (family == Family::Custom) throw ArgumentError("custom potentials need a callable");
    validate(family, params);
    PotentialSpec spec;
    spec.family_ = family;
    spec.params_ = params;
    spec.name_ = std::string(to_string(family));
    return spec;
}

PotentialSpec PotentialSpec::linear(double a, double b) {
    PotentialParams p;
    p.a = a;
    p.b = b;
    return from_params(Family::Linear, p);
}

PotentialSpec PotentialSpec::oscillator(double omega, double x0, double offset) {
    PotentialParams p;
    p.omega = omega;
    p.x0 = x0;
    p.offset = offset;
    return from_params(Family::Oscillator, p);
}

PotentialSpec PotentialSpec::ermakov(double V0, double x0) {
    PotentialParams p;
    p.V0 = V0;
    p.x0 = x0;
    return from_params(Family::Ermakov, p);
}

PotentialSpec PotentialSpec::ermakov_oscillator(double V0, double omega, double x0) {
    PotentialParams p;
    p.V0 = V0;
    p.omega = omega;
    p.x0 = x0;
    return from_params(Family::ErmakovOscillator, p);
}

PotentialSpec PotentialSpec::morse(double V1, double V2, double lambda, double x0) {
    PotentialParams p;
    p.V1 = V1;
    p.V2 = V2;
    p.lambda = lambda;
    p.x0 = x0;
    return from_params(Family::Morse, p);
}

PotentialSpec PotentialSpec::exponential(double V1, double lambda, double x0) {
    PotentialParams p;
    p.V1 = V1;
    p.lambda = lambda;
    p.x0 = x0;
    return from_params(Family::Exponential, p);
}

PotentialSpec PotentialSpec::polynomial(std::vector<double> coefficients, double x0) {
    PotentialParams p;
    p.coefficients = std::move(coefficients);
    p.x0 = x0;
    return from_params(Family::Polynomial, p);
}

PotentialSpec PotentialSpec::custom(JetFunction jet, std::function<bool(double)> domain,
                                    std::string name) {
    if (!jet) throw ArgumentError("custom potential requires a callable");
    PotentialSpec spec;
    spec.family_ = Family::Custom;
    spec.name_ = std::move(name);
    spec.custom_jet_ = std::move(jet);
    spec.custom_domain_ = std::move(domain);
    return spec;
}

PotentialSpec PotentialSpec::custom_values(std::function<double(double)> value,
                                           std::function<bool(double)> domain, std::string name) {
    if (!value) throw ArgumentError("custom potential requires a callable");
    auto jet = [value, domain](double x) -> Jet {
        Jet j{value(x), 0.0, 0.0, 0.0};
        for (int k = 1; k <= 3; ++k) j[k] = fd_derivative(value, x, k, default_fd_step(k, x), domain);
        return j;
    };
    return custom(std::move(jet), std::move(domain), std::move(name));
}

PotentialSpec PotentialSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
        throw ArgumentError("potential must be an object with a string 'family'");
    }
    const Family family = family_from_string(j.at("family").get<std::string>());
    PotentialParams params;
    if (j.contains("params")) {
        const auto& pj = j.at("params");
        if (!pj.is_object()) throw ArgumentError("potential 'params' must be an object");
        for (const auto& [key, value] : pj.items()) {
            if (key == "coefficients") {
                if (!value.is_array()) throw ArgumentError("'coefficients' must be an array of numbers");
                for (const auto& c : value) {
                    if (!c.is_number()) throw ArgumentError("'coefficients' must be an array of numbers");
                    params.coefficients.push_back(c.get<double>());
                }
                continue;
            }
            if (!value.is_number()) throw ArgumentError("potential parameter '" + key + "' must be a number");
            param_slot(params, key) = value.get<double>();
        }
    }
    return from_params(family, params);
}

nlohmann::json PotentialSpec::to_json() const {
    nlohmann::json params = nlohmann::json::object();
    const auto put = [&](const char* key, double v) {
        if (v != 0.0) params[key] = v;
    };
    put("V0", params_.V0);
    put("omega", params_.omega);
    put("lambda", params_.lambda);
    put("V1", params_.V1);
    put("V2", params_.V2);
    put("x0", params_.x0);
    put("a", params_.a);
    put("b", params_.b);
    put("offset", params_.offset);
    if (!params_.coefficients.empty()) params["coefficients"] = params_.coefficients;
    return {{"family", std::string(to_string(family_))}, {"params", params}};
}

bool PotentialSpec::in_domain(double x) const {
    if (!std::isfinite(x)) return false;
    switch (family_) {
    case Family::Ermakov:
    case Family::ErmakovOscillator:
        return x > params_.x0;
    case Family::Custom:
        return !custom_domain_ || custom_domain_(x);
    default:
        return true;
    }
}

Jet PotentialSpec::jet(double x) const {
    if (!in_domain(x)) throw DomainError("x = " + std::to_string(x) + " outside the domain of " + name_);
    const PotentialParams& p = params_;
    const double s = x - p.x0;
    Jet j{};
    switch (family_) {
    case Family::Linear:
        j = {-p.a * x - 0.5 * p.b * x * x, -p.a - p.b * x, -p.b, 0.0};
        break;
    case Family::Oscillator:
        j = quadratic_jet(p.omega, s);
        break;
    case Family::Ermakov:
        j = inverse_square_jet(p.V0, s);
        break;
    case Family::ErmakovOscillator:
        j = quadratic_jet(p.omega, s) + inverse_square_jet(p.V0, s);
        break;
    case Family::Morse:
        j = exponential_jet(p.V1, p.lambda, s) + exponential_jet(p.V2, 2.0 * p.lambda, s);
        break;
    case Family::Exponential:
        j = exponential_jet(p.V1, p.lambda, s);
        break;
    case Family::Polynomial:
        j = polynomial_jet(p.coefficients, s);
        break;
    case Family::Custom:
        return custom_jet_(x);
    }
    j[0] += p.offset;
    return j;
}

double PotentialSpec::eval(double x, int order) const {
    if (order < 0 || order > 3) throw ArgumentError("derivative order must be in 0..3");
    return jet(x)[static_cast<std::size_t>(order)];
}

double eval_potential(const PotentialSpec& spec, double x, int order) { return spec.eval(x, order); }

double force(const PotentialSpec& spec, double x) { return spec.force(x); }

double default_fd_step(int order, double x) {
    switch (order) {
    case 1:
        return 1e-5 * std::max(1.0, std::abs(x));
    case 2:
        return 1e-4;
    case 3:
        return 1e-3;
    default:
        throw ArgumentError("finite-difference order must be in 1..3");
    }
}

double fd_derivative(const std::function<double(double)>& f, double x, int order, double h,
                     const std::function<bool(double)>& domain) {
    if (order < 1 || order > 3) throw ArgumentError("finite-difference order must be in 1..3");
    if (!(h > 0.0)) throw ArgumentError("finite-difference step must be positive");

    // Central weights on x + j h, j = -k..k.
    static const std::array<std::array<double, 7>, 3> weights{{
        {0.0, 0.0, -0.5, 0.0, 0.5, 0.0, 0.0},
        {0.0, -1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0, 0.0},
        {1.0 / 8.0, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -1.0 / 8.0},
    }};
    const auto& w = weights[static_cast<std::size_t>(order - 1)];

    double sum = 0.0;
    for (int j = -order; j <= order; ++j) {
        const double wj = w[static_cast<std::size_t>(j + 3)];
        const double xj = x + j * h;
        if (domain && !domain(xj)) throw DomainError("finite-difference stencil leaves the domain");
        if (wj != 0.0) sum += wj * f(xj);
    }
    return sum / std::pow(h, order);
}

}  // namespace eisenhart
