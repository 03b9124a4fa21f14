#pragma once

#include <stdexcept>
#include <string>

namespace eisenhart {

// Point outside the admissible region of a potential, chart or map.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Bad argument value (unsupported derivative order, unknown label, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation requested for a chart of the wrong dimension.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Lift cannot be constructed with the requested data.
class ConstructionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class LinearAlgebraError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Integrator ran out of steps or could not make progress.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ReparametrizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quadrature or root finding failed to converge; also raised when an
// internal consistency check (tensor symmetries, FD cross-check) fails.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace eisenhart
