#pragma once

#include <array>
#include <functional>

namespace eisenhart {

/// Value of a function of one variable and its first three derivatives.
using Jet = std::array<double, 4>;

/// A function of one variable that reports its own derivatives up to order 3.
using JetFunction = std::function<Jet(double)>;

inline Jet jet_constant(double c) { return {c, 0.0, 0.0, 0.0}; }

inline Jet operator+(const Jet& a, const Jet& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

inline Jet operator*(double s, const Jet& a) {
    return {s * a[0], s * a[1], s * a[2], s * a[3]};
}

// Leibniz rule truncated at third order.
inline Jet operator*(const Jet& a, const Jet& b) {
    return {a[0] * b[0],
            a[1] * b[0] + a[0] * b[1],
            a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
            a[3] * b[0] + 3.0 * a[2] * b[1] + 3.0 * a[1] * b[2] + a[0] * b[3]};
}

// 1/f; caller guarantees f != 0.
inline Jet reciprocal(const Jet& f) {
    const double f0 = f[0], f1 = f[1], f2 = f[2], f3 = f[3];
    const double inv = 1.0 / f0;
    const double inv2 = inv * inv;
    return {inv,
            -f1 * inv2,
            (2.0 * f1 * f1 - f0 * f2) * inv2 * inv,
            (-6.0 * f1 * f1 * f1 + 6.0 * f0 * f1 * f2 - f0 * f0 * f3) * inv2 * inv2};
}

}  // namespace eisenhart
