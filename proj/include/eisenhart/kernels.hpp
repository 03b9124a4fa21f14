#pragma once

// Data-parallel reductions used by the verification code. Each kernel has a
// scalar reference and, on x86-64, an AVX2 variant chosen at runtime. The
// variants perform the same floating-point operations in the same order per
// element, so results are bitwise identical.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace eisenhart::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// True when the AVX2 variants were compiled in and the CPU supports them.
bool avx2_available();

/// Best available ISA; EISENHART_SIMD=scalar forces the reference path.
Isa active_isa();

/// Points stored as one column per dimension.
struct PointCloud {
    std::vector<std::vector<double>> columns;

    std::size_t dim() const { return columns.size(); }
    std::size_t size() const { return columns.empty() ? 0 : columns.front().size(); }
};

struct Nearest {
    std::size_t index = 0;  // lowest index among ties
    double distance_sq = 0.0;
};

/// max_i |y[i-1] - 2 y[i] + y[i+1]| / h^2 over interior points (0 if fewer than 3).
double max_abs_second_difference(std::span<const double> y, double h, Isa isa);
double max_abs_second_difference(std::span<const double> y, double h);

/// max_i |a[i] - b[i]|. Sizes must match.
double max_abs_difference(std::span<const double> a, std::span<const double> b, Isa isa);
double max_abs_difference(std::span<const double> a, std::span<const double> b);

/// For every point of `queries`, the nearest point of `cloud` (squared
/// Euclidean distance). Dimensions must match and `cloud` must be non-empty.
std::vector<Nearest> nearest_points(const PointCloud& queries, const PointCloud& cloud, Isa isa);
std::vector<Nearest> nearest_points(const PointCloud& queries, const PointCloud& cloud);

namespace detail {
double second_difference_avx2(const double* y, std::size_t n);
double abs_difference_avx2(const double* a, const double* b, std::size_t n);
Nearest nearest_avx2(const double* query, const PointCloud& cloud);
}  // namespace detail

}  // namespace eisenhart::kernels
