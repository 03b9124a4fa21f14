#include "eisenhart/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "eisenhart/errors.hpp"

namespace eisenhart::kernels {

namespace {

double second_difference_scalar(const double* y, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        m = std::max(m, std::abs((y[i - 1] + y[i + 1]) - 2.0 * y[i]));
    }
    return m;
}

double abs_difference_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Nearest nearest_scalar(const double* query, const PointCloud& cloud) {
    Nearest best{0, INFINITY};
    const std::size_t d = cloud.dim();
    for (std::size_t j = 0; j < cloud.size(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = query[k] - cloud.columns[k][j];
            s += diff * diff;
        }
        if (s < best.distance_sq) best = {j, s};
    }
    return best;
}

void check_cloud(const PointCloud& c) {
    for (const auto& col : c.columns) {
        if (col.size() != c.size()) throw ArgumentError("point cloud columns differ in length");
    }
}

Isa resolve(Isa isa) {
    return isa == Isa::Avx2 && avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(EISENHART_HAVE_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok;
#else
    return false;
#endif
}

Isa active_isa() {
    static const Isa isa = [] {
        const char* env = std::getenv("EISENHART_SIMD");
        if (env && std::string(env) == "scalar") return Isa::Scalar;
        return avx2_available() ? Isa::Avx2 : Isa::Scalar;
    }();
    return isa;
}

double max_abs_second_difference(std::span<const double> y, double h, Isa isa) {
    if (!(h > 0.0)) throw ArgumentError("grid spacing must be positive");
    if (y.size() < 3) return 0.0;
    const double m = resolve(isa) == Isa::Avx2 ? detail::second_difference_avx2(y.data(), y.size())
                                               : second_difference_scalar(y.data(), y.size());
    return m / (h * h);
}

double max_abs_second_difference(std::span<const double> y, double h) {
    return max_abs_second_difference(y, h, active_isa());
}

double max_abs_difference(std::span<const double> a, std::span<const double> b, Isa isa) {
    if (a.size() != b.size()) throw ArgumentError("sizes differ");
    return resolve(isa) == Isa::Avx2 ? detail::abs_difference_avx2(a.data(), b.data(), a.size())
                                     : abs_difference_scalar(a.data(), b.data(), a.size());
}

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
    return max_abs_difference(a, b, active_isa());
}

std::vector<Nearest> nearest_points(const PointCloud& queries, const PointCloud& cloud, Isa isa) {
    check_cloud(queries);
    check_cloud(cloud);
    if (queries.dim() != cloud.dim()) throw ArgumentError("point clouds differ in dimension");
    if (cloud.size() == 0) throw ArgumentError("empty point cloud");
    const bool wide = resolve(isa) == Isa::Avx2;
    std::vector<Nearest> out(queries.size());
    std::vector<double> q(queries.dim());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        for (std::size_t k = 0; k < q.size(); ++k) q[k] = queries.columns[k][i];
        out[i] = wide ? detail::nearest_avx2(q.data(), cloud) : nearest_scalar(q.data(), cloud);
    }
    return out;
}

std::vector<Nearest> nearest_points(const PointCloud& queries, const PointCloud& cloud) {
    return nearest_points(queries, cloud, active_isa());
}

}  // namespace eisenhart::kernels
