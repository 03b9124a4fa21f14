#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <limits>
#include <random>
#include <vector>

#include "eisenhart/kernels.hpp"

using namespace eisenhart::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale) {
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

PointCloud random_cloud(std::mt19937_64& rng, std::size_t dim, std::size_t n) {
    PointCloud c;
    for (std::size_t k = 0; k < dim; ++k) c.columns.push_back(random_vector(rng, n, 1.0));
    return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("scalar kernels against brute force") {
    std::mt19937_64 rng(11);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 7u, 64u, 1001u}) {
        const auto y = random_vector(rng, n, 3.0);
        const double h = 0.01;
        double expected = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            expected = std::max(expected, std::abs((y[i - 1] + y[i + 1]) - 2.0 * y[i]) / (h * h));
        }
        CHECK(max_abs_second_difference(y, h, Isa::Scalar) == expected);

        const auto z = random_vector(rng, n, 3.0);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(y[i] - z[i]));
        CHECK(max_abs_difference(y, z, Isa::Scalar) == diff);
    }

    const auto q = random_cloud(rng, 3, 50);
    const auto c = random_cloud(rng, 3, 333);
    const auto r = nearest_points(q, c, Isa::Scalar);
    REQUIRE(r.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < 3; ++k) d += std::pow(q.columns[k][i] - c.columns[k][j], 2);
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        CHECK(r[i].index == arg);
        CHECK(r[i].distance_sq == doctest::Approx(best).epsilon(1e-14));
    }
}

TEST_CASE("nearest point ties pick the lowest index") {
    PointCloud c{{{1.0, -1.0, 1.0, 0.0}, {0.0, 0.0, 0.0, 5.0}}};
    PointCloud q{{{0.0}, {0.0}}};
    for (Isa isa : {Isa::Scalar, active_isa()}) {
        const auto r = nearest_points(q, c, isa);
        CHECK(r[0].index == 0);
        CHECK(r[0].distance_sq == 1.0);
    }
}

TEST_CASE("avx2 kernels are bitwise identical to the scalar ones") {
    if (!avx2_available()) {
        MESSAGE("AVX2 not available; only the scalar path is exercised");
        return;
    }
    std::mt19937_64 rng(5);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u, 9u, 31u, 1000u, 4099u}) {
        CAPTURE(n);
        const auto y = random_vector(rng, n, 1e3);
        const auto z = random_vector(rng, n, 1e-3);
        CHECK(same_bits(max_abs_second_difference(y, 0.37, Isa::Scalar), max_abs_second_difference(y, 0.37, Isa::Avx2)));
        CHECK(same_bits(max_abs_difference(y, z, Isa::Scalar), max_abs_difference(y, z, Isa::Avx2)));
    }
    for (std::size_t dim : {1u, 2u, 3u, 4u}) {
        for (std::size_t n : {1u, 3u, 4u, 5u, 17u, 400u}) {
            const auto q = random_cloud(rng, dim, 40);
            const auto c = random_cloud(rng, dim, n);
            const auto a = nearest_points(q, c, Isa::Scalar);
            const auto b = nearest_points(q, c, Isa::Avx2);
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(a[i].index == b[i].index);
                CHECK(same_bits(a[i].distance_sq, b[i].distance_sq));
            }
        }
    }
}

TEST_CASE("dispatch") {
    CHECK((to_string(Isa::Scalar) == "scalar"));
    const auto isa = active_isa();
    if (!avx2_available()) CHECK(isa == Isa::Scalar);
    const char* forced = std::getenv("EISENHART_SIMD");
    if (forced && std::string(forced) == "scalar") CHECK(isa == Isa::Scalar);
    const std::vector<double> y{0.0, 1.0, 4.0, 9.0, 16.0};
    CHECK(max_abs_second_difference(y, 1.0) == 2.0);
    CHECK(max_abs_second_difference(std::vector<double>{1.0, 2.0}, 1.0) == 0.0);
    CHECK_THROWS(max_abs_difference(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}));
    CHECK_THROWS(nearest_points(PointCloud{{{0.0}}}, PointCloud{}));
}
