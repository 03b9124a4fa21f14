#include "eisenhart/kernels.hpp"

#include <algorithm>
#include <cmath>

#if defined(EISENHART_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace eisenhart::kernels::detail {

#if defined(EISENHART_HAVE_AVX2)

namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline double hmax(__m256d v) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

}  // namespace

double second_difference_avx2(const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 1;
    for (; i + 4 < n; i += 4) {
        const __m256d lo = _mm256_loadu_pd(y + i - 1);
        const __m256d mid = _mm256_loadu_pd(y + i);
        const __m256d hi = _mm256_loadu_pd(y + i + 1);
        const __m256d d = _mm256_sub_pd(_mm256_add_pd(lo, hi), _mm256_mul_pd(two, mid));
        acc = _mm256_max_pd(acc, abs_pd(d));
    }
    double m = hmax(acc);
    for (; i + 1 < n; ++i) m = std::max(m, std::abs((y[i - 1] + y[i + 1]) - 2.0 * y[i]));
    return m;
}

double abs_difference_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_max_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
    }
    double m = hmax(acc);
    for (; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Nearest nearest_avx2(const double* query, const PointCloud& cloud) {
    const std::size_t d = cloud.dim();
    const std::size_t n = cloud.size();
    __m256d best = _mm256_set1_pd(INFINITY);
    __m256d best_idx = _mm256_set1_pd(0.0);
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d four = _mm256_set1_pd(4.0);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d s = _mm256_setzero_pd();
        for (std::size_t k = 0; k < d; ++k) {
            const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(query[k]), _mm256_loadu_pd(cloud.columns[k].data() + j));
            s = _mm256_add_pd(s, _mm256_mul_pd(diff, diff));
        }
        const __m256d lt = _mm256_cmp_pd(s, best, _CMP_LT_OQ);
        best = _mm256_blendv_pd(best, s, lt);
        best_idx = _mm256_blendv_pd(best_idx, idx, lt);
        idx = _mm256_add_pd(idx, four);
    }
    alignas(32) double bv[4], bi[4];
    _mm256_store_pd(bv, best);
    _mm256_store_pd(bi, best_idx);
    Nearest out{0, INFINITY};
    for (int l = 0; l < 4; ++l) {
        const auto li = static_cast<std::size_t>(bi[l]);
        if (bv[l] < out.distance_sq || (bv[l] == out.distance_sq && li < out.index)) out = {li, bv[l]};
    }
    for (; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = query[k] - cloud.columns[k][j];
            s += diff * diff;
        }
        if (s < out.distance_sq) out = {j, s};
    }
    return out;
}

#else

double second_difference_avx2(const double*, std::size_t) { return 0.0; }
double abs_difference_avx2(const double*, const double*, std::size_t) { return 0.0; }
Nearest nearest_avx2(const double*, const PointCloud&) { return {}; }

#endif

}  // namespace eisenhart::kernels::detail
