#include "curvkit/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>

namespace curvkit::kernels {

namespace {

// exp() for 4 doubles, Cephes-style Pade approximant after range reduction
// x = n*ln2 + r. Accuracy ~2 ulp on [-708, 709]; inputs below the normal
// range are clamped (the corresponding kernel terms are zero anyway).
inline __m256d vexp_pd(__m256d x) {
    const __m256d max_x = _mm256_set1_pd(709.437);
    const __m256d min_x = _mm256_set1_pd(-708.3964185322641);
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);

    const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
    const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
    const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
    const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
    const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
    const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
    const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);

    x = _mm256_min_pd(max_x, _mm256_max_pd(min_x, x));

    // n = floor(x*log2(e) + 1/2), then r = x - n*ln2 via the split constant
    const __m256d n = _mm256_floor_pd(_mm256_fmadd_pd(x, log2e, half));
    x = _mm256_fnmadd_pd(n, c1, x);
    x = _mm256_fnmadd_pd(n, c2, x);

    const __m256d xx = _mm256_mul_pd(x, x);
    __m256d px = _mm256_fmadd_pd(p0, xx, p1);
    px = _mm256_fmadd_pd(px, xx, p2);
    px = _mm256_mul_pd(px, x);
    __m256d qx = _mm256_fmadd_pd(q0, xx, q1);
    qx = _mm256_fmadd_pd(qx, xx, q2);
    qx = _mm256_fmadd_pd(qx, xx, q3);

    const __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    __m256d result = _mm256_fmadd_pd(e, _mm256_set1_pd(2.0), one);

    // scale by 2^n through the exponent bits
    const __m128i n32 = _mm256_cvttpd_epi32(n);
    const __m256i n64 = _mm256_cvtepi32_epi64(n32);
    const __m256i bits =
        _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(result, _mm256_castsi256_pd(bits));
}

inline double hsum_pd(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d sum2 = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2)));
}

std::size_t count_leq_avx2(const double* d, std::size_t n, double r) {
    const __m256d vr = _mm256_set1_pd(r);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vd = _mm256_loadu_pd(d + i);
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(vd, vr, _CMP_LE_OQ));
        count += static_cast<std::size_t>(__builtin_popcount(mask));
    }
    for (; i < n; ++i)
        if (d[i] <= r) ++count;
    return count;
}

double sum_recip_leq_avx2(const double* d, const double* recip,
                          std::size_t n, double r) {
    const __m256d vr = _mm256_set1_pd(r);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vd = _mm256_loadu_pd(d + i);
        const __m256d mask = _mm256_cmp_pd(vd, vr, _CMP_LE_OQ);
        const __m256d vrec = _mm256_loadu_pd(recip + i);
        acc = _mm256_add_pd(acc, _mm256_and_pd(mask, vrec));
    }
    double sum = hsum_pd(acc);
    for (; i < n; ++i)
        if (d[i] <= r) sum += recip[i];
    return sum;
}

double gaussian_sum_avx2(const double* d, std::size_t n, double inv_h) {
    const __m256d vih = _mm256_set1_pd(inv_h);
    const __m256d mhalf = _mm256_set1_pd(-0.5);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d u = _mm256_mul_pd(_mm256_loadu_pd(d + i), vih);
        const __m256d arg = _mm256_mul_pd(mhalf, _mm256_mul_pd(u, u));
        acc = _mm256_add_pd(acc, vexp_pd(arg));
    }
    double sum = hsum_pd(acc);
    for (; i < n; ++i) {
        const double u = d[i] * inv_h;
        sum += std::exp(-0.5 * u * u);
    }
    return sum;
}

double biweight_sum_avx2(const double* d, std::size_t n, double inv_h) {
    const __m256d vih = _mm256_set1_pd(inv_h);
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d u = _mm256_mul_pd(_mm256_loadu_pd(d + i), vih);
        const __m256d mask = _mm256_cmp_pd(u, one, _CMP_LE_OQ);
        const __m256d t = _mm256_sub_pd(one, _mm256_mul_pd(u, u));
        acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_mul_pd(t, t)));
    }
    double sum = hsum_pd(acc);
    for (; i < n; ++i) {
        const double u = d[i] * inv_h;
        if (u <= 1.0) {
            const double t = 1.0 - u * u;
            sum += t * t;
        }
    }
    return sum;
}

} // namespace

const ops* avx2_ops() {
    static const ops table{
        &count_leq_avx2,
        &sum_recip_leq_avx2,
        &gaussian_sum_avx2,
        &biweight_sum_avx2,
        "avx2",
    };
    return &table;
}

} // namespace curvkit::kernels

#else // !(__AVX2__ && __FMA__)

namespace curvkit::kernels {

const ops* avx2_ops() {
    return nullptr;
}

} // namespace curvkit::kernels

#endif
