// AVX2+FMA kernels (x86-64). Complex values are interleaved (re, im), so a
// __m256d lane group holds two complex numbers. Complex products use the
// fmaddsub pattern: even lanes ar*br - ai*bi, odd lanes ar*bi + ai*br.
//
// Compiled via target attributes; entered only after a cpuid check, so the
// binary stays runnable on hosts without AVX2.

#include "kernels_variants.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace qlcause::kernels {
namespace {

#define QLCAUSE_AVX2 __attribute__((target("avx2,fma")))

QLCAUSE_AVX2 inline __m256d cmul2(__m256d a, __m256d b) {
    __m256d ar = _mm256_movedup_pd(a);      // (ar0, ar0, ar1, ar1)
    __m256d ai = _mm256_permute_pd(a, 0xF); // (ai0, ai0, ai1, ai1)
    __m256d bs = _mm256_permute_pd(b, 0x5); // (bi0, br0, bi1, br1)
    return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bs));
}

// (sum of even lanes, sum of odd lanes)
QLCAUSE_AVX2 inline Complex hsum_complex(__m256d acc) {
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d s = _mm_add_pd(lo, hi);
    double out[2];
    _mm_storeu_pd(out, s);
    return Complex{out[0], out[1]};
}

QLCAUSE_AVX2 inline double hsum_double(__m256d acc) {
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d s = _mm_add_pd(lo, hi);
    __m128d sw = _mm_unpackhi_pd(s, s);
    return _mm_cvtsd_f64(_mm_add_sd(s, sw));
}

QLCAUSE_AVX2 void matvec_avx2(const Complex* m, std::size_t rows,
                              std::size_t cols, const Complex* x, Complex* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = reinterpret_cast<const double*>(m + r * cols);
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 2 <= cols; j += 2)
            acc = _mm256_add_pd(acc, cmul2(_mm256_loadu_pd(row + 2 * j),
                                           _mm256_loadu_pd(xd + 2 * j)));
        Complex sum = hsum_complex(acc);
        for (; j < cols; ++j)
            sum += m[r * cols + j] * x[j];
        y[r] = sum;
    }
}

QLCAUSE_AVX2 void matmul_avx2(const Complex* a, const Complex* b,
                              std::size_t m, std::size_t k, std::size_t n,
                              Complex* c) {
    for (std::size_t i = 0; i < m; ++i) {
        Complex* crow = c + i * n;
        double* crowd = reinterpret_cast<double*>(crow);
        for (std::size_t j = 0; j < n; ++j)
            crow[j] = Complex{0.0, 0.0};
        for (std::size_t p = 0; p < k; ++p) {
            const Complex aip = a[i * k + p];
            const __m256d ar = _mm256_set1_pd(aip.real());
            const __m256d ai = _mm256_set1_pd(aip.imag());
            const double* brow = reinterpret_cast<const double*>(b + p * n);
            std::size_t j = 0;
            for (; j + 2 <= n; j += 2) {
                __m256d bv = _mm256_loadu_pd(brow + 2 * j);
                __m256d bs = _mm256_permute_pd(bv, 0x5);
                __m256d prod =
                    _mm256_fmaddsub_pd(ar, bv, _mm256_mul_pd(ai, bs));
                _mm256_storeu_pd(crowd + 2 * j,
                                 _mm256_add_pd(_mm256_loadu_pd(crowd + 2 * j),
                                               prod));
            }
            for (; j < n; ++j)
                crow[j] += aip * b[p * n + j];
        }
    }
}

QLCAUSE_AVX2 Complex dotc_avx2(const Complex* x, const Complex* y,
                               std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        __m256d xr = _mm256_movedup_pd(xv);
        __m256d xi = _mm256_permute_pd(xv, 0xF);
        __m256d ys = _mm256_permute_pd(yv, 0x5);
        // even: xr*yr + xi*yi, odd: xr*yi - xi*yr
        acc = _mm256_add_pd(
            acc, _mm256_fmsubadd_pd(xr, yv, _mm256_mul_pd(xi, ys)));
    }
    Complex sum = hsum_complex(acc);
    for (; i < n; ++i)
        sum += std::conj(x[i]) * y[i];
    return sum;
}

QLCAUSE_AVX2 double norm2_avx2(const Complex* x, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const std::size_t nd = 2 * n;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= nd; i += 4) {
        __m256d v = _mm256_loadu_pd(xd + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double sum = hsum_double(acc);
    for (; i < nd; ++i)
        sum += xd[i] * xd[i];
    return sum;
}

QLCAUSE_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                              acc);
    double sum = hsum_double(acc);
    for (; i < n; ++i)
        sum += a[i] * b[i];
    return sum;
}

constexpr Ops kAvx2Ops{"avx2",      matvec_avx2, matmul_avx2,
                       dotc_avx2,   norm2_avx2,  dot_avx2};

} // namespace

namespace detail {

const Ops* avx2_ops() {
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return &kAvx2Ops;
    return nullptr;
}

} // namespace detail
} // namespace qlcause::kernels

#else

namespace qlcause::kernels::detail {
const Ops* avx2_ops() { return nullptr; }
} // namespace qlcause::kernels::detail

#endif
