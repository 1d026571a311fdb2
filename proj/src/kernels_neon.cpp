// NEON kernels (aarch64). One float64x2_t holds a single complex value;
// complex products follow the usual swap/sign pattern. NEON is baseline on
// aarch64, so no runtime feature check is needed.

#include "kernels_variants.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace qlcause::kernels {
namespace {

// (-1, +1): even lane subtracts, odd lane adds
inline float64x2_t sign_sub_add() {
    static const double s[2] = {-1.0, 1.0};
    return vld1q_f64(s);
}

// (+1, -1): even lane adds, odd lane subtracts
inline float64x2_t sign_add_sub() {
    static const double s[2] = {1.0, -1.0};
    return vld1q_f64(s);
}

// a*b as complex values: (ar*br - ai*bi, ar*bi + ai*br)
inline float64x2_t cmul1(float64x2_t a, float64x2_t b) {
    float64x2_t ar = vdupq_laneq_f64(a, 0);
    float64x2_t ai = vdupq_laneq_f64(a, 1);
    float64x2_t bs = vextq_f64(b, b, 1); // (bi, br)
    float64x2_t t = vmulq_f64(ar, b);
    return vfmaq_f64(t, vmulq_f64(ai, bs), sign_sub_add());
}

void matvec_neon(const Complex* m, std::size_t rows, std::size_t cols,
                 const Complex* x, Complex* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = reinterpret_cast<const double*>(m + r * cols);
        float64x2_t acc = vdupq_n_f64(0.0);
        for (std::size_t j = 0; j < cols; ++j)
            acc = vaddq_f64(
                acc, cmul1(vld1q_f64(row + 2 * j), vld1q_f64(xd + 2 * j)));
        double out[2];
        vst1q_f64(out, acc);
        y[r] = Complex{out[0], out[1]};
    }
}

void matmul_neon(const Complex* a, const Complex* b, std::size_t m,
                 std::size_t k, std::size_t n, Complex* c) {
    for (std::size_t i = 0; i < m; ++i) {
        Complex* crow = c + i * n;
        double* crowd = reinterpret_cast<double*>(crow);
        for (std::size_t j = 0; j < n; ++j)
            crow[j] = Complex{0.0, 0.0};
        for (std::size_t p = 0; p < k; ++p) {
            const double* av = reinterpret_cast<const double*>(a + i * k + p);
            float64x2_t aip = vld1q_f64(av);
            const double* brow = reinterpret_cast<const double*>(b + p * n);
            for (std::size_t j = 0; j < n; ++j) {
                float64x2_t cv = vld1q_f64(crowd + 2 * j);
                vst1q_f64(crowd + 2 * j,
                          vaddq_f64(cv, cmul1(aip, vld1q_f64(brow + 2 * j))));
            }
        }
    }
}

Complex dotc_neon(const Complex* x, const Complex* y, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t xv = vld1q_f64(xd + 2 * i);
        float64x2_t yv = vld1q_f64(yd + 2 * i);
        float64x2_t xr = vdupq_laneq_f64(xv, 0);
        float64x2_t xi = vdupq_laneq_f64(xv, 1);
        float64x2_t ys = vextq_f64(yv, yv, 1);
        // even: xr*yr + xi*yi, odd: xr*yi - xi*yr
        float64x2_t t = vmulq_f64(xr, yv);
        acc = vaddq_f64(
            acc, vfmaq_f64(t, vmulq_f64(xi, ys), sign_add_sub()));
    }
    double out[2];
    vst1q_f64(out, acc);
    return Complex{out[0], out[1]};
}

double norm2_neon(const Complex* x, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const std::size_t nd = 2 * n;
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= nd; i += 2) {
        float64x2_t v = vld1q_f64(xd + i);
        acc = vfmaq_f64(acc, v, v);
    }
    double sum = vaddvq_f64(acc);
    for (; i < nd; ++i)
        sum += xd[i] * xd[i];
    return sum;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double sum = vaddvq_f64(acc);
    for (; i < n; ++i)
        sum += a[i] * b[i];
    return sum;
}

constexpr Ops kNeonOps{"neon",    matvec_neon, matmul_neon,
                       dotc_neon, norm2_neon,  dot_neon};

} // namespace

namespace detail {
const Ops* neon_ops() { return &kNeonOps; }
} // namespace detail

} // namespace qlcause::kernels

#else

namespace qlcause::kernels::detail {
const Ops* neon_ops() { return nullptr; }
} // namespace qlcause::kernels::detail

#endif
