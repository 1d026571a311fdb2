// Scalar reference kernels. Deliberately plain loops: this is the
// implementation the SIMD variants are equivalence-tested against.

#include "qlcause/kernels.hpp"

namespace qlcause::kernels {
namespace {

void matvec_scalar(const Complex* m, std::size_t rows, std::size_t cols,
                   const Complex* x, Complex* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const Complex* row = m + r * cols;
        Complex acc{0.0, 0.0};
        for (std::size_t j = 0; j < cols; ++j)
            acc += row[j] * x[j];
        y[r] = acc;
    }
}

void matmul_scalar(const Complex* a, const Complex* b, std::size_t m,
                   std::size_t k, std::size_t n, Complex* c) {
    for (std::size_t i = 0; i < m; ++i) {
        Complex* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j)
            crow[j] = Complex{0.0, 0.0};
        for (std::size_t p = 0; p < k; ++p) {
            const Complex aip = a[i * k + p];
            const Complex* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j)
                crow[j] += aip * brow[j];
        }
    }
}

Complex dotc_scalar(const Complex* x, const Complex* y, std::size_t n) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
        acc += std::conj(x[i]) * y[i];
    return acc;
}

double norm2_scalar(const Complex* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i] * b[i];
    return acc;
}

constexpr Ops kScalarOps{"scalar",    matvec_scalar, matmul_scalar,
                         dotc_scalar, norm2_scalar,  dot_scalar};

} // namespace

const Ops& scalar() { return kScalarOps; }

} // namespace qlcause::kernels
