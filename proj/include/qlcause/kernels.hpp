#pragma once
// Runtime-dispatched arithmetic kernels for the dense complex inner loops.
//
// Every variant computes the same quantity; results may differ from the
// scalar reference by a few ulp (summation order, FMA contraction). The
// active variant is chosen once per process: QLCAUSE_KERNELS=<name> forces
// a variant, otherwise the best one supported by the host CPU wins.

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

namespace qlcause::kernels {

using Complex = std::complex<double>;

// Function table for one kernel variant.
struct Ops {
    const char* name;

    // y = m x, row-major (rows x cols), y must not alias m or x
    void (*matvec)(const Complex* m, std::size_t rows, std::size_t cols,
                   const Complex* x, Complex* y);

    // c = a b, row-major (m x k)(k x n), c must not alias a or b
    void (*matmul)(const Complex* a, const Complex* b, std::size_t m,
                   std::size_t k, std::size_t n, Complex* c);

    // sum_i conj(x_i) y_i
    Complex (*dotc)(const Complex* x, const Complex* y, std::size_t n);

    // sum_i |x_i|^2
    double (*norm2)(const Complex* x, std::size_t n);

    // sum_i a_i b_i
    double (*dot)(const double* a, const double* b, std::size_t n);
};

// The portable reference implementation (always available).
const Ops& scalar();

// Variant selected for this process.
const Ops& active();

// All variants usable on this host, scalar first.
std::vector<const Ops*> available();

// Force a variant by name ("scalar", "avx2", "neon"). Returns false and
// leaves the selection unchanged if the variant is unavailable.
bool select(std::string_view name);

} // namespace qlcause::kernels
