#pragma once
// Dense complex vectors and matrices at the small, runtime-chosen
// dimensions this project needs (2, 3, 6, 12), plus the structural
// predicates used to validate projectors and commutators.
//
// Values are immutable in spirit: every operation returns a fresh value and
// nothing here mutates shared state, so concurrent use is unrestricted.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "qlcause/kernels.hpp"

namespace qlcause {

using Complex = std::complex<double>;

// Structural tolerance for projector/Hermitian checks; matrices here are at
// most 12x12, so near machine precision is attainable.
inline constexpr double kStructuralTol = 1e-10;
// Tolerance for norms and unit-vector checks.
inline constexpr double kNormTol = 1e-12;

class ComplexVector {
  public:
    ComplexVector() = default;
    explicit ComplexVector(std::size_t dim) : entries_(dim) {}
    ComplexVector(std::initializer_list<Complex> entries);
    explicit ComplexVector(std::vector<Complex> entries);

    // k-th standard basis vector of the given dimension
    static ComplexVector basis(std::size_t dim, std::size_t k);

    std::size_t dim() const { return entries_.size(); }
    Complex& operator[](std::size_t i) { return entries_[i]; }
    const Complex& operator[](std::size_t i) const { return entries_[i]; }
    Complex* data() { return entries_.data(); }
    const Complex* data() const { return entries_.data(); }

  private:
    std::vector<Complex> entries_;
};

class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols) {}
    // row-major entries; throws on size mismatch or non-finite entries
    ComplexMatrix(std::size_t rows, std::size_t cols,
                  std::vector<Complex> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::initializer_list<Complex> d);
    static ComplexMatrix diagonal(const std::vector<Complex>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Complex& at(std::size_t r, std::size_t c) {
        return entries_[r * cols_ + c];
    }
    const Complex& at(std::size_t r, std::size_t c) const {
        return entries_[r * cols_ + c];
    }
    Complex* data() { return entries_.data(); }
    const Complex* data() const { return entries_.data(); }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

// Kronecker products, first-factor-major:
//   (m1 (x) m2)[i1*R2 + i2, j1*C2 + j2] = m1[i1,j1] * m2[i2,j2]
//   (u  (x) v )[i*dim(v) + j]           = u[i] * v[j]
ComplexMatrix kron(const ComplexMatrix& m1, const ComplexMatrix& m2);
ComplexVector kron(const ComplexVector& u, const ComplexVector& v);

// Matrix product / matrix-vector product; throw on dimension mismatch.
ComplexMatrix compose(const ComplexMatrix& m1, const ComplexMatrix& m2);
ComplexVector apply(const ComplexMatrix& m, const ComplexVector& v);

ComplexMatrix adjoint(const ComplexMatrix& m);
Complex trace(const ComplexMatrix& m); // throws unless square

// Conjugate-linear in the first argument: sum_i conj(u_i) v_i
Complex inner(const ComplexVector& u, const ComplexVector& v);

// Squared Euclidean norm.
double norm2(const ComplexVector& v);

// True iff max|m - m^+| <= tol and max|m m - m| <= tol.
bool is_projector(const ComplexMatrix& m, double tol = kStructuralTol);

// max-entry magnitude of pq - qp; throws unless both are square and equal
// in dimension.
double commutator_norm(const ComplexMatrix& p, const ComplexMatrix& q);

// Entrywise helpers.
double max_abs(const ComplexMatrix& m);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, const ComplexMatrix& m);
ComplexVector operator*(Complex s, const ComplexVector& v);

} // namespace qlcause
