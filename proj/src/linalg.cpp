#include "qlcause/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qlcause {
namespace {

void require_finite(const Complex& z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument(std::string(what) +
                                    ": non-finite entry rejected");
}

void require(bool ok, const char* msg) {
    if (!ok)
        throw std::invalid_argument(msg);
}

} // namespace

ComplexVector::ComplexVector(std::initializer_list<Complex> entries)
    : entries_(entries) {
    for (const Complex& z : entries_)
        require_finite(z, "ComplexVector");
}

ComplexVector::ComplexVector(std::vector<Complex> entries)
    : entries_(std::move(entries)) {
    for (const Complex& z : entries_)
        require_finite(z, "ComplexVector");
}

ComplexVector ComplexVector::basis(std::size_t dim, std::size_t k) {
    require(k < dim, "basis: index out of range");
    ComplexVector v(dim);
    v[k] = Complex{1.0, 0.0};
    return v;
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    require(entries_.size() == rows_ * cols_,
            "ComplexMatrix: entry count must equal rows*cols");
    for (const Complex& z : entries_)
        require_finite(z, "ComplexMatrix");
}

ComplexMatrix::ComplexMatrix(
    std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        require(row.size() == cols_, "ComplexMatrix: ragged rows");
        for (const Complex& z : row) {
            require_finite(z, "ComplexMatrix");
            entries_.push_back(z);
        }
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.at(i, i) = Complex{1.0, 0.0};
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<Complex> d) {
    return diagonal(std::vector<Complex>(d));
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<Complex>& d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        require_finite(d[i], "ComplexMatrix");
        m.at(i, i) = d[i];
    }
    return m;
}

ComplexMatrix kron(const ComplexMatrix& m1, const ComplexMatrix& m2) {
    const std::size_t r1 = m1.rows(), c1 = m1.cols();
    const std::size_t r2 = m2.rows(), c2 = m2.cols();
    ComplexMatrix out(r1 * r2, c1 * c2);
    for (std::size_t i1 = 0; i1 < r1; ++i1)
        for (std::size_t j1 = 0; j1 < c1; ++j1) {
            const Complex a = m1.at(i1, j1);
            for (std::size_t i2 = 0; i2 < r2; ++i2)
                for (std::size_t j2 = 0; j2 < c2; ++j2)
                    out.at(i1 * r2 + i2, j1 * c2 + j2) = a * m2.at(i2, j2);
        }
    return out;
}

ComplexVector kron(const ComplexVector& u, const ComplexVector& v) {
    ComplexVector out(u.dim() * v.dim());
    for (std::size_t i = 0; i < u.dim(); ++i)
        for (std::size_t j = 0; j < v.dim(); ++j)
            out[i * v.dim() + j] = u[i] * v[j];
    return out;
}

ComplexMatrix compose(const ComplexMatrix& m1, const ComplexMatrix& m2) {
    require(m1.cols() == m2.rows(), "compose: inner dimensions must match");
    ComplexMatrix out(m1.rows(), m2.cols());
    kernels::active().matmul(m1.data(), m2.data(), m1.rows(), m1.cols(),
                             m2.cols(), out.data());
    return out;
}

ComplexVector apply(const ComplexMatrix& m, const ComplexVector& v) {
    require(m.cols() == v.dim(), "apply: dimension mismatch");
    ComplexVector out(m.rows());
    kernels::active().matvec(m.data(), m.rows(), m.cols(), v.data(),
                             out.data());
    return out;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
    ComplexMatrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            out.at(c, r) = std::conj(m.at(r, c));
    return out;
}

Complex trace(const ComplexMatrix& m) {
    require(m.square(), "trace: matrix must be square");
    Complex t{0.0, 0.0};
    for (std::size_t i = 0; i < m.rows(); ++i)
        t += m.at(i, i);
    return t;
}

Complex inner(const ComplexVector& u, const ComplexVector& v) {
    require(u.dim() == v.dim(), "inner: dimension mismatch");
    return kernels::active().dotc(u.data(), v.data(), u.dim());
}

double norm2(const ComplexVector& v) {
    return kernels::active().norm2(v.data(), v.dim());
}

bool is_projector(const ComplexMatrix& m, double tol) {
    if (!m.square())
        return false;
    if (max_abs_diff(m, adjoint(m)) > tol)
        return false;
    return max_abs_diff(compose(m, m), m) <= tol;
}

double commutator_norm(const ComplexMatrix& p, const ComplexMatrix& q) {
    require(p.square() && q.square() && p.rows() == q.rows(),
            "commutator_norm: matrices must be square of equal dimension");
    return max_abs_diff(compose(p, q), compose(q, p));
}

double max_abs(const ComplexMatrix& m) {
    double best = 0.0;
    const Complex* e = m.data();
    for (std::size_t i = 0; i < m.rows() * m.cols(); ++i)
        best = std::max(best, std::abs(e[i]));
    return best;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(),
            "max_abs_diff: shape mismatch");
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
        best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
    return best;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(),
            "matrix +: shape mismatch");
    ComplexMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
        out.data()[i] = a.data()[i] + b.data()[i];
    return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(),
            "matrix -: shape mismatch");
    ComplexMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
        out.data()[i] = a.data()[i] - b.data()[i];
    return out;
}

ComplexMatrix operator*(Complex s, const ComplexMatrix& m) {
    ComplexMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows() * m.cols(); ++i)
        out.data()[i] = s * m.data()[i];
    return out;
}

ComplexVector operator*(Complex s, const ComplexVector& v) {
    ComplexVector out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i)
        out[i] = s * v[i];
    return out;
}

} // namespace qlcause
