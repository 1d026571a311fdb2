#include "qlcause/quantum.hpp"

#include <cmath>
#include <random>

namespace qlcause {
namespace {

// Distinguishes rounding noise from logic errors before clamping.
double finalize_probability(double p) {
    if (p < -1e-9 || p > 1.0 + 1e-9)
        throw std::logic_error("probability out of [0,1] beyond tolerance: " +
                               std::to_string(p));
    if (p < 0.0)
        return 0.0;
    if (p > 1.0)
        return 1.0;
    return p;
}

void require_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) +
                                    ": dimension mismatch");
}

} // namespace

PureState::PureState(ComplexVector v) : vector_(std::move(v)) {
    const double n2 = norm2(vector_);
    if (std::abs(n2 - 1.0) > kNormTol)
        throw std::invalid_argument("PureState: vector is not unit norm");
}

PureState PureState::normalized(ComplexVector v) {
    const double n2 = norm2(v);
    if (n2 <= kZeroConditionNorm * kZeroConditionNorm)
        throw std::invalid_argument(
            "PureState::normalized: vector is numerically zero");
    const double inv = 1.0 / std::sqrt(n2);
    for (std::size_t i = 0; i < v.dim(); ++i)
        v[i] *= inv;
    return PureState(std::move(v), AlreadyUnit{});
}

DensityOperator::DensityOperator(ComplexMatrix m) : matrix_(std::move(m)) {
    if (!matrix_.square())
        throw std::invalid_argument("DensityOperator: matrix must be square");
    if (max_abs_diff(matrix_, adjoint(matrix_)) > kStructuralTol)
        throw std::invalid_argument("DensityOperator: not Hermitian");
    const Complex t = trace(matrix_);
    if (std::abs(t - Complex{1.0, 0.0}) > kStructuralTol)
        throw std::invalid_argument("DensityOperator: trace must be 1");
    // positivity probe on fixed pseudo-random directions
    std::mt19937_64 gen(0x51CABA5Eu);
    for (int probe = 0; probe < 16; ++probe) {
        ComplexVector v(matrix_.rows());
        for (std::size_t i = 0; i < v.dim(); ++i) {
            const double re = (gen() >> 11) * 0x1.0p-53 - 0.5;
            const double im = (gen() >> 11) * 0x1.0p-53 - 0.5;
            v[i] = Complex{re, im};
        }
        const double q = inner(v, apply(matrix_, v)).real();
        if (q < -kStructuralTol)
            throw std::invalid_argument("DensityOperator: not positive");
    }
}

DensityOperator DensityOperator::pure(const PureState& s) {
    const ComplexVector& v = s.vector();
    ComplexMatrix m(v.dim(), v.dim());
    for (std::size_t r = 0; r < v.dim(); ++r)
        for (std::size_t c = 0; c < v.dim(); ++c)
            m.at(r, c) = v[r] * std::conj(v[c]);
    return DensityOperator(std::move(m));
}

ProjectorObservable::ProjectorObservable(ComplexMatrix m, std::string label)
    : matrix_(std::move(m)), label_(std::move(label)) {
    if (!is_projector(matrix_, kStructuralTol))
        throw std::invalid_argument("ProjectorObservable '" + label_ +
                                    "': matrix is not a projector");
}

ProjectorObservable::ProjectorObservable(ComplexMatrix m, std::string label,
                                         Trusted)
    : matrix_(std::move(m)), label_(std::move(label)) {}

ProjectorObservable ProjectorObservable::trusted(ComplexMatrix m,
                                                 std::string label) {
    return ProjectorObservable(std::move(m), std::move(label), Trusted{});
}

ProjectorObservable ProjectorObservable::complement() const {
    return ProjectorObservable::trusted(
        ComplexMatrix::identity(dim()) - matrix_, "not_" + label_);
}

double born_probability(const ProjectorObservable& p, const PureState& s) {
    require_dim(p.dim(), s.dim(), "born_probability");
    return finalize_probability(norm2(apply(p.matrix(), s.vector())));
}

double born_probability(const ProjectorObservable& p,
                        const DensityOperator& rho) {
    require_dim(p.dim(), rho.dim(), "born_probability");
    return finalize_probability(
        trace(compose(p.matrix(), rho.matrix())).real());
}

PureState luders_condition(const ProjectorObservable& p, const PureState& s) {
    require_dim(p.dim(), s.dim(), "luders_condition");
    ComplexVector projected = apply(p.matrix(), s.vector());
    if (norm2(projected) <= kZeroConditionNorm * kZeroConditionNorm)
        throw UndefinedConditional("undefined conditional: projection of '" +
                                   p.label() + "' has zero amplitude");
    return PureState::normalized(std::move(projected));
}

double conditional_probability(const ProjectorObservable& x,
                               const ProjectorObservable& y,
                               const PureState& s) {
    require_dim(x.dim(), y.dim(), "conditional_probability");
    require_dim(y.dim(), s.dim(), "conditional_probability");
    const ComplexVector yp = apply(y.matrix(), s.vector());
    const double den = norm2(yp);
    if (den <= kZeroConditionNorm * kZeroConditionNorm)
        throw UndefinedConditional(
            "undefined conditional: condition '" + y.label() +
            "' has zero probability");
    return finalize_probability(norm2(apply(x.matrix(), yp)) / den);
}

double conditional_probability(const ProjectorObservable& x,
                               const ProjectorObservable& y,
                               const DensityOperator& rho) {
    require_dim(x.dim(), y.dim(), "conditional_probability");
    require_dim(y.dim(), rho.dim(), "conditional_probability");
    const double den = trace(compose(y.matrix(), rho.matrix())).real();
    if (den <= kZeroConditionNorm * kZeroConditionNorm)
        throw UndefinedConditional(
            "undefined conditional: condition '" + y.label() +
            "' has zero probability");
    const ComplexMatrix yry =
        compose(compose(y.matrix(), rho.matrix()), y.matrix());
    return finalize_probability(trace(compose(x.matrix(), yry)).real() / den);
}

double conditional_on_complement(const ProjectorObservable& x,
                                 const ProjectorObservable& y,
                                 const PureState& s) {
    return conditional_probability(x, y.complement(), s);
}

double ltp_interference(const ProjectorObservable& x,
                        const ProjectorObservable& y, const PureState& s) {
    require_dim(x.dim(), y.dim(), "ltp_interference");
    require_dim(y.dim(), s.dim(), "ltp_interference");
    const double px = born_probability(x, s);
    const double py = born_probability(y, s);
    double mixture = 0.0;
    if (py >= 1e-12)
        mixture += conditional_probability(x, y, s) * py;
    const double pny = 1.0 - py;
    if (pny >= 1e-12)
        mixture += conditional_on_complement(x, y, s) * pny;
    return px - mixture;
}

} // namespace qlcause
