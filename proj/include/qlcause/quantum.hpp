#pragma once
// Quantum probability engine: Born probabilities of projector observables,
// Lueders conditioning for pure and density states, and the
// law-of-total-probability interference term.
//
// Conditioning follows the Lueders sequential rule (project, renormalize,
// measure), which keeps every conditional real and inside [0,1] even for
// non-commuting pairs. Zero-probability conditions raise
// UndefinedConditional rather than returning 0 or NaN; the single exception
// is ltp_interference, where a zero-weight branch contributes 0.

#include <string>

#include "qlcause/errors.hpp"
#include "qlcause/linalg.hpp"

namespace qlcause {

// A conditioning projection P psi is usable only when ||P psi|| exceeds
// this; report-level code treats born probabilities below 1e-12 as
// undefined, which is the stricter of the two.
inline constexpr double kZeroConditionNorm = 1e-12;

// Unit vector within kNormTol of norm 1.
class PureState {
  public:
    explicit PureState(ComplexVector v);
    // Rescales v to unit norm; throws if ||v|| is numerically zero.
    static PureState normalized(ComplexVector v);

    const ComplexVector& vector() const { return vector_; }
    std::size_t dim() const { return vector_.dim(); }

  private:
    struct AlreadyUnit {};
    PureState(ComplexVector v, AlreadyUnit) : vector_(std::move(v)) {}
    ComplexVector vector_;
};

// Hermitian, unit-trace, positive-semidefinite (probed on a fixed set of
// pseudo-random directions) density matrix.
class DensityOperator {
  public:
    explicit DensityOperator(ComplexMatrix m);
    static DensityOperator pure(const PureState& s);

    const ComplexMatrix& matrix() const { return matrix_; }
    std::size_t dim() const { return matrix_.rows(); }

  private:
    ComplexMatrix matrix_;
};

// Hermitian idempotent observable representing a yes/no question.
class ProjectorObservable {
  public:
    ProjectorObservable(ComplexMatrix m, std::string label);

    const ComplexMatrix& matrix() const { return matrix_; }
    const std::string& label() const { return label_; }
    std::size_t dim() const { return matrix_.rows(); }

    // I - P (also a projector).
    ProjectorObservable complement() const;

    // Construction bypass for matrices that are projectors by algebraic
    // construction (Kronecker/commuting products of validated projectors).
    // Model builders use this on their hot path; the structural test suite
    // re-validates every built operator through is_projector.
    static ProjectorObservable trusted(ComplexMatrix m, std::string label);

  private:
    struct Trusted {};
    ProjectorObservable(ComplexMatrix m, std::string label, Trusted);
    ComplexMatrix matrix_;
    std::string label_;
};

// ||P psi||^2, clamped to [0,1] after an out-of-range guard.
double born_probability(const ProjectorObservable& p, const PureState& s);
// Re tr(P rho).
double born_probability(const ProjectorObservable& p,
                        const DensityOperator& rho);

// P psi / ||P psi||; throws UndefinedConditional when the projection
// vanishes.
PureState luders_condition(const ProjectorObservable& p, const PureState& s);

// p(x|y) = ||x y psi||^2 / ||y psi||^2.
double conditional_probability(const ProjectorObservable& x,
                               const ProjectorObservable& y,
                               const PureState& s);
// tr(x y rho y) / tr(y rho).
double conditional_probability(const ProjectorObservable& x,
                               const ProjectorObservable& y,
                               const DensityOperator& rho);

// p(x | not y) = conditional_probability(x, I - y, s).
double conditional_on_complement(const ProjectorObservable& x,
                                 const ProjectorObservable& y,
                                 const PureState& s);

// p(x) - [ p(x|y) p(y) + p(x|not y) p(not y) ]; a branch whose condition
// has probability < 1e-12 contributes 0.
double ltp_interference(const ProjectorObservable& x,
                        const ProjectorObservable& y, const PureState& s);

} // namespace qlcause
