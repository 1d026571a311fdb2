#pragma once
// Classical (Kolmogorovian) oracle: probability spaces over the 2^n atoms
// of n binary events, the conjunction lemma and theorem, constrained
// sampling, and feasibility search against target tables.
//
// Atoms are the single source of truth; every marginal and conditional is
// an atom sum or a ratio of atom sums. Atom index bit k is event k.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlcause/errors.hpp"
#include "qlcause/targets.hpp"

namespace qlcause {

// Guard band for strict inequalities; samples closer than this to equality
// are flagged boundary instead of counting as violations.
inline constexpr double kBoundaryTol = 1e-12;

class ClassicalSpace {
  public:
    // atoms.size() must be 2^labels.size(); atoms nonnegative, summing to 1
    // within 1e-12.
    ClassicalSpace(std::vector<std::string> labels,
                   std::vector<double> atoms);

    static ClassicalSpace uniform(std::vector<std::string> labels);

    std::size_t n() const { return labels_.size(); }
    std::size_t atom_count() const { return atoms_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& atoms() const { return atoms_; }
    double atom(std::size_t index) const { return atoms_[index]; }

    // index of a labelled event; throws std::invalid_argument when absent
    std::size_t event(const std::string& label) const;

  private:
    std::vector<std::string> labels_;
    std::vector<double> atoms_;
};

enum class Literal : std::uint8_t { any, yes, no };

// Conjunction of literals over the events of a space.
class EventExpr {
  public:
    explicit EventExpr(std::size_t n_events)
        : lits_(n_events, Literal::any) {}

    EventExpr& set(std::size_t event, bool value) {
        lits_.at(event) = value ? Literal::yes : Literal::no;
        return *this;
    }

    std::size_t size() const { return lits_.size(); }
    Literal at(std::size_t event) const { return lits_[event]; }
    bool constrained() const;
    bool matches(std::size_t atom_index) const;

  private:
    std::vector<Literal> lits_;
};

// Exact atom sums / ratios; conditioning on zero mass or on an expression
// with no constrained literal throws UndefinedConditional.
double probability(const ClassicalSpace& space, const EventExpr& event);
double conditional(const ClassicalSpace& space, const EventExpr& event,
                   const EventExpr& given);

// The fixed 8-atom example space over (a, b, d) exhibiting the
// two-causes-cancel situation while the single causes support d.
ClassicalSpace construct_10c_space();

struct LemmaCheck {
    bool lhs_10a = false;  // p(d | a and b) < p(d)
    bool rhs_10b = false;  // p(ab | d) < p(ab | not d)
    bool equivalent = false;
    bool boundary = false; // either side within kBoundaryTol of equality
};

// Throws UndefinedConditional when p(d) is 0 or 1 or p(a and b) is 0.
LemmaCheck check_lemma(const ClassicalSpace& space, std::size_t a,
                       std::size_t b, std::size_t d);

struct SamplerConfig {
    // base draw ranges, all strictly inside (0,1)
    double p_d_min = 0.05;
    double p_d_max = 0.95;
    double cond_min = 0.05;
    double cond_max = 0.95;
    // minimal strict gap p(x|d) - p(x|not d)
    double strict_margin = 1e-9;
    std::uint64_t max_redraws = 10000;
};

// A space over (a, b, d) satisfying, within 1e-12:
//   p(ab) = p(a) p(b),  p(ab|d) = p(a|d) p(b|d),
//   p(d|a) > p(d),      p(d|b) > p(d).
// Construction: draw p(d), p(a|d), p(b|d); draw p(a|not d) < p(a|d) and
// p(b|not d) < p(b|d); solve p(ab|not d) from unconditional independence
// and reject draws outside the Frechet bounds. Throws SamplerExhausted
// after max_redraws rejections.
ClassicalSpace sample_constrained_space(std::uint64_t seed,
                                        const SamplerConfig& config = {});

enum class TheoremVerdict { holds, equality, violated, not_applicable };

// Does p(d|ab) exceed p(d) on a space satisfying the sampler's premises?
// Premises are verified first (independence both ways within 1e-9, single
// causes not decreasing d); spaces failing them give not_applicable.
TheoremVerdict conjunction_theorem_trial(const ClassicalSpace& space);

struct FeasibilityConstraints {
    // events required mutually independent (every subset product identity)
    std::vector<char> independent_events;
    // same events also independent conditioned on this event
    std::optional<char> conditionally_independent_given;

    bool empty() const {
        return independent_events.empty() &&
               !conditionally_independent_given;
    }
};

struct FeasibilityResult {
    double best_residual = 0.0; // max-abs violation over targets+constraints
    ClassicalSpace best_space;
    std::uint64_t evaluations = 0;
};

// Randomized multi-start minimization of the max-abs target violation over
// the atom simplex; independence constraints enter as bilinear penalty
// terms |p(S) - prod p(s)|. Deterministic given seed. Throws on budget 0.
FeasibilityResult feasibility_search(const TargetTable& targets,
                                     const FeasibilityConstraints& constraints,
                                     std::uint64_t seed, std::uint64_t budget);

// Property-suite runners shared by the CLI and the acceptance tests.

struct LemmaSuiteResult {
    std::uint64_t trials = 0;
    std::uint64_t boundary = 0;
    std::uint64_t violations = 0;          // biconditional failures
    std::uint64_t blocking_violations = 0; // (10c) seen while (10d) holds
    std::vector<ClassicalSpace> counterexamples;
};

LemmaSuiteResult run_lemma_suite(std::uint64_t trials, std::uint64_t seed);

struct ConjunctionSuiteResult {
    std::uint64_t trials = 0;
    std::uint64_t holds = 0;
    std::uint64_t equalities = 0;
    std::uint64_t violations = 0;       // p(d|ab) <= p(d) - tol
    std::uint64_t joint_violations = 0; // p(ab|d) <= p(ab) - tol
    bool exhausted = false;             // sampler ran dry mid-suite
    std::vector<ClassicalSpace> counterexamples;
};

ConjunctionSuiteResult run_conjunction_suite(std::uint64_t trials,
                                             std::uint64_t seed,
                                             const SamplerConfig& config = {});

} // namespace qlcause
