#include "qlcause/classical.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "qlcause/kernels.hpp"
#include "qlcause/optim.hpp"
#include "qlcause/random.hpp"

namespace qlcause {
namespace {

constexpr double kAtomSumTol = 1e-12;
constexpr double kPremiseTol = 1e-9;

void require(bool ok, const char* msg) {
    if (!ok)
        throw std::invalid_argument(msg);
}

} // namespace

ClassicalSpace::ClassicalSpace(std::vector<std::string> labels,
                               std::vector<double> atoms)
    : labels_(std::move(labels)), atoms_(std::move(atoms)) {
    require(!labels_.empty(), "ClassicalSpace: needs at least one event");
    require(atoms_.size() == (std::size_t{1} << labels_.size()),
            "ClassicalSpace: atom count must be 2^n");
    double sum = 0.0;
    for (double a : atoms_) {
        require(std::isfinite(a) && a >= 0.0,
                "ClassicalSpace: atoms must be nonnegative");
        sum += a;
    }
    require(std::abs(sum - 1.0) <= kAtomSumTol,
            "ClassicalSpace: atoms must sum to 1");
}

ClassicalSpace ClassicalSpace::uniform(std::vector<std::string> labels) {
    const std::size_t count = std::size_t{1} << labels.size();
    return ClassicalSpace(std::move(labels),
                          std::vector<double>(count, 1.0 / double(count)));
}

std::size_t ClassicalSpace::event(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label)
            return i;
    throw std::invalid_argument("ClassicalSpace: no event labelled '" +
                                label + "'");
}

bool EventExpr::constrained() const {
    for (Literal l : lits_)
        if (l != Literal::any)
            return true;
    return false;
}

bool EventExpr::matches(std::size_t atom_index) const {
    for (std::size_t e = 0; e < lits_.size(); ++e) {
        const bool value = (atom_index >> e) & 1u;
        if (lits_[e] == Literal::yes && !value)
            return false;
        if (lits_[e] == Literal::no && value)
            return false;
    }
    return true;
}

double probability(const ClassicalSpace& space, const EventExpr& event) {
    require(event.size() == space.n(),
            "probability: expression arity must match the space");
    double sum = 0.0;
    for (std::size_t i = 0; i < space.atom_count(); ++i)
        if (event.matches(i))
            sum += space.atom(i);
    return sum;
}

double conditional(const ClassicalSpace& space, const EventExpr& event,
                   const EventExpr& given) {
    require(event.size() == space.n() && given.size() == space.n(),
            "conditional: expression arity must match the space");
    if (!given.constrained())
        throw UndefinedConditional(
            "conditional: conditioning expression constrains no event");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < space.atom_count(); ++i) {
        if (!given.matches(i))
            continue;
        den += space.atom(i);
        if (event.matches(i))
            num += space.atom(i);
    }
    if (den <= 0.0)
        throw UndefinedConditional(
            "conditional: conditioning event has zero probability");
    return num / den;
}

ClassicalSpace construct_10c_space() {
    // (a, b, d) with a = bit0, b = bit1, d = bit2
    std::vector<double> atoms(8, 0.0);
    const auto put = [&atoms](bool a, bool b, bool d, double mass) {
        atoms[(a ? 1u : 0u) | (b ? 2u : 0u) | (d ? 4u : 0u)] = mass;
    };
    put(true, true, true, 0.02);
    put(true, true, false, 0.08);
    put(true, false, true, 0.28);
    put(true, false, false, 0.10);
    put(false, true, true, 0.18);
    put(false, true, false, 0.05);
    put(false, false, true, 0.02);
    put(false, false, false, 0.27);
    return ClassicalSpace({"a", "b", "d"}, std::move(atoms));
}

LemmaCheck check_lemma(const ClassicalSpace& space, std::size_t a,
                       std::size_t b, std::size_t d) {
    EventExpr ev_d(space.n()), ev_ab(space.n()), ev_not_d(space.n());
    ev_d.set(d, true);
    ev_ab.set(a, true).set(b, true);
    ev_not_d.set(d, false);

    const double p_d = probability(space, ev_d);
    const double p_ab = probability(space, ev_ab);
    if (p_d <= 0.0 || p_d >= 1.0 || p_ab <= 0.0)
        throw UndefinedConditional(
            "check_lemma: requires p(d) in (0,1) and p(ab) > 0");

    const double lhs = conditional(space, ev_d, ev_ab) - p_d;
    const double rhs = conditional(space, ev_ab, ev_d) -
                       conditional(space, ev_ab, ev_not_d);

    LemmaCheck check;
    check.lhs_10a = lhs < 0.0;
    check.rhs_10b = rhs < 0.0;
    check.equivalent = check.lhs_10a == check.rhs_10b;
    check.boundary =
        std::abs(lhs) <= kBoundaryTol || std::abs(rhs) <= kBoundaryTol;
    return check;
}

ClassicalSpace sample_constrained_space(std::uint64_t seed,
                                        const SamplerConfig& config) {
    require(config.p_d_min > 0.0 && config.p_d_max < 1.0 &&
                config.p_d_min <= config.p_d_max,
            "sample_constrained_space: p(d) range must lie inside (0,1)");
    require(config.cond_min > 0.0 && config.cond_max < 1.0 &&
                config.cond_min <= config.cond_max,
            "sample_constrained_space: conditional range must lie inside (0,1)");

    Rng rng(seed);
    for (std::uint64_t attempt = 0; attempt < config.max_redraws; ++attempt) {
        const double pd = rng.uniform(config.p_d_min, config.p_d_max);
        const double pad = rng.uniform(config.cond_min, config.cond_max);
        const double pbd = rng.uniform(config.cond_min, config.cond_max);
        // strictly smaller conditionals off d enforce p(d|x) > p(d)
        const double pan = rng.uniform() * pad;
        const double pbn = rng.uniform() * pbd;
        if (pad - pan < config.strict_margin ||
            pbd - pbn < config.strict_margin)
            continue;

        const double pa = pad * pd + pan * (1.0 - pd);
        const double pb = pbd * pd + pbn * (1.0 - pd);
        // unconditional independence fixes the joint mass off d
        const double joint_n =
            (pa * pb - pad * pbd * pd) / (1.0 - pd);
        const double frechet_lo = std::max(0.0, pan + pbn - 1.0);
        const double frechet_hi = std::min(pan, pbn);
        if (joint_n < frechet_lo || joint_n > frechet_hi)
            continue;

        std::vector<double> atoms(8, 0.0);
        const auto put = [&atoms](bool a, bool b, bool d, double mass) {
            atoms[(a ? 1u : 0u) | (b ? 2u : 0u) | (d ? 4u : 0u)] =
                std::max(mass, 0.0);
        };
        put(true, true, true, pad * pbd * pd);
        put(true, false, true, pad * (1.0 - pbd) * pd);
        put(false, true, true, (1.0 - pad) * pbd * pd);
        put(false, false, true, (1.0 - pad) * (1.0 - pbd) * pd);
        put(true, true, false, joint_n * (1.0 - pd));
        put(true, false, false, (pan - joint_n) * (1.0 - pd));
        put(false, true, false, (pbn - joint_n) * (1.0 - pd));
        put(false, false, false,
            (1.0 - pan - pbn + joint_n) * (1.0 - pd));
        return ClassicalSpace({"a", "b", "d"}, std::move(atoms));
    }
    throw SamplerExhausted(
        "sample_constrained_space: redraw budget exhausted");
}

TheoremVerdict conjunction_theorem_trial(const ClassicalSpace& space) {
    const std::size_t a = space.event("a");
    const std::size_t b = space.event("b");
    const std::size_t d = space.event("d");

    EventExpr ev_a(space.n()), ev_b(space.n()), ev_d(space.n()),
        ev_ab(space.n());
    ev_a.set(a, true);
    ev_b.set(b, true);
    ev_d.set(d, true);
    ev_ab.set(a, true).set(b, true);

    const double pa = probability(space, ev_a);
    const double pb = probability(space, ev_b);
    const double pd = probability(space, ev_d);
    const double pab = probability(space, ev_ab);
    if (pd <= 0.0 || pd >= 1.0 || pa <= 0.0 || pb <= 0.0 || pab <= 0.0)
        return TheoremVerdict::not_applicable;

    const double pad = conditional(space, ev_a, ev_d);
    const double pbd = conditional(space, ev_b, ev_d);
    const double pabd = conditional(space, ev_ab, ev_d);
    // premises: independence (5)-(6) and non-decreasing single causes (8)
    if (std::abs(pab - pa * pb) > kPremiseTol)
        return TheoremVerdict::not_applicable;
    if (std::abs(pabd - pad * pbd) > kPremiseTol)
        return TheoremVerdict::not_applicable;
    const double pda = conditional(space, ev_d, ev_a);
    const double pdb = conditional(space, ev_d, ev_b);
    if (pda < pd - kBoundaryTol || pdb < pd - kBoundaryTol)
        return TheoremVerdict::not_applicable;

    const double diff = conditional(space, ev_d, ev_ab) - pd;
    if (diff > kBoundaryTol)
        return TheoremVerdict::holds;
    if (diff >= -kBoundaryTol)
        return TheoremVerdict::equality;
    return TheoremVerdict::violated;
}

namespace {

// Compiled feasibility objective: indicator vectors against the atom
// array, evaluated with the dot kernel.
struct CompiledTarget {
    std::vector<double> joint;     // indicator of outcome (and condition)
    std::vector<double> condition; // empty for unconditional targets
    double value = 0.0;
    double weight = 1.0;
};

struct CompiledIndependence {
    std::vector<std::vector<double>> singles; // indicator per event in S
    std::vector<double> joint;                // indicator of all of S
    std::vector<double> given;                // empty = unconditional
};

std::vector<double> indicator(const std::vector<char>& events,
                              const std::vector<char>& universe,
                              const std::vector<char>& extra = {},
                              bool extra_negated = false) {
    const std::size_t n = universe.size();
    const std::size_t count = std::size_t{1} << n;
    std::uint64_t mask = 0, want = 0;
    const auto bit_of = [&universe](char ev) {
        return std::size_t(std::find(universe.begin(), universe.end(), ev) -
                           universe.begin());
    };
    for (char ev : events) {
        const std::uint64_t bit = 1ull << bit_of(ev);
        mask |= bit;
        want |= bit;
    }
    for (char ev : extra) {
        const std::uint64_t bit = 1ull << bit_of(ev);
        mask |= bit;
        if (!extra_negated)
            want |= bit;
    }
    std::vector<double> ind(count, 0.0);
    for (std::size_t i = 0; i < count; ++i)
        if ((i & mask) == want)
            ind[i] = 1.0;
    return ind;
}

double masked_sum(const std::vector<double>& atoms,
                  const std::vector<double>& ind) {
    return kernels::active().dot(atoms.data(), ind.data(), atoms.size());
}

// all subsets of events with at least two elements
std::vector<std::vector<char>> independence_subsets(
    const std::vector<char>& events) {
    std::vector<std::vector<char>> subsets;
    const std::size_t k = events.size();
    for (std::size_t bits = 1; bits < (std::size_t{1} << k); ++bits) {
        if (__builtin_popcountll(bits) < 2)
            continue;
        std::vector<char> subset;
        for (std::size_t i = 0; i < k; ++i)
            if ((bits >> i) & 1u)
                subset.push_back(events[i]);
        subsets.push_back(std::move(subset));
    }
    return subsets;
}

} // namespace

FeasibilityResult feasibility_search(const TargetTable& targets,
                                     const FeasibilityConstraints& constraints,
                                     std::uint64_t seed,
                                     std::uint64_t budget) {
    if (budget == 0)
        throw std::invalid_argument("feasibility_search: budget must be > 0");

    // event universe = letters in targets plus constraint letters
    TargetTable probe = targets;
    for (char ev : constraints.independent_events)
        probe.entries.push_back({std::string("p_") + ev, 0.0, 0.0});
    if (constraints.conditionally_independent_given)
        probe.entries.push_back(
            {std::string("p_") + *constraints.conditionally_independent_given,
             0.0, 0.0});
    const std::vector<char> universe = target_events(probe);
    require(universe.size() <= 16,
            "feasibility_search: too many distinct events");
    const std::size_t atom_count = std::size_t{1} << universe.size();

    std::vector<CompiledTarget> compiled;
    for (const auto& entry : targets.entries) {
        const TargetSpec spec = parse_target_name(entry.name);
        CompiledTarget ct;
        ct.value = entry.value;
        ct.weight = entry.weight;
        if (spec.condition.empty()) {
            ct.joint = indicator(spec.outcome, universe);
        } else {
            ct.joint = indicator(spec.outcome, universe, spec.condition,
                                 spec.condition_negated);
            ct.condition = indicator({}, universe, spec.condition,
                                     spec.condition_negated);
        }
        compiled.push_back(std::move(ct));
    }

    std::vector<CompiledIndependence> indeps;
    if (!constraints.independent_events.empty()) {
        for (const auto& subset :
             independence_subsets(constraints.independent_events)) {
            CompiledIndependence ci;
            for (char ev : subset)
                ci.singles.push_back(indicator({ev}, universe));
            ci.joint = indicator(subset, universe);
            indeps.push_back(ci);
            if (constraints.conditionally_independent_given) {
                CompiledIndependence cond = std::move(ci);
                cond.given = indicator(
                    {*constraints.conditionally_independent_given}, universe);
                indeps.push_back(std::move(cond));
            }
        }
    }

    std::vector<double> atoms(atom_count);
    const auto to_atoms = [&atoms](const std::vector<double>& z) {
        double zmax = z[0];
        for (double v : z)
            zmax = std::max(zmax, v);
        double sum = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            atoms[i] = std::exp(z[i] - zmax);
            sum += atoms[i];
        }
        for (double& a : atoms)
            a /= sum;
    };

    const auto violations = [&]() {
        double sse = 0.0, worst = 0.0;
        const auto add = [&](double v) {
            sse += v * v;
            worst = std::max(worst, v);
        };
        for (const CompiledTarget& ct : compiled) {
            double value;
            if (ct.condition.empty()) {
                value = masked_sum(atoms, ct.joint);
            } else {
                const double den = masked_sum(atoms, ct.condition);
                if (den <= 0.0) {
                    add(ct.weight * 1.0); // undefined conditional penalty
                    continue;
                }
                value = masked_sum(atoms, ct.joint) / den;
            }
            add(ct.weight * std::abs(value - ct.value));
        }
        for (const CompiledIndependence& ci : indeps) {
            if (ci.given.empty()) {
                double prod = 1.0;
                for (const auto& s : ci.singles)
                    prod *= masked_sum(atoms, s);
                add(std::abs(masked_sum(atoms, ci.joint) - prod));
            } else {
                const double den = masked_sum(atoms, ci.given);
                if (den <= 0.0) {
                    add(1.0);
                    continue;
                }
                double prod = 1.0;
                for (const auto& s : ci.singles) {
                    double joint_sd = 0.0;
                    for (std::size_t i = 0; i < atom_count; ++i)
                        joint_sd += atoms[i] * s[i] * ci.given[i];
                    prod *= joint_sd / den;
                }
                double joint_all = 0.0;
                for (std::size_t i = 0; i < atom_count; ++i)
                    joint_all += atoms[i] * ci.joint[i] * ci.given[i];
                add(std::abs(joint_all / den - prod));
            }
        }
        return std::pair<double, double>{sse, worst};
    };

    std::uint64_t evals = 0;
    const auto objective = [&](const std::vector<double>& z) {
        ++evals;
        to_atoms(z);
        return violations().first;
    };

    // exploration starts, then chained polish around the best point
    const std::size_t starts = 16;
    const std::uint64_t explore_share = budget / 2;
    const std::uint64_t per_start = std::max<std::uint64_t>(
        64, explore_share / starts);

    std::vector<double> best_z;
    double best_sse = 0.0;
    for (std::size_t s = 0; s < starts && evals < explore_share; ++s) {
        Rng rng(Rng::derive(seed, s));
        std::vector<double> z0(atom_count);
        for (double& v : z0)
            v = rng.normal();
        optim::NelderMeadOptions opt;
        opt.max_evaluations = std::min<std::uint64_t>(
            per_start, explore_share - evals);
        opt.initial_step = 1.0;
        const auto res = optim::nelder_mead(
            [&](const std::vector<double>& z) { return objective(z); },
            std::move(z0), opt);
        if (best_z.empty() || res.fx < best_sse) {
            best_sse = res.fx;
            best_z = res.x;
        }
    }
    while (evals < budget) {
        optim::NelderMeadOptions opt;
        opt.max_evaluations =
            std::min<std::uint64_t>(budget - evals, budget / 8 + 64);
        opt.initial_step = 0.1;
        const auto res = optim::nelder_mead(
            [&](const std::vector<double>& z) { return objective(z); },
            best_z, opt);
        if (res.fx >= best_sse)
            break; // converged; stop instead of burning budget
        best_sse = res.fx;
        best_z = res.x;
    }

    to_atoms(best_z);
    std::vector<std::string> labels;
    labels.reserve(universe.size());
    for (char ev : universe)
        labels.emplace_back(1, ev);
    return FeasibilityResult{violations().second,
                             ClassicalSpace(std::move(labels), atoms), evals};
}

LemmaSuiteResult run_lemma_suite(std::uint64_t trials, std::uint64_t seed) {
    LemmaSuiteResult out;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng(Rng::derive(seed, t));
        std::vector<double> atoms(8);
        double sum = 0.0;
        for (double& a : atoms) {
            a = rng.exponential();
            sum += a;
        }
        for (double& a : atoms)
            a /= sum;
        const ClassicalSpace space({"a", "b", "d"}, atoms);
        ++out.trials;

        LemmaCheck check;
        try {
            check = check_lemma(space, 0, 1, 2);
        } catch (const UndefinedConditional&) {
            ++out.boundary;
            continue;
        }
        if (check.boundary) {
            ++out.boundary;
        } else if (!check.equivalent) {
            ++out.violations;
            if (out.counterexamples.size() < 4)
                out.counterexamples.push_back(space);
        }

        // (10d) blocking: p(ab|d) > p(ab|not d) forbids situation (10c)
        EventExpr ev_a(3), ev_b(3), ev_d(3), ev_nd(3), ev_ab(3);
        ev_a.set(0, true);
        ev_b.set(1, true);
        ev_d.set(2, true);
        ev_nd.set(2, false);
        ev_ab.set(0, true).set(1, true);
        const double pd = probability(space, ev_d);
        const double rhs = conditional(space, ev_ab, ev_d) -
                           conditional(space, ev_ab, ev_nd);
        if (rhs > kBoundaryTol) { // (10d) strictly
            const bool c10 =
                conditional(space, ev_d, ev_a) > pd + kBoundaryTol &&
                conditional(space, ev_d, ev_b) > pd + kBoundaryTol &&
                conditional(space, ev_d, ev_ab) < pd - kBoundaryTol;
            if (c10) {
                ++out.blocking_violations;
                if (out.counterexamples.size() < 4)
                    out.counterexamples.push_back(space);
            }
        }
    }
    return out;
}

ConjunctionSuiteResult run_conjunction_suite(std::uint64_t trials,
                                             std::uint64_t seed,
                                             const SamplerConfig& config) {
    ConjunctionSuiteResult out;
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::optional<ClassicalSpace> sampled;
        try {
            sampled = sample_constrained_space(Rng::derive(seed, t), config);
        } catch (const SamplerExhausted&) {
            out.exhausted = true;
            break;
        }
        const ClassicalSpace& space = *sampled;
        ++out.trials;
        switch (conjunction_theorem_trial(space)) {
        case TheoremVerdict::holds:
            ++out.holds;
            break;
        case TheoremVerdict::equality:
            ++out.equalities;
            break;
        case TheoremVerdict::violated:
        case TheoremVerdict::not_applicable:
            ++out.violations;
            if (out.counterexamples.size() < 4)
                out.counterexamples.push_back(space);
            break;
        }

        // consequence noted with the theorem: the joint is likelier under d
        EventExpr ev_d(3), ev_ab(3);
        ev_d.set(2, true);
        ev_ab.set(0, true).set(1, true);
        if (conditional(space, ev_ab, ev_d) <=
            probability(space, ev_ab) + kBoundaryTol) {
            ++out.joint_violations;
            if (out.counterexamples.size() < 4)
                out.counterexamples.push_back(space);
        }
    }
    return out;
}

} // namespace qlcause
