#include <doctest.h>

#include <cmath>
#include <functional>

#include "qlcause/classical.hpp"
#include "qlcause/random.hpp"

using namespace qlcause;

namespace {

ClassicalSpace random_space(Rng& rng, std::vector<std::string> labels) {
    std::vector<double> atoms(std::size_t{1} << labels.size());
    double sum = 0.0;
    for (double& a : atoms) {
        a = rng.exponential();
        sum += a;
    }
    for (double& a : atoms)
        a /= sum;
    return ClassicalSpace(std::move(labels), std::move(atoms));
}

// brute-force enumeration over explicit truth assignments
double enumerate_probability(const ClassicalSpace& space,
                             const EventExpr& event) {
    double sum = 0.0;
    std::vector<bool> assignment(space.n());
    const std::function<void(std::size_t)> walk = [&](std::size_t e) {
        if (e == space.n()) {
            std::size_t index = 0;
            bool ok = true;
            for (std::size_t i = 0; i < space.n(); ++i) {
                if (assignment[i])
                    index |= std::size_t{1} << i;
                if (event.at(i) == Literal::yes && !assignment[i])
                    ok = false;
                if (event.at(i) == Literal::no && assignment[i])
                    ok = false;
            }
            if (ok)
                sum += space.atom(index);
            return;
        }
        assignment[e] = false;
        walk(e + 1);
        assignment[e] = true;
        walk(e + 1);
    };
    walk(0);
    return sum;
}

} // namespace

TEST_CASE("probability and conditional on canned spaces") {
    const ClassicalSpace uniform = ClassicalSpace::uniform({"a", "b", "d"});
    EventExpr d(3), ab(3);
    d.set(2, true);
    ab.set(0, true).set(1, true);
    CHECK(conditional(uniform, d, ab) == 0.5);

    const ClassicalSpace tenc = construct_10c_space();
    EventExpr a(3);
    a.set(0, true);
    CHECK(std::abs(conditional(tenc, d, a) - 0.625) <= 1e-15);

    // conditioning on an event of zero mass
    std::vector<double> atoms(8, 0.0);
    atoms[0] = 1.0; // everything off a, b, d... index 0 = no events
    const ClassicalSpace degenerate({"a", "b", "d"}, atoms);
    CHECK_THROWS_AS(conditional(degenerate, d, a), UndefinedConditional);
    // conditioning on a fully-free expression
    CHECK_THROWS_AS(conditional(uniform, d, EventExpr(3)),
                    UndefinedConditional);
}

TEST_CASE("probability agrees with brute-force enumeration") {
    Rng rng(8675309);
    const std::vector<std::vector<std::string>> universes = {
        {"a", "d"}, {"a", "b", "d"}, {"a", "b", "c", "d"}};
    for (const auto& labels : universes) {
        for (int trial = 0; trial < 50; ++trial) {
            const ClassicalSpace space = random_space(rng, labels);
            EventExpr expr(space.n());
            for (std::size_t e = 0; e < space.n(); ++e) {
                const double u = rng.uniform();
                if (u < 0.3)
                    expr.set(e, true);
                else if (u < 0.6)
                    expr.set(e, false);
            }
            CHECK(std::abs(probability(space, expr) -
                           enumerate_probability(space, expr)) <= 1e-15);
        }
    }
}

TEST_CASE("construct_10c_space matches its defining numbers") {
    const ClassicalSpace s = construct_10c_space();
    double sum = 0.0;
    for (std::size_t i = 0; i < s.atom_count(); ++i)
        sum += s.atom(i);
    CHECK(std::abs(sum - 1.0) <= 1e-15);

    EventExpr a(3), b(3), d(3), nd(3), ab(3);
    a.set(0, true);
    b.set(1, true);
    d.set(2, true);
    nd.set(2, false);
    ab.set(0, true).set(1, true);

    const double pd = probability(s, d);
    CHECK(pd == 0.5);
    CHECK(std::abs(conditional(s, d, a) - 0.625) <= 1e-15);
    CHECK(std::abs(conditional(s, d, b) - 20.0 / 33.0) <= 1e-15);
    CHECK(std::abs(conditional(s, d, ab) - 0.2) <= 1e-15);
    CHECK(conditional(s, d, a) > pd);
    CHECK(conditional(s, d, b) > pd);
    CHECK(conditional(s, d, ab) < pd);
    // and it satisfies (10b): joint less likely under d
    CHECK(std::abs(conditional(s, ab, d) - 0.04) <= 1e-15);
    CHECK(std::abs(conditional(s, ab, nd) - 0.16) <= 1e-15);
}

TEST_CASE("check_lemma") {
    SUBCASE("the canned space sits on the agreeing side") {
        const LemmaCheck check = check_lemma(construct_10c_space(), 0, 1, 2);
        CHECK(check.lhs_10a);
        CHECK(check.rhs_10b);
        CHECK(check.equivalent);
        CHECK_FALSE(check.boundary);
    }
    SUBCASE("uniform space is flagged boundary") {
        const LemmaCheck check =
            check_lemma(ClassicalSpace::uniform({"a", "b", "d"}), 0, 1, 2);
        CHECK(check.boundary);
    }
    SUBCASE("degenerate conditioning throws") {
        std::vector<double> atoms(8, 0.0);
        atoms[4] = 1.0; // d certain
        CHECK_THROWS_AS(check_lemma(ClassicalSpace({"a", "b", "d"}, atoms),
                                    0, 1, 2),
                        UndefinedConditional);
    }
    SUBCASE("property: biconditional holds on random spaces") {
        Rng rng(13579);
        int violations = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            const ClassicalSpace space =
                random_space(rng, {"a", "b", "d"});
            const LemmaCheck check = check_lemma(space, 0, 1, 2);
            if (!check.boundary && !check.equivalent)
                ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("sample_constrained_space") {
    SUBCASE("seed 1 satisfies all five constraint predicates") {
        const ClassicalSpace s = sample_constrained_space(1);
        EventExpr a(3), b(3), d(3), ab(3);
        a.set(0, true);
        b.set(1, true);
        d.set(2, true);
        ab.set(0, true).set(1, true);
        const double pa = probability(s, a), pb = probability(s, b),
                     pd = probability(s, d);
        CHECK(std::abs(probability(s, ab) - pa * pb) <= 1e-12);
        CHECK(std::abs(conditional(s, ab, d) -
                       conditional(s, a, d) * conditional(s, b, d)) <=
              1e-12);
        CHECK(conditional(s, d, a) > pd);
        CHECK(conditional(s, d, b) > pd);
        CHECK(pd > 0.0);
        CHECK(pd < 1.0);
    }
    SUBCASE("many seeds keep the constraints") {
        for (std::uint64_t seed = 2; seed < 200; ++seed) {
            const ClassicalSpace s = sample_constrained_space(seed);
            EventExpr a(3), b(3), d(3);
            a.set(0, true);
            b.set(1, true);
            d.set(2, true);
            CHECK(conditional(s, d, a) > probability(s, d));
            CHECK(conditional(s, d, b) > probability(s, d));
        }
    }
    SUBCASE("a config that pins p(d) at 1 is rejected up front") {
        SamplerConfig config;
        config.p_d_max = 1.0;
        CHECK_THROWS_AS(sample_constrained_space(1, config),
                        std::invalid_argument);
    }
}

TEST_CASE("conjunction_theorem_trial") {
    SUBCASE("sampled spaces satisfy the conclusion") {
        for (std::uint64_t seed = 0; seed < 100; ++seed)
            CHECK(conjunction_theorem_trial(sample_constrained_space(seed)) ==
                  TheoremVerdict::holds);
    }
    SUBCASE("a fully independent space lands on the boundary") {
        const double pa = 0.3, pb = 0.6, pd = 0.4;
        std::vector<double> atoms(8);
        for (std::size_t i = 0; i < 8; ++i) {
            const double fa = (i & 1) ? pa : 1.0 - pa;
            const double fb = (i & 2) ? pb : 1.0 - pb;
            const double fd = (i & 4) ? pd : 1.0 - pd;
            atoms[i] = fa * fb * fd;
        }
        CHECK(conjunction_theorem_trial(ClassicalSpace({"a", "b", "d"},
                                                       atoms)) ==
              TheoremVerdict::equality);
    }
    SUBCASE("the canned space fails the premises") {
        CHECK(conjunction_theorem_trial(construct_10c_space()) ==
              TheoremVerdict::not_applicable);
    }
}

TEST_CASE("suite runners") {
    const LemmaSuiteResult lemma = run_lemma_suite(2000, 42);
    CHECK(lemma.trials == 2000);
    CHECK(lemma.violations == 0);
    CHECK(lemma.blocking_violations == 0);

    const ConjunctionSuiteResult conj = run_conjunction_suite(500, 42);
    CHECK(conj.trials == 500);
    CHECK(conj.violations == 0);
    CHECK(conj.joint_violations == 0);
    CHECK(conj.holds == 500);
    CHECK_FALSE(conj.exhausted);
}

TEST_CASE("feasibility_search") {
    SUBCASE("all-0.5 targets without constraints are trivially feasible") {
        TargetTable targets;
        targets.entries = {{"p_a", 0.5, 1.0},
                           {"p_b", 0.5, 1.0},
                           {"p_d", 0.5, 1.0}};
        const FeasibilityResult r =
            feasibility_search(targets, FeasibilityConstraints{}, 7, 60000);
        CHECK(r.best_residual <= 1e-9);
    }
    SUBCASE("deterministic given the seed") {
        TargetTable targets;
        targets.entries = {{"p_d", 0.57, 1.0}, {"p_d_a", 0.69, 1.0}};
        const FeasibilityResult r1 =
            feasibility_search(targets, FeasibilityConstraints{}, 5, 20000);
        const FeasibilityResult r2 =
            feasibility_search(targets, FeasibilityConstraints{}, 5, 20000);
        CHECK(r1.best_residual == r2.best_residual);
        CHECK(r1.evaluations == r2.evaluations);
        for (std::size_t i = 0; i < r1.best_space.atom_count(); ++i)
            CHECK(r1.best_space.atom(i) == r2.best_space.atom(i));
    }
    SUBCASE("zero budget is rejected") {
        CHECK_THROWS_AS(feasibility_search(TargetTable{},
                                           FeasibilityConstraints{}, 1, 0),
                        std::invalid_argument);
    }
    SUBCASE("unknown target names are rejected") {
        TargetTable targets;
        targets.entries = {{"q_d", 0.5, 1.0}};
        CHECK_THROWS_AS(feasibility_search(targets,
                                           FeasibilityConstraints{}, 1, 100),
                        ConfigError);
    }
}
