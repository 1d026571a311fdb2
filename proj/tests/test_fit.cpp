#include <doctest.h>

#include <cmath>

#include "qlcause/fit.hpp"
#include "test_helpers.hpp"

using namespace qlcause;

namespace {

TwoCauseParams fig1_params() {
    TwoCauseParams p;
    p.r = 0.5;
    p.theta_pi = 0.427;
    p.a3 = 0.15;
    p.a4 = 0.15;
    p.a5 = 0.1;
    p.alpha1_pi = 1.25;
    p.root_choice = RootChoice::large;
    return p;
}

TargetTable targets_from_report(const ProbabilityReport& rep, bool two) {
    TargetTable t;
    t.entries.push_back({"p_d", rep.p_d, 1.0});
    t.entries.push_back({"p_d_a", *rep.p_d_given_a, 1.0});
    t.entries.push_back({"p_d_b", *rep.p_d_given_b, 1.0});
    t.entries.push_back({two ? "p_d_ab" : "p_d_abc",
                         *rep.p_d_given_joint, 1.0});
    t.entries.push_back(
        {two ? "p_ab_d" : "p_abc_d", *rep.p_joint_given_d, 1.0});
    return t;
}

TargetTable table2() {
    TargetTable t;
    t.entries = {{"p_d", 0.57, 1.0},
                 {"p_d_a", 0.69, 1.0},
                 {"p_d_b", 0.63, 1.0},
                 {"p_d_c", 0.73, 1.0},
                 {"p_d_abc", 0.55, 1.0}};
    return t;
}

} // namespace

TEST_CASE("objective") {
    const ProbabilityReport rep =
        evaluate_report(build_two_cause(fig1_params()));
    SUBCASE("matching targets give zero") {
        CHECK(objective(rep, ModelFamily::two_cause,
                        targets_from_report(rep, true)) == 0.0);
    }
    SUBCASE("zero weights give zero") {
        TargetTable t = targets_from_report(rep, true);
        for (auto& entry : t.entries)
            entry.weight = 0.0;
        CHECK(objective(rep, ModelFamily::two_cause, t) == 0.0);
    }
    SUBCASE("the printed 12-dim point sits far from the survey numbers") {
        ThreeCauseParams p;
        p.six_dim.r = 0.5;
        p.six_dim.a3 = 0.15;
        p.six_dim.a4 = 0.15;
        p.six_dim.a5 = 0.08;
        p.six_dim.alpha1_pi = 0.75;
        const ProbabilityReport rep3 =
            evaluate_report(build_three_cause(p));
        CHECK(objective(rep3, ModelFamily::three_cause, table2()) > 0.1);
    }
    SUBCASE("family-mismatched target names are rejected") {
        CHECK_THROWS_AS(objective(rep, ModelFamily::two_cause, table2()),
                        ConfigError);
        TargetTable bad;
        bad.entries = {{"p_x_y_z", 0.5, 1.0}};
        CHECK_THROWS_AS(objective(rep, ModelFamily::two_cause, bad),
                        ConfigError);
    }
}

TEST_CASE("report_target_value resolves the family joint convention") {
    const ProbabilityReport rep =
        evaluate_report(build_two_cause(fig1_params()));
    CHECK(*report_target_value(rep, ModelFamily::two_cause, "p_d_ab") ==
          *rep.p_d_given_joint);
    CHECK(*report_target_value(rep, ModelFamily::two_cause, "p_ab_not_d") ==
          *rep.p_joint_given_not_d);
    CHECK_THROWS_AS(
        report_target_value(rep, ModelFamily::two_cause, "p_d_abc"),
        ConfigError);
}

TEST_CASE("reports are invariant under a global phase of the state") {
    const ModelInstance m = build_two_cause(fig1_params());
    const Complex phase = std::polar(1.0, 1.2345);
    ComplexVector rotated(m.psi.vector().dim());
    for (std::size_t i = 0; i < rotated.dim(); ++i)
        rotated[i] = phase * m.psi.vector()[i];
    const ModelInstance m2{m.dim,   m.A,
                           m.B,     m.C,
                           m.D,     m.joint,
                           PureState(std::move(rotated)), m.params};
    const ProbabilityReport a = evaluate_report(m);
    const ProbabilityReport b = evaluate_report(m2);
    CHECK(std::abs(a.p_d - b.p_d) <= 1e-12);
    CHECK(std::abs(a.p_a - b.p_a) <= 1e-12);
    CHECK(std::abs(a.p_joint - b.p_joint) <= 1e-12);
    CHECK(std::abs(*a.p_d_given_joint - *b.p_d_given_joint) <= 1e-12);
    CHECK(std::abs(*a.p_joint_given_not_d - *b.p_joint_given_not_d) <=
          1e-12);
    CHECK(std::abs(a.interference_a - b.interference_a) <= 1e-12);
}

TEST_CASE("self-fit recovers generated targets") {
    const ProbabilityReport generated =
        evaluate_report(build_two_cause(fig1_params()));
    FitProblem problem;
    problem.family = ModelFamily::two_cause;
    problem.targets = targets_from_report(generated, true);
    problem.seed = 11;
    problem.starts = 24;
    problem.budget = 150000;
    const FitResult result = fit(problem);
    CHECK(result.max_abs_error <= 1e-6);
    CHECK(result.evaluations <= problem.budget + 8);
    // never worse than the best raw start
    CHECK(result.objective_value <= result.best_start_objective + 1e-15);
}

TEST_CASE("fit is deterministic for a fixed seed") {
    FitProblem problem;
    problem.family = ModelFamily::two_cause;
    problem.targets = targets_from_report(
        evaluate_report(build_two_cause(fig1_params())), true);
    problem.seed = 3;
    problem.starts = 6;
    problem.budget = 20000;
    const FitResult r1 = fit(problem);
    const FitResult r2 = fit(problem);
    CHECK(r1.rmse == r2.rmse);
    CHECK(r1.evaluations == r2.evaluations);
    CHECK(r1.root_choice == r2.root_choice);
    REQUIRE(r1.best_params.size() == r2.best_params.size());
    for (const auto& [name, value] : r1.best_params) {
        REQUIRE(r2.best_params.count(name) == 1);
        CHECK(r2.best_params.at(name) == value);
    }
}

TEST_CASE("fixed parameters are honored and invalid pins are caught") {
    FitProblem problem;
    problem.family = ModelFamily::two_cause;
    problem.targets = targets_from_report(
        evaluate_report(build_two_cause(fig1_params())), true);
    problem.seed = 5;
    problem.starts = 4;
    problem.budget = 8000;
    problem.fixed["a5"] = 0.1;
    const FitResult result = fit(problem);
    CHECK(result.best_params.at("a5") == 0.1);

    FitProblem bad = problem;
    bad.fixed["a1"] = 0.5; // contradiction with elimination
    CHECK_THROWS_AS(fit(bad), ConfigError);

    FitProblem unknown = problem;
    unknown.fixed["nonsense"] = 1.0;
    CHECK_THROWS_AS(fit(unknown), ConfigError);
}

TEST_CASE("an unbuildable family raises FitInfeasible") {
    FitProblem problem;
    problem.family = ModelFamily::two_cause;
    problem.targets = targets_from_report(
        evaluate_report(build_two_cause(fig1_params())), true);
    problem.fixed["a3"] = 0.9;
    problem.fixed["a4"] = 0.5; // a3+a4 > 1: no admissible model
    problem.free_names = {"r", "theta_pi"};
    problem.starts = 2;
    problem.budget = 4000;
    CHECK_THROWS_AS(fit(problem), FitInfeasible);
}

TEST_CASE("free a1 mode enforces independence through the penalty") {
    const ProbabilityReport generated =
        evaluate_report(build_two_cause(fig1_params()));
    FitProblem problem;
    problem.family = ModelFamily::two_cause;
    problem.targets = targets_from_report(generated, true);
    problem.eliminate_a1 = false;
    problem.independence_penalty_weight = 5.0;
    problem.seed = 17;
    problem.starts = 16;
    problem.budget = 120000;
    const FitResult result = fit(problem);
    CHECK(result.best_params.count("a1") == 1);
    // penalty keeps the recovered point essentially independent
    CHECK(std::abs(result.report.p_joint -
                   result.report.p_a * result.report.p_b) <= 1e-3);
}
