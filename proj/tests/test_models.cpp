#include <doctest.h>

#include <cmath>

#include "qlcause/models.hpp"
#include "test_helpers.hpp"

using namespace qlcause;

namespace {

constexpr double kPi = 3.14159265358979323846;

// independent-oracle references for the Fig. 1 working point
constexpr double kRootSmall = 0.07087121525220799;
constexpr double kRootLarge = 0.529128784747792;

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

ThreeCauseParams section4_params() {
    ThreeCauseParams p;
    p.six_dim.r = 0.01;
    p.six_dim.a3 = 0.15;
    p.six_dim.a4 = 0.15;
    p.six_dim.a5 = 0.08;
    p.six_dim.alpha1_pi = 0.75;
    p.six_dim.root_choice = RootChoice::large;
    p.r2 = 0.5;
    p.theta2_pi = 0.48;
    p.alpha2_pi = 1.268;
    return p;
}

void check_instance_invariants(const ModelInstance& m) {
    CHECK(is_projector(m.A.matrix(), 1e-10));
    CHECK(is_projector(m.B.matrix(), 1e-10));
    CHECK(is_projector(m.D.matrix(), 1e-10));
    CHECK(is_projector(m.joint.matrix(), 1e-10));
    CHECK(commutator_norm(m.A.matrix(), m.B.matrix()) <= 1e-12);
    if (m.C) {
        CHECK(is_projector(m.C->matrix(), 1e-10));
        CHECK(commutator_norm(m.A.matrix(), m.C->matrix()) <= 1e-12);
        CHECK(commutator_norm(m.B.matrix(), m.C->matrix()) <= 1e-12);
    }
    CHECK(std::abs(norm2(m.psi.vector()) - 1.0) <= 1e-12);
}

} // namespace

TEST_CASE("solve_independence_a1 returns the admissible quadratic roots") {
    const IndependenceRoots r1 = solve_independence_a1(0.15, 0.15, 0.1);
    REQUIRE(r1.small_root);
    REQUIRE(r1.large_root);
    CHECK(std::abs(*r1.small_root - kRootSmall) <= 1e-12);
    CHECK(std::abs(*r1.large_root - kRootLarge) <= 1e-12);

    const IndependenceRoots r2 = solve_independence_a1(0.15, 0.15, 0.08);
    REQUIRE(r2.small_root);
    REQUIRE(r2.large_root);
    CHECK(std::abs(*r2.small_root - 0.06180652708018286) <= 1e-12);
    CHECK(std::abs(*r2.large_root - 0.5581934729198171) <= 1e-12);

    // a1^2 - a1 = 0 has no strict-interior root
    CHECK_THROWS_AS(solve_independence_a1(0.0, 0.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("independence roots satisfy the product rule on built models") {
    for (RootChoice root : {RootChoice::small, RootChoice::large}) {
        TwoCauseParams p = fig1_params();
        p.root_choice = root;
        const ProbabilityReport rep = evaluate_report(build_two_cause(p));
        CHECK(std::abs(rep.p_joint - rep.p_a * rep.p_b) <= 1e-9);
    }
}

TEST_CASE("build_two_cause") {
    SUBCASE("the Fig. 1 instance passes all structural invariants") {
        check_instance_invariants(build_two_cause(fig1_params()));
    }
    SUBCASE("r = 0 zeroes the first component and keeps unit norm") {
        TwoCauseParams p = fig1_params();
        p.r = 0.0;
        const ModelInstance m = build_two_cause(p);
        CHECK(std::abs(m.psi.vector()[0]) == 0.0);
        CHECK(std::abs(norm2(m.psi.vector()) - 1.0) <= 1e-12);
    }
    SUBCASE("explicit a1 breaking normalization is rejected") {
        TwoCauseParams p = fig1_params();
        p.a1 = 0.7; // 0.7 + 0.4 > 1
        CHECK_THROWS_AS(build_two_cause(p), std::invalid_argument);
    }
    SUBCASE("phase convention: theta_pi = 1.5 gives amplitude -i") {
        TwoCauseParams p = fig1_params();
        p.theta_pi = 1.5;
        const ModelInstance m = build_two_cause(p);
        const Complex psi2 = m.psi.vector()[1];
        const double expected = std::sqrt(kRootLarge * 0.5);
        CHECK(std::abs(psi2.real()) <= 1e-15);
        CHECK(std::abs(psi2.imag() + expected) <= 1e-15);
    }
}

TEST_CASE("build_three_cause") {
    const ModelInstance m = build_three_cause(section4_params());
    SUBCASE("printed parameter set builds a valid 12-dim instance") {
        CHECK(m.dim == 12);
        check_instance_invariants(m);
    }
    SUBCASE("D = D6 x D2 is a rank-3 projector") {
        CHECK(is_projector(m.D.matrix(), 1e-10));
        CHECK(std::abs(trace(m.D.matrix()) - Complex{3.0, 0.0}) <= 1e-12);
    }
    SUBCASE("product state factorizes the joint") {
        const ProbabilityReport rep = evaluate_report(m);
        const double p_ab = norm2(
            apply(compose(m.A.matrix(), m.B.matrix()), m.psi.vector()));
        REQUIRE(rep.p_c);
        CHECK(std::abs(rep.p_joint - p_ab * *rep.p_c) <= 1e-12);
    }
    SUBCASE("ABC and D are genuinely incompatible at the printed angles") {
        CHECK(commutator_norm(m.joint.matrix(), m.D.matrix()) > 1e-3);
    }
}

TEST_CASE("evaluate_report reproduces the oracle values at Fig. 1") {
    const ModelInstance m = build_two_cause(fig1_params());
    const ProbabilityReport rep = evaluate_report(m);
    CHECK(std::abs(rep.p_d - 0.008177522138702613) <= 1e-11);
    REQUIRE(rep.p_d_given_a);
    REQUIRE(rep.p_d_given_b);
    REQUIRE(rep.p_d_given_joint);
    REQUIRE(rep.p_joint_given_d);
    REQUIRE(rep.p_joint_given_not_d);
    CHECK(std::abs(*rep.p_d_given_a - 0.12063537831225431) <= 1e-11);
    CHECK(std::abs(*rep.p_d_given_b - 0.1693262531861108) <= 1e-11);
    CHECK(std::abs(*rep.p_d_given_joint - 0.013091251261435557) <= 1e-11);
    CHECK(std::abs(*rep.p_joint_given_d - 0.8470729584463558) <= 1e-11);
    CHECK(std::abs(*rep.p_joint_given_not_d - 0.5265073524075026) <= 1e-11);
    CHECK(std::abs(rep.interference_a - (-0.15)) <= 1e-11);

    // the Fig. 1 caption orderings
    CHECK(*rep.p_d_given_a > rep.p_d);
    CHECK(*rep.p_d_given_b > rep.p_d);
    CHECK(rep.p_d < *rep.p_d_given_joint);
    CHECK(*rep.p_d_given_joint <
          std::min(*rep.p_d_given_a, *rep.p_d_given_b));
    CHECK(*rep.p_joint_given_d > *rep.p_joint_given_not_d);
}

TEST_CASE("small root flips the joint effect downward") {
    TwoCauseParams p = fig1_params();
    p.root_choice = RootChoice::small;
    const ProbabilityReport rep = evaluate_report(build_two_cause(p));
    REQUIRE(rep.p_d_given_joint);
    CHECK(*rep.p_d_given_joint < rep.p_d);
}

TEST_CASE("a commuting question obeys total probability and the product rule") {
    // making block 2 diagonal removes the only block that straddles A's
    // range, so D commutes with A and the interference must vanish
    TwoCauseParams p = fig1_params();
    p.blocks.block2 = GeneralizedBlockParams::Block{0.0, 0.0};
    const ModelInstance m = build_two_cause(p);
    CHECK(commutator_norm(m.A.matrix(), m.D.matrix()) <= 1e-12);
    const ProbabilityReport rep = evaluate_report(m);
    CHECK(std::abs(rep.interference_a) <= 1e-10);
    CHECK(std::abs(rep.p_joint - rep.p_a * rep.p_b) <= 1e-9);
}

TEST_CASE("generalized blocks default to the stock matrices") {
    TwoCauseParams p = fig1_params();
    const ModelInstance stock = build_two_cause(p);
    p.blocks.block1 = GeneralizedBlockParams::Block{0.25, -0.5};
    p.blocks.block2 = GeneralizedBlockParams::Block{0.25, 0.5};
    p.blocks.block3 = GeneralizedBlockParams::Block{p.alpha1_pi, 0.0};
    const ModelInstance general = build_two_cause(p);
    CHECK(max_abs_diff(stock.D.matrix(), general.D.matrix()) <= 1e-15);
}

TEST_CASE("sweep_r") {
    const std::vector<double> grid = linear_grid(0.0, 1.0, 101);
    REQUIRE(grid.size() == 101);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 1.0);

    const auto rows = sweep_r(fig1_params(), grid);
    REQUIRE(rows.size() == 101);

    SUBCASE("endpoints hit the analytic half exactly") {
        REQUIRE(rows.front().report.p_d_given_joint);
        REQUIRE(rows.back().report.p_d_given_joint);
        CHECK(*rows.front().report.p_d_given_joint == 0.5);
        CHECK(*rows.back().report.p_d_given_joint == 0.5);
    }
    SUBCASE("independence holds across the whole grid") {
        for (const SweepRow& row : rows)
            CHECK(std::abs(row.report.p_joint -
                           row.report.p_a * row.report.p_b) <= 1e-9);
    }
    SUBCASE("refitting a1 per point changes nothing (a1 is r-free)") {
        SweepOptions refit;
        refit.refit_a1_per_point = true;
        const auto rows2 = sweep_r(fig1_params(), grid, refit);
        for (std::size_t i = 0; i < rows.size(); ++i)
            CHECK(rows[i].report.p_d == rows2[i].report.p_d);
    }
    SUBCASE("grid values outside [0,1] are rejected") {
        CHECK_THROWS_AS(sweep_r(fig1_params(), {0.5, 1.5}),
                        std::invalid_argument);
    }
}

TEST_CASE("three-cause sweep varies the six-dim r") {
    const auto rows = sweep_r(section4_params(), {0.01, 0.5});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].report.p_d != rows[1].report.p_d);
}

TEST_CASE("toy witness closed forms") {
    SUBCASE("the (0.4, 0.1) lemma violation") {
        const ProbabilityReport rep =
            evaluate_report(build_toy_witness(0.4, 0.1));
        CHECK(std::abs(rep.p_d - 0.1) <= 1e-12);
        REQUIRE(rep.p_d_given_a);
        REQUIRE(rep.p_joint_given_d);
        REQUIRE(rep.p_joint_given_not_d);
        CHECK(std::abs(*rep.p_d_given_a - 0.4) <= 1e-12);
        CHECK(std::abs(*rep.p_joint_given_d - 0.4) <= 1e-12);
        CHECK(std::abs(*rep.p_joint_given_not_d - 0.6) <= 1e-12);
        // p(d|x) > p(d) while p(x|d) < p(x|not d)
        CHECK(*rep.p_d_given_a > rep.p_d);
        CHECK(*rep.p_joint_given_d < *rep.p_joint_given_not_d);
    }
    SUBCASE("zero prior still updates") {
        const ProbabilityReport rep =
            evaluate_report(build_toy_witness(0.4, 0.0));
        CHECK(rep.p_d <= 1e-12);
        CHECK_FALSE(rep.p_joint_given_d); // undefined marker
        REQUIRE(rep.p_d_given_a);
        CHECK(std::abs(*rep.p_d_given_a - 0.4) <= 1e-12);
    }
    SUBCASE("c2 = 1 collapses D onto X") {
        const ModelInstance m = build_toy_witness(1.0, 0.3);
        CHECK(max_abs_diff(m.D.matrix(), m.A.matrix()) <= 1e-15);
        const ProbabilityReport rep = evaluate_report(m);
        REQUIRE(rep.p_d_given_joint);
        CHECK(std::abs(*rep.p_d_given_joint - 1.0) <= 1e-12);
    }
    SUBCASE("p(x|d) = c2 independently of w") {
        for (double w : {0.05, 0.3, 0.6, 0.95}) {
            const ProbabilityReport rep =
                evaluate_report(build_toy_witness(0.37, w));
            REQUIRE(rep.p_joint_given_d);
            CHECK(std::abs(*rep.p_joint_given_d - 0.37) <= 1e-12);
        }
    }
}

TEST_CASE("three-cause factorization identities") {
    const ThreeCauseParams p = section4_params();
    const ProbabilityReport rep = evaluate_report(build_three_cause(p));

    TwoCauseParams six = p.six_dim;
    six.theta_pi = 1.5;
    const ProbabilityReport rep6 = evaluate_report(build_two_cause(six));

    const double alpha2 = p.alpha2_pi * kPi;
    const double c = std::cos(alpha2), s = std::sin(alpha2);
    ComplexVector psi2(2);
    psi2[0] = Complex{std::sqrt(p.r2), 0.0};
    psi2[1] = std::polar(1.0, p.theta2_pi * kPi) *
              Complex{std::sqrt(1.0 - p.r2), 0.0};
    const Complex overlap =
        Complex{c, 0.0} * psi2[0] + Complex{s, 0.0} * psi2[1];
    const double p2_d = std::norm(overlap);
    const double p2_d_given_c = c * c;

    REQUIRE(rep.p_d_given_a);
    REQUIRE(rep6.p_d_given_a);
    CHECK(std::abs(*rep.p_d_given_a - *rep6.p_d_given_a * p2_d) <= 1e-10);
    REQUIRE(rep.p_d_given_c);
    CHECK(std::abs(*rep.p_d_given_c - rep6.p_d * p2_d_given_c) <= 1e-10);
    REQUIRE(rep.p_d_given_joint);
    REQUIRE(rep6.p_d_given_joint);
    CHECK(std::abs(*rep.p_d_given_joint -
                   *rep6.p_d_given_joint * p2_d_given_c) <= 1e-10);
    CHECK(std::abs(rep.p_d - rep6.p_d * p2_d) <= 1e-10);
}

TEST_CASE("property: random admissible instances stay structurally sound") {
    Rng rng(777001);
    int built = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const double s = rng.uniform(0.1, 0.8);
        const double w1 = rng.exponential(), w2 = rng.exponential(),
                     w3 = rng.exponential();
        const double wsum = w1 + w2 + w3;
        TwoCauseParams p;
        p.a3 = s * w1 / wsum;
        p.a4 = s * w2 / wsum;
        p.a5 = s * w3 / wsum;
        p.r = rng.uniform();
        p.theta_pi = rng.uniform(0.0, 2.0);
        p.alpha1_pi = rng.uniform(0.0, 2.0);
        p.root_choice =
            rng.uniform() < 0.5 ? RootChoice::small : RootChoice::large;
        try {
            const ModelInstance m = build_two_cause(p);
            check_instance_invariants(m);
            ++built;

            ThreeCauseParams q;
            q.six_dim = p;
            q.r2 = rng.uniform();
            q.theta2_pi = rng.uniform(0.0, 2.0);
            q.alpha2_pi = rng.uniform(0.0, 2.0);
            check_instance_invariants(build_three_cause(q));
        } catch (const std::invalid_argument&) {
            // inadmissible root draw; skip
        }
    }
    CHECK(built > 30);
}
