#include <doctest.h>

#include <cmath>

#include "qlcause/models.hpp"
#include "qlcause/quantum.hpp"
#include "test_helpers.hpp"

using namespace qlcause;
using qlcause::testing::random_projector;
using qlcause::testing::random_state;

namespace {

// reference values computed with an independent dense-matrix oracle
constexpr double kFig1Pd = 0.008177522138702613;
constexpr double kFig1PdA = 0.12063537831225431;
constexpr double kFig1PdB = 0.1693262531861108;
constexpr double kFig1PdAB = 0.013091251261435557;
constexpr double kFig1PabD = 0.8470729584463558;
constexpr double kFig1PabNotD = 0.5265073524075026;

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

ProjectorObservable direction_projector(double alpha, std::string label) {
    const double c = std::cos(alpha), s = std::sin(alpha);
    return ProjectorObservable(
        ComplexMatrix{{Complex{c * c, 0.0}, Complex{c * s, 0.0}},
                      {Complex{c * s, 0.0}, Complex{s * s, 0.0}}},
        std::move(label));
}

} // namespace

TEST_CASE("born probability basics") {
    const ModelInstance m = build_two_cause(fig1_params());
    const PureState e1(ComplexVector::basis(6, 0));
    CHECK(born_probability(m.A, e1) == 1.0);

    // ||AB psi||^2 telescopes to a1 r + a1 (1-r) = a1
    const double a1 = 0.529128784747792;
    CHECK(std::abs(born_probability(m.joint, m.psi) - a1) <= 1e-14);

    CHECK(std::abs(born_probability(m.D, m.psi) - kFig1Pd) <= 1e-11);

    CHECK_THROWS_AS(
        born_probability(m.A, PureState(ComplexVector::basis(2, 0))),
        std::invalid_argument);
}

TEST_CASE("pure and rank-1 density computations agree") {
    Rng rng(31337);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t dim = 2 + trial % 5;
        const PureState s = random_state(rng, dim);
        const DensityOperator rho = DensityOperator::pure(s);
        const ProjectorObservable p =
            random_projector(rng, dim, 1 + trial % dim);
        CHECK(std::abs(born_probability(p, s) - born_probability(p, rho)) <=
              1e-10);
        const ProjectorObservable q =
            random_projector(rng, dim, 1 + (trial / 2) % dim);
        if (born_probability(q, s) > 1e-6)
            CHECK(std::abs(conditional_probability(p, q, s) -
                           conditional_probability(p, q, rho)) <= 1e-10);
    }
}

TEST_CASE("luders conditioning") {
    const ModelInstance m = build_two_cause(fig1_params());
    const PureState e1(ComplexVector::basis(6, 0));
    SUBCASE("fixed point") {
        const PureState after = luders_condition(m.A, e1);
        CHECK(std::abs(after.vector()[0] - Complex{1.0, 0.0}) <= 1e-15);
    }
    SUBCASE("conditioning on AB leaves support on components 1-2") {
        const PureState after = luders_condition(m.joint, m.psi);
        CHECK(std::abs(norm2(after.vector()) - 1.0) <= 1e-12);
        for (std::size_t i = 2; i < 6; ++i)
            CHECK(std::abs(after.vector()[i]) == 0.0);
    }
    SUBCASE("orthogonal state raises the explicit error") {
        const PureState e4(ComplexVector::basis(6, 3));
        CHECK_THROWS_WITH_AS(luders_condition(m.A, e4),
                             doctest::Contains("undefined conditional"),
                             UndefinedConditional);
    }
}

TEST_CASE("conditional probabilities at the Fig. 1 point") {
    const ModelInstance m = build_two_cause(fig1_params());
    CHECK(std::abs(conditional_probability(m.D, m.A, m.psi) - kFig1PdA) <=
          1e-11);
    CHECK(std::abs(conditional_probability(m.D, m.B, m.psi) - kFig1PdB) <=
          1e-11);
    CHECK(std::abs(conditional_probability(m.D, m.joint, m.psi) -
                   kFig1PdAB) <= 1e-11);
    CHECK(std::abs(conditional_probability(m.joint, m.D, m.psi) -
                   kFig1PabD) <= 1e-11);
    CHECK(std::abs(conditional_on_complement(m.joint, m.D, m.psi) -
                   kFig1PabNotD) <= 1e-11);
}

TEST_CASE("2-dim toy: p(D|X) is cos^2 alpha for every state X accepts") {
    Rng rng(555);
    const ProjectorObservable x(ComplexMatrix::diagonal({1.0, 0.0}), "X");
    for (int trial = 0; trial < 40; ++trial) {
        const double alpha = rng.uniform(0.05, 1.5);
        const ProjectorObservable d = direction_projector(alpha, "D");
        const PureState s = random_state(rng, 2);
        if (norm2(apply(x.matrix(), s.vector())) < 1e-6)
            continue;
        CHECK(std::abs(conditional_probability(d, x, s) -
                       std::cos(alpha) * std::cos(alpha)) <= 1e-12);
    }
}

TEST_CASE("commuting projectors reduce to the classical ratio") {
    Rng rng(717);
    for (int trial = 0; trial < 40; ++trial) {
        // diagonal projectors always commute
        ComplexMatrix xm(4, 4), ym(4, 4);
        for (std::size_t i = 0; i < 4; ++i) {
            xm.at(i, i) = rng.uniform() < 0.5 ? 1.0 : 0.0;
            ym.at(i, i) = rng.uniform() < 0.5 ? 1.0 : 0.0;
        }
        const ProjectorObservable x(xm, "X"), y(ym, "Y");
        const ProjectorObservable xy(compose(xm, ym), "XY");
        const PureState s = random_state(rng, 4);
        const double py = born_probability(y, s);
        if (py < 1e-6)
            continue;
        CHECK(std::abs(conditional_probability(x, y, s) * py -
                       born_probability(xy, s)) <= 1e-10);
    }
}

TEST_CASE("conditional on complement edge cases") {
    const ModelInstance m = build_two_cause(fig1_params());
    SUBCASE("zero projector complement is the whole space") {
        const ProjectorObservable zero(ComplexMatrix(6, 6), "0");
        CHECK(std::abs(conditional_on_complement(m.D, zero, m.psi) -
                       born_probability(m.D, m.psi)) <= 1e-14);
    }
    SUBCASE("conditioning on the complement of certainty fails") {
        const ProjectorObservable id(ComplexMatrix::identity(6), "I");
        CHECK_THROWS_AS(conditional_on_complement(m.D, id, m.psi),
                        UndefinedConditional);
    }
}

TEST_CASE("ltp interference") {
    const ModelInstance m = build_two_cause(fig1_params());
    SUBCASE("commuting pairs satisfy total probability exactly") {
        CHECK(std::abs(ltp_interference(m.A, m.B, m.psi)) <= 1e-10);
        CHECK(std::abs(ltp_interference(m.D, m.joint, m.psi)) <= 1e-10);
    }
    SUBCASE("degenerate partition contributes nothing") {
        const PureState e1(ComplexVector::basis(6, 0));
        CHECK(std::abs(ltp_interference(m.D, m.A, e1)) <= 1e-12);
    }
    SUBCASE("the Fig. 1 point interferes destructively through A") {
        const double interference = ltp_interference(m.D, m.A, m.psi);
        CHECK(std::abs(interference) >= 0.01);
        CHECK(std::abs(interference - (-0.15)) <= 1e-11);
    }
}

TEST_CASE("property: interference vanishes whenever projectors commute") {
    Rng rng(90210);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t dim = 3 + trial % 4;
        ComplexMatrix xm(dim, dim), ym(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) {
            xm.at(i, i) = rng.uniform() < 0.5 ? 1.0 : 0.0;
            ym.at(i, i) = rng.uniform() < 0.5 ? 1.0 : 0.0;
        }
        if (commutator_norm(xm, ym) > 1e-12)
            continue;
        const PureState s = random_state(rng, dim);
        const double py = norm2(apply(ym, s.vector()));
        if (py < 1e-6 || 1.0 - py < 1e-6)
            continue;
        const ProjectorObservable x(xm, "X"), y(ym, "Y");
        CHECK(std::abs(ltp_interference(x, y, s)) <= 1e-10);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("property: probabilities stay inside [0,1]") {
    Rng rng(1234321);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t dim = 2 + trial % 5;
        const ProjectorObservable p =
            random_projector(rng, dim, 1 + trial % dim);
        const PureState s = random_state(rng, dim);
        const double prob = born_probability(p, s);
        CHECK(prob >= 0.0);
        CHECK(prob <= 1.0 + 1e-12);
    }
}

TEST_CASE("zero-prior conditioning can still raise probability") {
    // state orthogonal to D's range: p(D) ~ 0 but p(D|X) = cos^2 alpha
    const double alpha = std::acos(std::sqrt(0.4));
    const ProjectorObservable x(ComplexMatrix::diagonal({1.0, 0.0}), "X");
    const ProjectorObservable d = direction_projector(alpha, "D");
    ComplexVector v(2);
    v[0] = Complex{-std::sin(alpha), 0.0};
    v[1] = Complex{std::cos(alpha), 0.0};
    const PureState s(std::move(v));
    CHECK(born_probability(d, s) <= 1e-12);
    CHECK(std::abs(conditional_probability(d, x, s) - 0.4) <= 1e-12);
}

TEST_CASE("state, density, and projector validation") {
    ComplexVector not_unit(3);
    not_unit[0] = Complex{0.5, 0.0};
    CHECK_THROWS_AS(PureState{not_unit}, std::invalid_argument);

    CHECK_THROWS_AS(DensityOperator{ComplexMatrix::identity(3)},
                    std::invalid_argument); // trace 3
    ComplexMatrix skew(2, 2);
    skew.at(0, 1) = Complex{0.0, 1.0};
    skew.at(0, 0) = 1.0;
    CHECK_THROWS_AS(DensityOperator{skew}, std::invalid_argument);

    ComplexMatrix halfway(2, 2);
    halfway.at(0, 0) = 0.5;
    CHECK_THROWS_AS(ProjectorObservable(halfway, "bad"),
                    std::invalid_argument);
}
