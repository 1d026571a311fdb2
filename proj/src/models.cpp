#include "qlcause/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlcause {
namespace {

constexpr double kPi = std::numbers::pi;

Complex phase(double angle_pi) { return std::polar(1.0, angle_pi * kPi); }

// Rank-1 projector onto (cos beta, e^{i gamma} sin beta).
ComplexMatrix block_projector(double beta_pi, double gamma_pi) {
    const double c = std::cos(beta_pi * kPi);
    const double s = std::sin(beta_pi * kPi);
    const Complex g = phase(gamma_pi);
    return ComplexMatrix{{Complex{c * c, 0.0}, c * s * std::conj(g)},
                         {c * s * g, Complex{s * s, 0.0}}};
}

// The question operator: three 2x2 rank-1 blocks on the diagonal. The
// first two blocks are fixed at (1, -i)/sqrt(2) and (1, i)/sqrt(2), the
// third points along (cos alpha1, sin alpha1); overrides replace any of
// them with a general direction.
ComplexMatrix make_d6(double alpha1_pi, const GeneralizedBlockParams& blocks) {
    ComplexMatrix d(6, 6);
    const auto put = [&d](std::size_t off, const ComplexMatrix& blk) {
        d.at(off, off) = blk.at(0, 0);
        d.at(off, off + 1) = blk.at(0, 1);
        d.at(off + 1, off) = blk.at(1, 0);
        d.at(off + 1, off + 1) = blk.at(1, 1);
    };
    if (blocks.block1) {
        put(0, block_projector(blocks.block1->beta_pi,
                               blocks.block1->gamma_pi));
    } else {
        put(0, ComplexMatrix{{Complex{0.5, 0.0}, Complex{0.0, 0.5}},
                             {Complex{0.0, -0.5}, Complex{0.5, 0.0}}});
    }
    if (blocks.block2) {
        put(2, block_projector(blocks.block2->beta_pi,
                               blocks.block2->gamma_pi));
    } else {
        put(2, ComplexMatrix{{Complex{0.5, 0.0}, Complex{0.0, -0.5}},
                             {Complex{0.0, 0.5}, Complex{0.5, 0.0}}});
    }
    if (blocks.block3) {
        put(4, block_projector(blocks.block3->beta_pi,
                               blocks.block3->gamma_pi));
    } else {
        put(4, block_projector(alpha1_pi, 0.0));
    }
    return d;
}

const ComplexMatrix& a2_matrix() {
    static const ComplexMatrix a2 = ComplexMatrix::diagonal({1.0, 0.0});
    return a2;
}

const ComplexMatrix& b3_matrix() {
    static const ComplexMatrix b3 = ComplexMatrix::diagonal({1.0, 1.0, 0.0});
    return b3;
}

// The conditioning operators never change; build each exactly once.
struct SixDimOperators {
    ComplexMatrix a, b, ab;
};

const SixDimOperators& six_dim_operators() {
    static const SixDimOperators ops = [] {
        SixDimOperators o;
        o.a = kron(a2_matrix(), ComplexMatrix::identity(3));
        o.b = kron(ComplexMatrix::identity(2), b3_matrix());
        o.ab = kron(a2_matrix(), b3_matrix());
        return o;
    }();
    return ops;
}

struct TwelveDimOperators {
    ComplexMatrix a, b, c, abc;
};

const TwelveDimOperators& twelve_dim_operators() {
    static const TwelveDimOperators ops = [] {
        const auto& six = six_dim_operators();
        const ComplexMatrix i2 = ComplexMatrix::identity(2);
        TwelveDimOperators o;
        o.a = kron(six.a, i2);
        o.b = kron(six.b, i2);
        o.c = kron(ComplexMatrix::identity(6), a2_matrix());
        o.abc = kron(six.ab, a2_matrix());
        return o;
    }();
    return ops;
}

double resolve_a1(const TwoCauseParams& p) {
    if (p.a1)
        return *p.a1;
    return solve_independence_a1(p.a3, p.a4, p.a5).pick(p.root_choice);
}

void validate_two_cause(const TwoCauseParams& p, double a1) {
    if (p.r < 0.0 || p.r > 1.0)
        throw std::invalid_argument("two-cause model: r must lie in [0,1]");
    if (p.a3 < 0.0 || p.a4 < 0.0 || p.a5 < 0.0)
        throw std::invalid_argument(
            "two-cause model: amplitude weights must be nonnegative");
    if (!(a1 > 0.0) || !(a1 < 1.0))
        throw std::invalid_argument("two-cause model: a1 must lie in (0,1)");
}

// State components per the six-dim parameterization; the last radicand is
// forced by normalization.
ComplexVector make_psi6(double a1, const TwoCauseParams& p) {
    const double a6 = 1.0 - a1 - p.a3 - p.a4 - p.a5;
    if (a6 < -kNormTol)
        throw std::invalid_argument(
            "two-cause model: normalization deficit (a1+a3+a4+a5 > 1)");
    const double r1 = a1 * p.r;
    const double r2 = a1 * (1.0 - p.r);
    if (r1 < 0.0 || r2 < 0.0)
        throw std::invalid_argument("two-cause model: negative radicand");
    ComplexVector psi(6);
    psi[0] = Complex{std::sqrt(r1), 0.0};
    psi[1] = phase(p.theta_pi) * Complex{std::sqrt(r2), 0.0};
    psi[2] = Complex{std::sqrt(p.a3), 0.0};
    psi[3] = Complex{0.0, -1.0} * phase(p.blocks.delta_pi) *
             Complex{std::sqrt(p.a4), 0.0};
    psi[4] = Complex{-std::sqrt(p.a5), 0.0};
    psi[5] = Complex{std::sqrt(std::max(a6, 0.0)), 0.0};
    return psi;
}

std::optional<double> guarded_conditional(const ProjectorObservable& x,
                                          const ProjectorObservable& y,
                                          double p_y, const PureState& s) {
    if (p_y < 1e-12)
        return std::nullopt;
    return conditional_probability(x, y, s);
}

} // namespace

double IndependenceRoots::pick(RootChoice choice) const {
    const std::optional<double>& r =
        choice == RootChoice::small ? small_root : large_root;
    if (!r)
        throw std::invalid_argument(
            "independence constraint: requested root is not admissible");
    return *r;
}

IndependenceRoots solve_independence_a1(double a3, double a4, double a5) {
    if (a3 < 0.0 || a4 < 0.0 || a5 < 0.0)
        throw std::invalid_argument(
            "solve_independence_a1: weights must be nonnegative");
    const double sum = a3 + a4 + a5;
    if (!(sum < 1.0))
        throw std::invalid_argument(
            "solve_independence_a1: a3+a4+a5 must be below 1");
    const double b = sum - 1.0;
    const double c = a3 * (a4 + a5);
    const double disc = b * b - 4.0 * c;
    if (disc < 0.0)
        throw std::invalid_argument(
            "solve_independence_a1: negative discriminant");
    const double sq = std::sqrt(disc);
    const double lo = (-b - sq) / 2.0;
    const double hi = (-b + sq) / 2.0;
    IndependenceRoots roots;
    const double cap = 1.0 - sum;
    const auto admissible = [cap](double x) {
        return x > 0.0 && x < 1.0 && x <= cap;
    };
    if (admissible(lo))
        roots.small_root = lo;
    if (admissible(hi))
        roots.large_root = hi;
    if (roots.empty())
        throw std::invalid_argument(
            "solve_independence_a1: no admissible root in (0, 1-a3-a4-a5]");
    return roots;
}

ModelInstance build_two_cause(const TwoCauseParams& params) {
    const double a1 = resolve_a1(params);
    validate_two_cause(params, a1);
    const auto& ops = six_dim_operators();
    return ModelInstance{
        6,
        ProjectorObservable(ops.a, "A"),
        ProjectorObservable(ops.b, "B"),
        std::nullopt,
        ProjectorObservable(make_d6(params.alpha1_pi, params.blocks), "D"),
        ProjectorObservable::trusted(ops.ab, "AB"),
        PureState(make_psi6(a1, params)),
        params};
}

ModelInstance build_three_cause(const ThreeCauseParams& params) {
    TwoCauseParams six = params.six_dim;
    six.theta_pi = 1.5; // the 12-dim family fixes the six-dim phase at -i
    const double a1 = resolve_a1(six);
    validate_two_cause(six, a1);
    if (params.r2 < 0.0 || params.r2 > 1.0)
        throw std::invalid_argument(
            "three-cause model: r2 must lie in [0,1]");

    const auto& ops = twelve_dim_operators();
    const ComplexMatrix d6 = make_d6(six.alpha1_pi, six.blocks);
    const ComplexMatrix d2 = block_projector(params.alpha2_pi, 0.0);

    ComplexVector psi2(2);
    psi2[0] = Complex{std::sqrt(params.r2), 0.0};
    psi2[1] =
        phase(params.theta2_pi) * Complex{std::sqrt(1.0 - params.r2), 0.0};

    ThreeCauseParams stored = params;
    stored.six_dim.theta_pi = 1.5;
    return ModelInstance{
        12,
        ProjectorObservable::trusted(ops.a, "A"),
        ProjectorObservable::trusted(ops.b, "B"),
        ProjectorObservable::trusted(ops.c, "C"),
        ProjectorObservable::trusted(kron(d6, d2), "D"),
        ProjectorObservable::trusted(ops.abc, "ABC"),
        PureState(kron(make_psi6(a1, six), psi2)),
        stored};
}

ModelInstance build_toy_witness(double c2, double w) {
    return build_toy_witness(WitnessParams{c2, w});
}

ModelInstance build_toy_witness(const WitnessParams& params) {
    if (params.c2 < 0.0 || params.c2 > 1.0 || params.w < 0.0 ||
        params.w > 1.0)
        throw std::invalid_argument(
            "toy witness: c2 and w must lie in [0,1]");
    const double c = std::sqrt(params.c2);
    const double s = std::sqrt(1.0 - params.c2);
    const double sw = std::sqrt(params.w);
    const double swc = std::sqrt(1.0 - params.w);

    const ComplexMatrix x = ComplexMatrix::diagonal({1.0, 0.0});
    const ComplexMatrix d{{Complex{c * c, 0.0}, Complex{c * s, 0.0}},
                          {Complex{c * s, 0.0}, Complex{s * s, 0.0}}};
    // psi = sqrt(w) u + sqrt(1-w) v with u = (c, s), v = (-s, c)
    ComplexVector psi(2);
    psi[0] = Complex{sw * c - swc * s, 0.0};
    psi[1] = Complex{sw * s + swc * c, 0.0};

    return ModelInstance{2,
                         ProjectorObservable(x, "X"),
                         ProjectorObservable(ComplexMatrix::identity(2), "I"),
                         std::nullopt,
                         ProjectorObservable(d, "D"),
                         ProjectorObservable(x, "X"),
                         PureState(std::move(psi)),
                         params};
}

ProbabilityReport evaluate_report(const ModelInstance& m) {
    ProbabilityReport rep;
    rep.p_a = born_probability(m.A, m.psi);
    rep.p_b = born_probability(m.B, m.psi);
    if (m.C)
        rep.p_c = born_probability(*m.C, m.psi);
    rep.p_joint = born_probability(m.joint, m.psi);
    rep.p_d = born_probability(m.D, m.psi);

    rep.p_d_given_a = guarded_conditional(m.D, m.A, rep.p_a, m.psi);
    rep.p_d_given_b = guarded_conditional(m.D, m.B, rep.p_b, m.psi);
    if (m.C)
        rep.p_d_given_c = guarded_conditional(m.D, *m.C, *rep.p_c, m.psi);
    rep.p_d_given_joint =
        guarded_conditional(m.D, m.joint, rep.p_joint, m.psi);
    rep.p_joint_given_d = guarded_conditional(m.joint, m.D, rep.p_d, m.psi);
    rep.p_joint_given_not_d = guarded_conditional(
        m.joint, m.D.complement(), 1.0 - rep.p_d, m.psi);
    rep.interference_a = ltp_interference(m.D, m.A, m.psi);
    return rep;
}

namespace {

template <typename Params, typename SetR, typename Build>
std::vector<SweepRow> sweep_impl(Params params, const std::vector<double>& grid,
                                 SetR set_r, Build build) {
    for (double r : grid)
        if (r < 0.0 || r > 1.0)
            throw std::invalid_argument("sweep_r: grid values must lie in [0,1]");
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double r : grid) {
        set_r(params, r);
        rows.push_back(SweepRow{r, evaluate_report(build(params))});
    }
    return rows;
}

} // namespace

std::vector<SweepRow> sweep_r(const TwoCauseParams& params,
                              const std::vector<double>& grid,
                              const SweepOptions& options) {
    TwoCauseParams p = params;
    if (!options.refit_a1_per_point && !p.a1)
        p.a1 = resolve_a1(p); // pin a1 across the sweep
    return sweep_impl(
        p, grid, [](TwoCauseParams& q, double r) { q.r = r; },
        [](const TwoCauseParams& q) { return build_two_cause(q); });
}

std::vector<SweepRow> sweep_r(const ThreeCauseParams& params,
                              const std::vector<double>& grid,
                              const SweepOptions& options) {
    ThreeCauseParams p = params;
    if (!options.refit_a1_per_point && !p.six_dim.a1) {
        TwoCauseParams six = p.six_dim;
        six.theta_pi = 1.5;
        p.six_dim.a1 = resolve_a1(six);
    }
    return sweep_impl(
        p, grid, [](ThreeCauseParams& q, double r) { q.six_dim.r = r; },
        [](const ThreeCauseParams& q) { return build_three_cause(q); });
}

std::vector<double> linear_grid(double start, double stop, std::size_t count) {
    if (count == 0)
        throw std::invalid_argument("linear_grid: count must be positive");
    if (count == 1)
        return {start};
    std::vector<double> grid(count);
    const double span = stop - start;
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = start +
                  span * (static_cast<double>(i) /
                          static_cast<double>(count - 1));
    return grid;
}

} // namespace qlcause
