#pragma once
// Concrete two-cause (6-dim) and three-cause (12-dim) interference models:
// operator construction, the independence constraint on a1, full
// probability reports, r-sweeps, and the 2-dim lemma-violation witness.
//
// Angle parameters are stored in units of pi (the *_pi suffix), matching
// the external file convention; they are multiplied by pi exactly once when
// a model is built.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qlcause/quantum.hpp"

namespace qlcause {

enum class RootChoice { small, large };

// Fit-family extension of the question operator: each 2x2 block of the
// 6-dim D may be replaced by the rank-1 projector onto
// (cos beta, e^{i gamma} sin beta), and the fourth state component gets an
// extra phase delta. Absent overrides keep the stock blocks bit-for-bit.
struct GeneralizedBlockParams {
    struct Block {
        double beta_pi = 0.0;
        double gamma_pi = 0.0;
    };
    std::optional<Block> block1, block2, block3;
    double delta_pi = 0.0;

    bool is_default() const {
        return !block1 && !block2 && !block3 && delta_pi == 0.0;
    }
};

struct TwoCauseParams {
    double r = 0.5;
    double theta_pi = 0.427;
    double a3 = 0.15;
    double a4 = 0.15;
    double a5 = 0.1;
    double alpha1_pi = 1.25;
    RootChoice root_choice = RootChoice::large;
    std::optional<double> a1; // explicit value; otherwise solved from the
                              // independence quadratic
    GeneralizedBlockParams blocks;
};

struct ThreeCauseParams {
    TwoCauseParams six_dim; // theta_pi is pinned to 1.5 when building
    double r2 = 0.5;
    double theta2_pi = 0.48;
    double alpha2_pi = 1.268;
};

struct WitnessParams {
    double c2 = 0.4; // cos^2 of the angle between D's range and X's range
    double w = 0.1;  // prior weight of D's range in the state
};

// Admissible solutions of a1^2 + a1(a3+a4+a5-1) + a3(a4+a5) = 0, filtered
// to (0, 1-a3-a4-a5] intersected with (0,1).
struct IndependenceRoots {
    std::optional<double> small_root;
    std::optional<double> large_root;

    double pick(RootChoice choice) const; // throws when absent
    bool empty() const { return !small_root && !large_root; }
};

IndependenceRoots solve_independence_a1(double a3, double a4, double a5);

struct ModelInstance {
    std::size_t dim;
    ProjectorObservable A;
    ProjectorObservable B;
    std::optional<ProjectorObservable> C;
    ProjectorObservable D;
    ProjectorObservable joint; // AB, ABC, or X for the witness
    PureState psi;
    std::variant<TwoCauseParams, ThreeCauseParams, WitnessParams> params;
};

// Empty optionals are explicit "undefined" markers: the conditioning event
// had probability below 1e-12.
struct ProbabilityReport {
    double p_a = 0.0;
    double p_b = 0.0;
    std::optional<double> p_c;
    double p_joint = 0.0;
    double p_d = 0.0;
    std::optional<double> p_d_given_a;
    std::optional<double> p_d_given_b;
    std::optional<double> p_d_given_c;
    std::optional<double> p_d_given_joint;
    std::optional<double> p_joint_given_d;
    std::optional<double> p_joint_given_not_d;
    double interference_a = 0.0;
};

ModelInstance build_two_cause(const TwoCauseParams& params);
ModelInstance build_three_cause(const ThreeCauseParams& params);

// 2-dim lemma-violation witness: X = diag(1,0), D projects onto
// (cos a, sin a) with cos^2 a = c2, psi = sqrt(w) u + sqrt(1-w) v with
// v orthogonal to u. Closed forms: p(d)=w, p(d|x)=c2, p(x|d)=c2,
// p(x|not d)=1-c2.
ModelInstance build_toy_witness(double c2, double w);
ModelInstance build_toy_witness(const WitnessParams& params);

ProbabilityReport evaluate_report(const ModelInstance& m);

struct SweepRow {
    double r;
    ProbabilityReport report;
};

struct SweepOptions {
    // Re-derive a1 from the quadratic at every grid point instead of
    // pinning the value resolved once up front.
    bool refit_a1_per_point = false;
};

std::vector<SweepRow> sweep_r(const TwoCauseParams& params,
                              const std::vector<double>& grid,
                              const SweepOptions& options = {});
std::vector<SweepRow> sweep_r(const ThreeCauseParams& params,
                              const std::vector<double>& grid,
                              const SweepOptions& options = {});

// count evenly spaced values from start to stop inclusive, endpoints exact.
std::vector<double> linear_grid(double start, double stop, std::size_t count);

} // namespace qlcause
