#include "qlcause/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qlcause/optim.hpp"
#include "qlcause/random.hpp"

namespace qlcause {
namespace {

constexpr double kGuardPenalty = 10.0; // objective for unbuildable params

enum class Kind { unit, angle };

enum class FieldId {
    r,
    theta_pi,
    a3,
    a4,
    a5,
    alpha1_pi,
    a1,
    r2,
    theta2_pi,
    alpha2_pi,
    beta1_pi,
    gamma1_pi,
    beta2_pi,
    gamma2_pi,
    beta3_pi,
    gamma3_pi,
    delta_pi,
};

struct ParamDef {
    FieldId id;
    const char* name;
    Kind kind;
    double dflt;
};

std::vector<ParamDef> catalog(ModelFamily family, bool eliminate_a1) {
    std::vector<ParamDef> defs;
    defs.push_back({FieldId::r, "r", Kind::unit, 0.5});
    if (family == ModelFamily::two_cause)
        defs.push_back({FieldId::theta_pi, "theta_pi", Kind::angle, 0.427});
    defs.push_back({FieldId::a3, "a3", Kind::unit, 0.15});
    defs.push_back({FieldId::a4, "a4", Kind::unit, 0.15});
    defs.push_back({FieldId::a5, "a5", Kind::unit,
                    family == ModelFamily::two_cause ? 0.1 : 0.08});
    if (family != ModelFamily::three_cause_generalized)
        defs.push_back({FieldId::alpha1_pi, "alpha1_pi", Kind::angle,
                        family == ModelFamily::two_cause ? 1.25 : 0.75});
    if (!eliminate_a1)
        defs.push_back({FieldId::a1, "a1", Kind::unit, 0.5});
    if (family != ModelFamily::two_cause) {
        defs.push_back({FieldId::r2, "r2", Kind::unit, 0.5});
        defs.push_back({FieldId::theta2_pi, "theta2_pi", Kind::angle, 0.48});
        defs.push_back(
            {FieldId::alpha2_pi, "alpha2_pi", Kind::angle, 1.268});
    }
    if (family == ModelFamily::three_cause_generalized) {
        // stock block directions in units of pi
        defs.push_back({FieldId::beta1_pi, "beta1_pi", Kind::angle, 0.25});
        defs.push_back({FieldId::gamma1_pi, "gamma1_pi", Kind::angle, -0.5});
        defs.push_back({FieldId::beta2_pi, "beta2_pi", Kind::angle, 0.25});
        defs.push_back({FieldId::gamma2_pi, "gamma2_pi", Kind::angle, 0.5});
        defs.push_back({FieldId::beta3_pi, "beta3_pi", Kind::angle, 0.75});
        defs.push_back({FieldId::gamma3_pi, "gamma3_pi", Kind::angle, 0.0});
        defs.push_back({FieldId::delta_pi, "delta_pi", Kind::angle, 0.0});
    }
    return defs;
}

double from_unit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double to_unit(double v) {
    const double c = std::clamp(v, 1e-9, 1.0 - 1e-9);
    return std::log(c / (1.0 - c));
}

double wrap_angle_pi(double v) {
    double w = std::fmod(v, 2.0);
    if (w < 0.0)
        w += 2.0;
    return w;
}

enum class ReportField {
    p_d,
    p_a,
    p_b,
    p_c,
    p_joint,
    p_d_given_a,
    p_d_given_b,
    p_d_given_c,
    p_d_given_joint,
    p_joint_given_d,
    p_joint_given_not_d,
};

ReportField resolve_target(const std::string& name, ModelFamily family) {
    const bool two = family == ModelFamily::two_cause;
    const std::string joint = two ? "ab" : "abc";
    if (name == "p_d")
        return ReportField::p_d;
    if (name == "p_a")
        return ReportField::p_a;
    if (name == "p_b")
        return ReportField::p_b;
    if (name == "p_c" && !two)
        return ReportField::p_c;
    if (name == "p_" + joint)
        return ReportField::p_joint;
    if (name == "p_d_a")
        return ReportField::p_d_given_a;
    if (name == "p_d_b")
        return ReportField::p_d_given_b;
    if (name == "p_d_c" && !two)
        return ReportField::p_d_given_c;
    if (name == "p_d_" + joint)
        return ReportField::p_d_given_joint;
    if (name == "p_" + joint + "_d")
        return ReportField::p_joint_given_d;
    if (name == "p_" + joint + "_not_d")
        return ReportField::p_joint_given_not_d;
    throw ConfigError("target '" + name + "' is not available for the " +
                      family_name(family) + " family");
}

std::optional<double> report_value(const ProbabilityReport& rep,
                                   ReportField field) {
    switch (field) {
    case ReportField::p_d:
        return rep.p_d;
    case ReportField::p_a:
        return rep.p_a;
    case ReportField::p_b:
        return rep.p_b;
    case ReportField::p_c:
        return rep.p_c;
    case ReportField::p_joint:
        return rep.p_joint;
    case ReportField::p_d_given_a:
        return rep.p_d_given_a;
    case ReportField::p_d_given_b:
        return rep.p_d_given_b;
    case ReportField::p_d_given_c:
        return rep.p_d_given_c;
    case ReportField::p_d_given_joint:
        return rep.p_d_given_joint;
    case ReportField::p_joint_given_d:
        return rep.p_joint_given_d;
    case ReportField::p_joint_given_not_d:
        return rep.p_joint_given_not_d;
    }
    return std::nullopt;
}

struct CompiledTarget {
    std::string name;
    ReportField field;
    double value;
    double weight;
};

std::vector<CompiledTarget> compile_targets(const TargetTable& targets,
                                            ModelFamily family) {
    std::vector<CompiledTarget> out;
    out.reserve(targets.entries.size());
    for (const auto& entry : targets.entries)
        out.push_back({entry.name, resolve_target(entry.name, family),
                       entry.value, entry.weight});
    return out;
}

double weighted_rmse(const ProbabilityReport& rep,
                     const std::vector<CompiledTarget>& targets) {
    double sq = 0.0, wsum = 0.0;
    for (const CompiledTarget& t : targets) {
        const std::optional<double> v = report_value(rep, t.field);
        const double r = v ? (*v - t.value) : 1.0;
        sq += t.weight * r * r;
        wsum += t.weight;
    }
    return wsum > 0.0 ? std::sqrt(sq / wsum) : 0.0;
}

struct Assembly {
    ModelFamily family;
    bool eliminate_a1;
    RootChoice root;
    std::vector<ParamDef> defs; // free parameters, in catalog order
    TwoCauseParams base_two;
    ThreeCauseParams base_three;

    void apply(TwoCauseParams& p, FieldId id, double v) const {
        switch (id) {
        case FieldId::r:
            p.r = v;
            break;
        case FieldId::theta_pi:
            p.theta_pi = v;
            break;
        case FieldId::a3:
            p.a3 = v;
            break;
        case FieldId::a4:
            p.a4 = v;
            break;
        case FieldId::a5:
            p.a5 = v;
            break;
        case FieldId::alpha1_pi:
            p.alpha1_pi = v;
            break;
        case FieldId::a1:
            p.a1 = v;
            break;
        case FieldId::beta1_pi:
            ensure_block(p.blocks.block1).beta_pi = v;
            break;
        case FieldId::gamma1_pi:
            ensure_block(p.blocks.block1).gamma_pi = v;
            break;
        case FieldId::beta2_pi:
            ensure_block(p.blocks.block2).beta_pi = v;
            break;
        case FieldId::gamma2_pi:
            ensure_block(p.blocks.block2).gamma_pi = v;
            break;
        case FieldId::beta3_pi:
            ensure_block(p.blocks.block3).beta_pi = v;
            break;
        case FieldId::gamma3_pi:
            ensure_block(p.blocks.block3).gamma_pi = v;
            break;
        case FieldId::delta_pi:
            p.blocks.delta_pi = v;
            break;
        default:
            throw std::logic_error("apply: field not part of a 6-dim model");
        }
    }

    static GeneralizedBlockParams::Block& ensure_block(
        std::optional<GeneralizedBlockParams::Block>& slot) {
        if (!slot)
            slot.emplace();
        return *slot;
    }

    // values are in catalog order, one per free def
    ModelInstance build(const std::vector<double>& values) const {
        if (family == ModelFamily::two_cause) {
            TwoCauseParams p = base_two;
            p.root_choice = root;
            if (eliminate_a1)
                p.a1.reset();
            for (std::size_t i = 0; i < defs.size(); ++i)
                apply(p, defs[i].id, values[i]);
            return build_two_cause(p);
        }
        ThreeCauseParams p = base_three;
        p.six_dim.root_choice = root;
        if (eliminate_a1)
            p.six_dim.a1.reset();
        for (std::size_t i = 0; i < defs.size(); ++i) {
            switch (defs[i].id) {
            case FieldId::r2:
                p.r2 = values[i];
                break;
            case FieldId::theta2_pi:
                p.theta2_pi = values[i];
                break;
            case FieldId::alpha2_pi:
                p.alpha2_pi = values[i];
                break;
            default:
                apply(p.six_dim, defs[i].id, values[i]);
                break;
            }
        }
        return build_three_cause(p);
    }
};

double transform(const ParamDef& def, double z) {
    return def.kind == Kind::unit ? from_unit(z) : z;
}

double untransform(const ParamDef& def, double v) {
    return def.kind == Kind::unit ? to_unit(v) : v;
}

} // namespace

std::string family_name(ModelFamily family) {
    switch (family) {
    case ModelFamily::two_cause:
        return "two_cause";
    case ModelFamily::three_cause:
        return "three_cause";
    case ModelFamily::three_cause_generalized:
        return "three_cause_generalized";
    }
    return "unknown";
}

ModelFamily family_from_name(const std::string& name) {
    if (name == "two_cause")
        return ModelFamily::two_cause;
    if (name == "three_cause")
        return ModelFamily::three_cause;
    if (name == "three_cause_generalized")
        return ModelFamily::three_cause_generalized;
    throw ConfigError("unknown model family '" + name + "'");
}

double objective(const ProbabilityReport& report, ModelFamily family,
                 const TargetTable& targets) {
    return weighted_rmse(report, compile_targets(targets, family));
}

std::optional<double> report_target_value(const ProbabilityReport& report,
                                          ModelFamily family,
                                          const std::string& target_name) {
    return report_value(report, resolve_target(target_name, family));
}

namespace {

// Everything fit() and the start-baseline share: compiled targets, the
// free-parameter layout, and guarded evaluation at a transformed point.
struct ProblemSetup {
    std::vector<CompiledTarget> targets;
    std::vector<ParamDef> free_defs;
    Assembly assembly;
    std::vector<RootChoice> roots;
    bool eliminate_a1 = true;
    double penalty_weight = 1.0;

    std::vector<double> values_of(const std::vector<double>& z) const {
        std::vector<double> values(free_defs.size());
        for (std::size_t i = 0; i < free_defs.size(); ++i)
            values[i] = transform(free_defs[i], z[i]);
        return values;
    }

    double evaluate(const std::vector<double>& z, RootChoice root) const {
        Assembly a = assembly;
        a.root = root;
        try {
            const ProbabilityReport rep =
                evaluate_report(a.build(values_of(z)));
            double obj = weighted_rmse(rep, targets);
            if (!eliminate_a1)
                obj += penalty_weight *
                       std::abs(rep.p_joint - rep.p_a * rep.p_b);
            return obj;
        } catch (const std::exception&) {
            return kGuardPenalty;
        }
    }

    bool buildable(const std::vector<double>& z, RootChoice root) const {
        Assembly a = assembly;
        a.root = root;
        try {
            a.build(values_of(z));
            return true;
        } catch (const std::exception&) {
            return false;
        }
    }

    std::vector<double> start_point(std::uint64_t seed, std::size_t index,
                                    int* attempts_out = nullptr) const {
        // start 0 is the catalog default point, later starts are random;
        // infeasible draws are retried up to 1000 times
        Rng rng(Rng::derive(seed, index));
        std::vector<double> z0(free_defs.size());
        for (int attempt = 0; attempt < 1000; ++attempt) {
            for (std::size_t i = 0; i < free_defs.size(); ++i) {
                if (index == 0 && attempt == 0)
                    z0[i] = untransform(free_defs[i], free_defs[i].dflt);
                else
                    z0[i] = 1.5 * rng.normal();
            }
            for (RootChoice root : roots) {
                if (buildable(z0, root)) {
                    if (attempts_out)
                        *attempts_out = attempt + 1;
                    return z0;
                }
            }
        }
        if (attempts_out)
            *attempts_out = -1;
        return {};
    }
};

ProblemSetup compile_problem(const FitProblem& problem) {
    if (problem.targets.entries.empty())
        throw ConfigError("fit: no targets given");
    if (problem.eliminate_a1 && problem.fixed.count("a1"))
        throw ConfigError(
            "fit: a1 cannot be pinned while the independence quadratic "
            "eliminates it");

    ProblemSetup setup;
    setup.eliminate_a1 = problem.eliminate_a1;
    setup.penalty_weight = problem.independence_penalty_weight;
    setup.targets = compile_targets(problem.targets, problem.family);
    setup.roots =
        problem.eliminate_a1
            ? std::vector<RootChoice>{RootChoice::small, RootChoice::large}
            : std::vector<RootChoice>{RootChoice::large};

    const std::vector<ParamDef> all =
        catalog(problem.family, problem.eliminate_a1);
    const auto find_def = [&all](const std::string& name) {
        for (const ParamDef& d : all)
            if (name == d.name)
                return &d;
        return static_cast<const ParamDef*>(nullptr);
    };
    for (const auto& [name, value] : problem.fixed)
        if (!find_def(name))
            throw ConfigError("fit: unknown fixed parameter '" + name + "'");

    if (problem.free_names.empty()) {
        for (const ParamDef& d : all)
            if (!problem.fixed.count(d.name))
                setup.free_defs.push_back(d);
    } else {
        for (const std::string& name : problem.free_names) {
            const ParamDef* d = find_def(name);
            if (!d)
                throw ConfigError("fit: unknown free parameter '" + name +
                                  "'");
            if (problem.fixed.count(name))
                throw ConfigError("fit: parameter '" + name +
                                  "' is both free and fixed");
            setup.free_defs.push_back(*d);
        }
    }
    if (setup.free_defs.empty())
        throw ConfigError("fit: no free parameters");

    // bases carry defaults overridden by pinned values
    setup.assembly.family = problem.family;
    setup.assembly.eliminate_a1 = problem.eliminate_a1;
    setup.assembly.defs = setup.free_defs;
    for (const ParamDef& d : all) {
        const auto it = problem.fixed.find(d.name);
        const double v = it != problem.fixed.end() ? it->second : d.dflt;
        if (problem.family == ModelFamily::two_cause) {
            setup.assembly.apply(setup.assembly.base_two, d.id, v);
        } else {
            switch (d.id) {
            case FieldId::r2:
                setup.assembly.base_three.r2 = v;
                break;
            case FieldId::theta2_pi:
                setup.assembly.base_three.theta2_pi = v;
                break;
            case FieldId::alpha2_pi:
                setup.assembly.base_three.alpha2_pi = v;
                break;
            default:
                setup.assembly.apply(setup.assembly.base_three.six_dim, d.id,
                                     v);
                break;
            }
        }
    }
    return setup;
}

} // namespace

double random_start_baseline(const FitProblem& problem, std::size_t draws) {
    const ProblemSetup setup = compile_problem(problem);
    double best = kGuardPenalty;
    for (std::size_t s = 0; s < draws; ++s) {
        const std::vector<double> z0 = setup.start_point(problem.seed, s);
        if (z0.empty())
            continue;
        for (RootChoice root : setup.roots)
            best = std::min(best, setup.evaluate(z0, root));
    }
    return best;
}

FitResult fit(const FitProblem& problem) {
    if (problem.budget == 0)
        throw std::invalid_argument("fit: budget must be > 0");
    const ProblemSetup setup = compile_problem(problem);
    const std::vector<CompiledTarget>& targets = setup.targets;
    const std::vector<ParamDef>& free_defs = setup.free_defs;
    const Assembly& assembly = setup.assembly;
    const std::vector<RootChoice>& roots = setup.roots;
    const std::size_t nfree = free_defs.size();

    std::uint64_t evals = 0;
    const auto make_objective = [&](RootChoice root) {
        return [&, root](const std::vector<double>& z) {
            ++evals;
            return setup.evaluate(z, root);
        };
    };

    struct Best {
        double objective = kGuardPenalty + 1.0;
        std::vector<double> z;
        RootChoice root = RootChoice::large;
    } best;
    double best_start_objective = kGuardPenalty + 1.0;

    const std::uint64_t explore_budget = problem.budget / 2;
    const std::uint64_t per_run = std::max<std::uint64_t>(
        nfree + 2,
        explore_budget / std::max<std::size_t>(
                             1, problem.starts * roots.size()));

    for (std::size_t s = 0; s < problem.starts; ++s) {
        // start 0 is the catalog default point, later starts are random
        Rng rng(Rng::derive(problem.seed, s));
        std::vector<double> z0(nfree);
        bool feasible = false;
        for (int attempt = 0; attempt < 1000 && !feasible; ++attempt) {
            for (std::size_t i = 0; i < nfree; ++i) {
                if (s == 0 && attempt == 0)
                    z0[i] = untransform(free_defs[i], free_defs[i].dflt);
                else
                    z0[i] = 1.5 * rng.normal();
            }
            for (RootChoice root : roots) {
                ++evals;
                Assembly a = assembly;
                a.root = root;
                std::vector<double> values(nfree);
                for (std::size_t i = 0; i < nfree; ++i)
                    values[i] = transform(free_defs[i], z0[i]);
                try {
                    a.build(values);
                    feasible = true;
                } catch (const std::exception&) {
                }
            }
        }
        if (!feasible)
            continue;

        for (RootChoice root : roots) {
            if (evals >= explore_budget)
                break;
            const auto obj = make_objective(root);
            best_start_objective = std::min(best_start_objective, obj(z0));
            optim::NelderMeadOptions opt;
            opt.max_evaluations =
                std::min<std::uint64_t>(per_run, explore_budget > evals
                                                     ? explore_budget - evals
                                                     : 0);
            opt.initial_step = 0.75;
            const auto res = optim::nelder_mead(obj, z0, opt);
            if (res.fx < best.objective) {
                best = Best{res.fx, res.x, root};
            }
        }
    }

    if (best.z.empty())
        throw FitInfeasible(
            "fit: no feasible starting point after 1000 attempts per start");

    // chained polish around the incumbent until the budget runs out
    while (evals < problem.budget) {
        const auto obj = make_objective(best.root);
        optim::NelderMeadOptions opt;
        opt.max_evaluations = std::min<std::uint64_t>(
            problem.budget - evals, problem.budget / 8 + 64);
        opt.initial_step = 0.1;
        const auto res = optim::nelder_mead(obj, best.z, opt);
        if (res.fx >= best.objective)
            break;
        best.objective = res.fx;
        best.z = res.x;
    }

    // materialize the result at the incumbent
    FitResult result;
    result.family = problem.family;
    result.root_choice = best.root;
    result.evaluations = evals;
    result.best_start_objective = best_start_objective;
    result.objective_value = best.objective;

    Assembly a = assembly;
    a.root = best.root;
    std::vector<double> values(nfree);
    for (std::size_t i = 0; i < nfree; ++i)
        values[i] = transform(free_defs[i], best.z[i]);
    const ModelInstance inst = a.build(values);
    result.report = evaluate_report(inst);

    for (std::size_t i = 0; i < nfree; ++i) {
        const double v = values[i];
        result.best_params[free_defs[i].name] =
            free_defs[i].kind == Kind::angle ? wrap_angle_pi(v) : v;
    }
    for (const auto& [name, value] : problem.fixed)
        result.best_params[name] = value;
    if (problem.eliminate_a1) {
        const TwoCauseParams& six =
            problem.family == ModelFamily::two_cause
                ? std::get<TwoCauseParams>(inst.params)
                : std::get<ThreeCauseParams>(inst.params).six_dim;
        result.best_params["a1"] =
            solve_independence_a1(six.a3, six.a4, six.a5).pick(best.root);
    }

    result.rmse = weighted_rmse(result.report, targets);
    double max_abs = 0.0;
    for (const CompiledTarget& t : targets) {
        TargetResidual tr;
        tr.name = t.name;
        tr.target = t.value;
        tr.achieved = report_value(result.report, t.field);
        tr.residual = tr.achieved ? *tr.achieved - t.value : 1.0;
        max_abs = std::max(max_abs, std::abs(tr.residual));
        result.residuals.push_back(std::move(tr));
    }
    result.max_abs_error = max_abs;

    const ProbabilityReport& rep = result.report;
    bool ordering = rep.p_d_given_a && *rep.p_d_given_a > rep.p_d &&
                    rep.p_d_given_b && *rep.p_d_given_b > rep.p_d &&
                    rep.p_d_given_joint && *rep.p_d_given_joint < rep.p_d;
    if (problem.family != ModelFamily::two_cause)
        ordering = ordering && rep.p_d_given_c && *rep.p_d_given_c > rep.p_d;
    result.qualitative_ordering = ordering;
    return result;
}

namespace {

double param_or(const FitResult& result, const std::string& name,
                double fallback) {
    const auto it = result.best_params.find(name);
    return it != result.best_params.end() ? it->second : fallback;
}

TwoCauseParams six_dim_from(const FitResult& result, ModelFamily family) {
    TwoCauseParams p;
    p.r = param_or(result, "r", p.r);
    p.theta_pi = family == ModelFamily::two_cause
                     ? param_or(result, "theta_pi", p.theta_pi)
                     : 1.5;
    p.a3 = param_or(result, "a3", p.a3);
    p.a4 = param_or(result, "a4", p.a4);
    p.a5 = param_or(result, "a5", p.a5);
    p.alpha1_pi = param_or(result, "alpha1_pi", p.alpha1_pi);
    p.root_choice = result.root_choice;
    if (result.best_params.count("a1"))
        p.a1 = result.best_params.at("a1");
    if (family == ModelFamily::three_cause_generalized) {
        p.blocks.block1 = {param_or(result, "beta1_pi", 0.25),
                           param_or(result, "gamma1_pi", -0.5)};
        p.blocks.block2 = {param_or(result, "beta2_pi", 0.25),
                           param_or(result, "gamma2_pi", 0.5)};
        p.blocks.block3 = {param_or(result, "beta3_pi", 0.75),
                           param_or(result, "gamma3_pi", 0.0)};
        p.blocks.delta_pi = param_or(result, "delta_pi", 0.0);
    }
    return p;
}

} // namespace

TwoCauseParams two_cause_params_from(const FitResult& result) {
    return six_dim_from(result, ModelFamily::two_cause);
}

ThreeCauseParams three_cause_params_from(const FitResult& result) {
    ThreeCauseParams p;
    p.six_dim = six_dim_from(result, result.family);
    p.r2 = param_or(result, "r2", p.r2);
    p.theta2_pi = param_or(result, "theta2_pi", p.theta2_pi);
    p.alpha2_pi = param_or(result, "alpha2_pi", p.alpha2_pi);
    return p;
}

} // namespace qlcause
