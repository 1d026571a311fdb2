#include "qlcause/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <json.hpp>

#include "qlcause/classical.hpp"
#include "qlcause/fit.hpp"
#include "qlcause/models.hpp"

namespace qlcause::cli {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------- flags --

struct Flags {
    std::string command;
    std::optional<std::string> config_path;
    std::optional<std::string> out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> budget;
};

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + " expects an unsigned integer, got '" +
                          text + "'");
    }
}

Flags parse_flags(const std::vector<std::string>& args) {
    if (args.empty())
        throw ConfigError(
            "usage: qlcause <verify|sweep|fit|classical|witness> "
            "[--config <path>] [--out <path>] [--seed <u64>] "
            "[--budget <u64>]");
    Flags flags;
    flags.command = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& arg = args[i];
        const auto value = [&]() -> const std::string& {
            if (i + 1 >= args.size())
                throw ConfigError("flag " + arg + " needs a value");
            return args[++i];
        };
        if (arg == "--config")
            flags.config_path = value();
        else if (arg == "--out")
            flags.out_path = value();
        else if (arg == "--seed")
            flags.seed = parse_u64(value(), "--seed");
        else if (arg == "--budget")
            flags.budget = parse_u64(value(), "--budget");
        else
            throw ConfigError("unknown flag '" + arg + "'");
    }
    return flags;
}

// ----------------------------------------------------------- json utils --

json load_config(const Flags& flags) {
    if (!flags.config_path)
        throw ConfigError("command '" + flags.command +
                          "' requires --config <path>");
    std::ifstream in(*flags.config_path);
    if (!in)
        throw IoError("cannot read config file '" + *flags.config_path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + *flags.config_path +
                          "' is not valid JSON: " + e.what());
    }
}

json load_optional_config(const Flags& flags) {
    if (!flags.config_path)
        return json::object();
    return load_config(flags);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object())
        throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* name : allowed)
            if (key == name)
                known = true;
        if (!known)
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double get_number(const json& obj, const std::string& where,
                  const std::string& key, double fallback) {
    if (!obj.contains(key))
        return fallback;
    if (!obj.at(key).is_number())
        throw ConfigError(where + "." + key + " must be a number");
    return obj.at(key).get<double>();
}

bool get_bool(const json& obj, const std::string& where,
              const std::string& key, bool fallback) {
    if (!obj.contains(key))
        return fallback;
    if (!obj.at(key).is_boolean())
        throw ConfigError(where + "." + key + " must be a boolean");
    return obj.at(key).get<bool>();
}

std::uint64_t get_u64(const json& obj, const std::string& where,
                      const std::string& key, std::uint64_t fallback) {
    if (!obj.contains(key))
        return fallback;
    if (!obj.at(key).is_number_unsigned())
        throw ConfigError(where + "." + key +
                          " must be an unsigned integer");
    return obj.at(key).get<std::uint64_t>();
}

std::uint64_t resolve_seed(const Flags& flags, const json& config,
                           std::uint64_t fallback = 1) {
    if (flags.seed)
        return *flags.seed;
    if (config.contains("seed"))
        return get_u64(config, "config", "seed", fallback);
    if (const char* env = std::getenv("QLCAUSE_SEED")) {
        return parse_u64(env, "QLCAUSE_SEED");
    }
    return fallback;
}

// ------------------------------------------------------- params parsing --

GeneralizedBlockParams parse_blocks(const json& obj) {
    check_keys(obj, "params.blocks",
               {"block1", "block2", "block3", "delta_pi"});
    GeneralizedBlockParams blocks;
    const auto block = [&](const char* key)
        -> std::optional<GeneralizedBlockParams::Block> {
        if (!obj.contains(key))
            return std::nullopt;
        const json& b = obj.at(key);
        check_keys(b, std::string("params.blocks.") + key,
                   {"beta_pi", "gamma_pi"});
        GeneralizedBlockParams::Block out;
        out.beta_pi = get_number(b, key, "beta_pi", 0.0);
        out.gamma_pi = get_number(b, key, "gamma_pi", 0.0);
        return out;
    };
    blocks.block1 = block("block1");
    blocks.block2 = block("block2");
    blocks.block3 = block("block3");
    blocks.delta_pi = get_number(obj, "params.blocks", "delta_pi", 0.0);
    return blocks;
}

RootChoice parse_root(const json& params) {
    if (!params.contains("root"))
        return RootChoice::large;
    const std::string root = params.at("root").get<std::string>();
    if (root == "small")
        return RootChoice::small;
    if (root == "large")
        return RootChoice::large;
    throw ConfigError("params.root must be \"small\" or \"large\"");
}

TwoCauseParams parse_two_cause(const json& params) {
    check_keys(params, "params",
               {"r", "theta_pi", "a3", "a4", "a5", "alpha1_pi", "root", "a1",
                "blocks"});
    TwoCauseParams p;
    p.r = get_number(params, "params", "r", p.r);
    p.theta_pi = get_number(params, "params", "theta_pi", p.theta_pi);
    p.a3 = get_number(params, "params", "a3", p.a3);
    p.a4 = get_number(params, "params", "a4", p.a4);
    p.a5 = get_number(params, "params", "a5", p.a5);
    p.alpha1_pi = get_number(params, "params", "alpha1_pi", p.alpha1_pi);
    p.root_choice = parse_root(params);
    if (params.contains("a1"))
        p.a1 = get_number(params, "params", "a1", 0.0);
    if (params.contains("blocks"))
        p.blocks = parse_blocks(params.at("blocks"));
    return p;
}

ThreeCauseParams parse_three_cause(const json& params) {
    check_keys(params, "params",
               {"r", "a3", "a4", "a5", "alpha1_pi", "root", "a1", "blocks",
                "r2", "theta2_pi", "alpha2_pi"});
    ThreeCauseParams p;
    p.six_dim.a5 = 0.08;
    p.six_dim.r = get_number(params, "params", "r", p.six_dim.r);
    p.six_dim.a3 = get_number(params, "params", "a3", p.six_dim.a3);
    p.six_dim.a4 = get_number(params, "params", "a4", p.six_dim.a4);
    p.six_dim.a5 = get_number(params, "params", "a5", p.six_dim.a5);
    p.six_dim.alpha1_pi =
        get_number(params, "params", "alpha1_pi", 0.75);
    p.six_dim.root_choice = parse_root(params);
    if (params.contains("a1"))
        p.six_dim.a1 = get_number(params, "params", "a1", 0.0);
    if (params.contains("blocks"))
        p.six_dim.blocks = parse_blocks(params.at("blocks"));
    p.r2 = get_number(params, "params", "r2", p.r2);
    p.theta2_pi = get_number(params, "params", "theta2_pi", p.theta2_pi);
    p.alpha2_pi = get_number(params, "params", "alpha2_pi", p.alpha2_pi);
    return p;
}

TargetTable parse_targets(const json& obj, const std::string& where) {
    if (!obj.is_object())
        throw ConfigError(where + " must be an object of named targets");
    TargetTable table;
    for (const auto& [name, value] : obj.items()) {
        TargetTable::Entry entry;
        entry.name = name;
        parse_target_name(name); // grammar check
        if (value.is_number()) {
            entry.value = value.get<double>();
        } else if (value.is_object()) {
            check_keys(value, where + "." + name, {"value", "weight"});
            if (!value.contains("value"))
                throw ConfigError(where + "." + name + " needs a value");
            entry.value = get_number(value, where, "value", 0.0);
            entry.weight = get_number(value, where, "weight", 1.0);
        } else {
            throw ConfigError(where + "." + name +
                              " must be a number or {value, weight}");
        }
        if (entry.value < 0.0 || entry.value > 1.0)
            throw ConfigError(where + "." + name +
                              ": probability targets must lie in [0,1]");
        table.entries.push_back(std::move(entry));
    }
    return table;
}

TargetTable table2_targets() {
    TargetTable t;
    t.entries = {{"p_d", 0.57, 1.0},
                 {"p_d_a", 0.69, 1.0},
                 {"p_d_b", 0.63, 1.0},
                 {"p_d_c", 0.73, 1.0},
                 {"p_d_abc", 0.55, 1.0}};
    return t;
}

// --------------------------------------------------------- serializers --

json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

json report_json(const ProbabilityReport& rep, bool three_cause) {
    json j;
    j["p_a"] = rep.p_a;
    j["p_b"] = rep.p_b;
    if (three_cause)
        j["p_c"] = opt_json(rep.p_c);
    j["p_joint"] = rep.p_joint;
    j["p_d"] = rep.p_d;
    j["p_d_given_a"] = opt_json(rep.p_d_given_a);
    j["p_d_given_b"] = opt_json(rep.p_d_given_b);
    if (three_cause)
        j["p_d_given_c"] = opt_json(rep.p_d_given_c);
    j["p_d_given_joint"] = opt_json(rep.p_d_given_joint);
    j["p_joint_given_d"] = opt_json(rep.p_joint_given_d);
    j["p_joint_given_not_d"] = opt_json(rep.p_joint_given_not_d);
    j["interference_a"] = rep.interference_a;
    return j;
}

json space_json(const ClassicalSpace& space) {
    json j;
    j["labels"] = space.labels();
    j["atoms"] = space.atoms();
    return j;
}

std::string format12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string render_sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "r,p_d,p_d_given_a,p_d_given_b,p_d_given_c,p_d_given_joint,"
        "p_joint_given_d,p_joint_given_not_d,interference_a\n";
    const auto cell = [&out](const std::optional<double>& v) {
        out.push_back(',');
        if (v)
            out += format12(*v);
    };
    for (const SweepRow& row : rows) {
        out += format12(row.r);
        cell(row.report.p_d);
        cell(row.report.p_d_given_a);
        cell(row.report.p_d_given_b);
        cell(row.report.p_d_given_c);
        cell(row.report.p_d_given_joint);
        cell(row.report.p_joint_given_d);
        cell(row.report.p_joint_given_not_d);
        cell(row.report.interference_a);
        out.push_back('\n');
    }
    return out;
}

void write_output(const Flags& flags, const std::string& bytes,
                  std::ostream& out) {
    if (!flags.out_path) {
        out << bytes;
        return;
    }
    std::ofstream file(*flags.out_path, std::ios::binary);
    if (!file)
        throw IoError("cannot open output path '" + *flags.out_path + "'");
    file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!file)
        throw IoError("failed writing output path '" + *flags.out_path +
                      "'");
}

void emit_json(const Flags& flags, const json& j, std::ostream& out) {
    write_output(flags, j.dump(2) + "\n", out);
}

// -------------------------------------------------------------- verify --

struct OrderingChecks {
    json detail;
    bool all = true;

    void add(const char* name, bool ok) {
        detail[name] = ok;
        all = all && ok;
    }
};

json structural_checks_json(const ModelInstance& inst, bool& pass) {
    const double tol = 1e-12;
    const bool projectors =
        is_projector(inst.A.matrix()) && is_projector(inst.B.matrix()) &&
        is_projector(inst.D.matrix()) && is_projector(inst.joint.matrix()) &&
        (!inst.C || is_projector(inst.C->matrix()));
    bool commuting =
        commutator_norm(inst.A.matrix(), inst.B.matrix()) <= tol;
    if (inst.C)
        commuting = commuting &&
                    commutator_norm(inst.A.matrix(), inst.C->matrix()) <=
                        tol &&
                    commutator_norm(inst.B.matrix(), inst.C->matrix()) <= tol;
    const bool normalized =
        std::abs(norm2(inst.psi.vector()) - 1.0) <= kNormTol;

    json j;
    j["projectors"] = projectors;
    j["commuting_conditions"] = commuting;
    j["state_normalized"] = normalized;
    pass = pass && projectors && commuting && normalized;
    return j;
}

// The complement conditional two ways: the Lueders value the engine uses,
// and the series-coefficient form printed alongside it in the derivation,
// (tr(AB) - Re tr(AB D rho)) / (1 - p(D)). The latter can leave [0,1].
json complement_diagnostics(const ModelInstance& inst,
                            const ProbabilityReport& rep) {
    json j;
    j["p_joint_given_not_d_luders"] = opt_json(rep.p_joint_given_not_d);
    const ComplexVector dpsi = apply(inst.D.matrix(), inst.psi.vector());
    const Complex x = inner(inst.psi.vector(), apply(inst.joint.matrix(), dpsi));
    const double tr_joint = trace(inst.joint.matrix()).real();
    const double y = rep.p_d;
    if (1.0 - y > 1e-12)
        j["p_joint_given_not_d_trace_coefficient"] =
            (tr_joint - x.real()) / (1.0 - y);
    else
        j["p_joint_given_not_d_trace_coefficient"] = nullptr;
    return j;
}

json verify_point(const ModelInstance& inst, bool three_cause,
                  bool assert_orderings, const TargetTable& targets,
                  bool& pass) {
    const ProbabilityReport rep = evaluate_report(inst);
    json point;
    point["report"] = report_json(rep, three_cause);
    point["checks"] = structural_checks_json(inst, pass);
    point["diagnostics"] = complement_diagnostics(inst, rep);

    OrderingChecks ord;
    const auto gt = [](const std::optional<double>& a, double b) {
        return a && *a > b;
    };
    ord.add("p_d_given_a_gt_p_d", gt(rep.p_d_given_a, rep.p_d));
    ord.add("p_d_given_b_gt_p_d", gt(rep.p_d_given_b, rep.p_d));
    if (!three_cause) {
        const bool between =
            rep.p_d_given_joint && rep.p_d_given_a && rep.p_d_given_b &&
            rep.p_d < *rep.p_d_given_joint &&
            *rep.p_d_given_joint <
                std::min(*rep.p_d_given_a, *rep.p_d_given_b);
        ord.add("p_d_given_joint_between", between);
        const bool ab_d = rep.p_joint_given_d && rep.p_joint_given_not_d &&
                          *rep.p_joint_given_d > *rep.p_joint_given_not_d;
        ord.add("p_joint_given_d_gt_complement", ab_d);
    } else {
        ord.add("p_d_given_c_gt_p_d", gt(rep.p_d_given_c, rep.p_d));
        ord.add("p_d_given_joint_lt_p_d",
                rep.p_d_given_joint && *rep.p_d_given_joint < rep.p_d);
    }
    ord.detail["all"] = ord.all;
    point["orderings"] = ord.detail;
    if (assert_orderings)
        pass = pass && ord.all;

    if (three_cause) {
        json residuals = json::array();
        for (const auto& entry : targets.entries) {
            const std::optional<double> achieved = report_target_value(
                rep, ModelFamily::three_cause, entry.name);
            json row;
            row["name"] = entry.name;
            row["target"] = entry.value;
            row["achieved"] = opt_json(achieved);
            row["residual"] =
                achieved ? json(*achieved - entry.value) : json(nullptr);
            residuals.push_back(std::move(row));
        }
        point["residual_table"] = std::move(residuals);
    }
    return point;
}

int cmd_verify(const Flags& flags, std::ostream& out) {
    const json config = load_config(flags);
    check_keys(config, "config",
               {"family", "params", "assert_orderings", "targets"});
    if (!config.contains("family"))
        throw ConfigError("verify config needs a \"family\"");
    const std::string family = config.at("family").get<std::string>();
    const json params = config.value("params", json::object());

    json result;
    result["family"] = family;
    bool pass = true;

    if (family == "two_cause") {
        const TwoCauseParams p = parse_two_cause(params);
        const bool assert_orderings =
            get_bool(config, "config", "assert_orderings", true);
        result["assert_orderings"] = assert_orderings;
        json point = verify_point(build_two_cause(p), false,
                                  assert_orderings, TargetTable{}, pass);
        point["r"] = p.r;
        result["points"] = json::array({std::move(point)});
    } else if (family == "three_cause") {
        const ThreeCauseParams p = parse_three_cause(params);
        const bool assert_orderings =
            get_bool(config, "config", "assert_orderings", false);
        result["assert_orderings"] = assert_orderings;
        const TargetTable targets =
            config.contains("targets")
                ? parse_targets(config.at("targets"), "config.targets")
                : table2_targets();
        // the paper leaves the working point ambiguous, so report the
        // configured r alongside both candidate points
        std::vector<double> r_points{p.six_dim.r};
        for (double candidate : {0.01, 0.5})
            if (candidate != p.six_dim.r)
                r_points.push_back(candidate);
        json points = json::array();
        for (double r : r_points) {
            ThreeCauseParams q = p;
            q.six_dim.r = r;
            json point = verify_point(build_three_cause(q), true,
                                      assert_orderings, targets, pass);
            point["r"] = r;
            points.push_back(std::move(point));
        }
        result["points"] = std::move(points);
    } else {
        throw ConfigError(
            "verify family must be \"two_cause\" or \"three_cause\"");
    }

    result["pass"] = pass;
    emit_json(flags, result, out);
    return pass ? 0 : 1;
}

// --------------------------------------------------------------- sweep --

std::vector<double> parse_grid(const json& config) {
    if (!config.contains("grid"))
        throw ConfigError("sweep config needs a \"grid\"");
    const json& grid = config.at("grid");
    if (grid.contains("values")) {
        check_keys(grid, "grid", {"values"});
        std::vector<double> values;
        for (const json& v : grid.at("values")) {
            if (!v.is_number())
                throw ConfigError("grid.values must be numbers");
            values.push_back(v.get<double>());
        }
        if (values.empty())
            throw ConfigError("grid.values must not be empty");
        return values;
    }
    check_keys(grid, "grid", {"start", "stop", "count"});
    const double start = get_number(grid, "grid", "start", 0.0);
    const double stop = get_number(grid, "grid", "stop", 1.0);
    const std::uint64_t count = get_u64(grid, "grid", "count", 101);
    if (count == 0)
        throw ConfigError("grid.count must be positive");
    return linear_grid(start, stop, static_cast<std::size_t>(count));
}

int cmd_sweep(const Flags& flags, std::ostream& out) {
    const json config = load_config(flags);
    check_keys(config, "config",
               {"family", "params", "grid", "refit_a1_per_point"});
    if (!config.contains("family"))
        throw ConfigError("sweep config needs a \"family\"");
    const std::string family = config.at("family").get<std::string>();
    const json params = config.value("params", json::object());
    const std::vector<double> grid = parse_grid(config);
    SweepOptions options;
    options.refit_a1_per_point =
        get_bool(config, "config", "refit_a1_per_point", false);

    std::vector<SweepRow> rows;
    if (family == "two_cause") {
        rows = sweep_r(parse_two_cause(params), grid, options);
    } else if (family == "three_cause") {
        rows = sweep_r(parse_three_cause(params), grid, options);
    } else {
        throw ConfigError(
            "sweep family must be \"two_cause\" or \"three_cause\"");
    }
    write_output(flags, render_sweep_csv(rows), out);
    return 0;
}

// ----------------------------------------------------------------- fit --

json fit_result_json(const FitResult& result) {
    json j;
    j["family"] = family_name(result.family);
    j["root_choice"] =
        result.root_choice == RootChoice::small ? "small" : "large";
    j["best_params"] = result.best_params;
    j["report"] = report_json(result.report,
                              result.family != ModelFamily::two_cause);
    json residuals = json::array();
    for (const TargetResidual& tr : result.residuals) {
        json row;
        row["name"] = tr.name;
        row["target"] = tr.target;
        row["achieved"] = opt_json(tr.achieved);
        row["residual"] = tr.residual;
        residuals.push_back(std::move(row));
    }
    j["residuals"] = std::move(residuals);
    j["rmse"] = result.rmse;
    j["max_abs_error"] = result.max_abs_error;
    j["objective"] = result.objective_value;
    j["best_start_objective"] = result.best_start_objective;
    j["qualitative_ordering"] = result.qualitative_ordering;
    j["evaluations"] = result.evaluations;
    return j;
}

int cmd_fit(const Flags& flags, std::ostream& out) {
    const json config = load_config(flags);
    check_keys(config, "config",
               {"family", "targets", "targets_file", "free", "fixed",
                "eliminate_a1", "independence_penalty_weight", "starts",
                "seed", "budget"});
    FitProblem problem;
    if (config.contains("family"))
        problem.family =
            family_from_name(config.at("family").get<std::string>());

    if (config.contains("targets") == config.contains("targets_file"))
        throw ConfigError(
            "fit config needs exactly one of \"targets\" or "
            "\"targets_file\"");
    if (config.contains("targets")) {
        problem.targets =
            parse_targets(config.at("targets"), "config.targets");
    } else {
        const std::string path =
            config.at("targets_file").get<std::string>();
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot read targets file '" + path + "'");
        json targets;
        try {
            targets = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("targets file '" + path +
                              "' is not valid JSON: " + e.what());
        }
        problem.targets = parse_targets(targets, "targets");
    }

    if (config.contains("free"))
        for (const json& name : config.at("free"))
            problem.free_names.push_back(name.get<std::string>());
    if (config.contains("fixed")) {
        const json& fixed = config.at("fixed");
        if (!fixed.is_object())
            throw ConfigError("config.fixed must be an object");
        for (const auto& [key, value] : fixed.items()) {
            if (!value.is_number())
                throw ConfigError("config.fixed." + key +
                                  " must be a number");
            problem.fixed[key] = value.get<double>();
        }
    }
    problem.eliminate_a1 =
        get_bool(config, "config", "eliminate_a1", true);
    problem.independence_penalty_weight =
        get_number(config, "config", "independence_penalty_weight", 1.0);
    problem.starts = static_cast<std::size_t>(
        get_u64(config, "config", "starts", problem.starts));
    problem.seed = resolve_seed(flags, config);
    problem.budget = flags.budget
                         ? *flags.budget
                         : get_u64(config, "config", "budget",
                                   problem.budget);

    const FitResult result = fit(problem);
    emit_json(flags, fit_result_json(result), out);
    return result.qualitative_ordering ? 0 : 1;
}

// ------------------------------------------------------------ classical --

json lemma_json(const LemmaSuiteResult& r) {
    json j;
    j["trials"] = r.trials;
    j["boundary"] = r.boundary;
    j["violations"] = r.violations;
    j["blocking_violations"] = r.blocking_violations;
    json dumps = json::array();
    for (const ClassicalSpace& s : r.counterexamples)
        dumps.push_back(space_json(s));
    j["counterexamples"] = std::move(dumps);
    return j;
}

json conjunction_json(const ConjunctionSuiteResult& r) {
    json j;
    j["trials"] = r.trials;
    j["holds"] = r.holds;
    j["equalities"] = r.equalities;
    j["violations"] = r.violations;
    j["joint_violations"] = r.joint_violations;
    j["exhausted"] = r.exhausted;
    json dumps = json::array();
    for (const ClassicalSpace& s : r.counterexamples)
        dumps.push_back(space_json(s));
    j["counterexamples"] = std::move(dumps);
    return j;
}

json feasibility_json(const FeasibilityResult& r) {
    json j;
    j["best_residual"] = r.best_residual;
    j["evaluations"] = r.evaluations;
    j["best_space"] = space_json(r.best_space);
    return j;
}

int cmd_classical(const Flags& flags, std::ostream& out) {
    const json config = load_optional_config(flags);
    check_keys(config, "config",
               {"mode", "trials", "seed", "feasibility"});
    const std::string mode =
        config.contains("mode") ? config.at("mode").get<std::string>()
                                : "all";
    if (mode != "lemma" && mode != "conjunction" && mode != "feasibility" &&
        mode != "all")
        throw ConfigError("classical mode must be lemma, conjunction, "
                          "feasibility, or all");
    const std::uint64_t trials =
        get_u64(config, "config", "trials", 100000);
    const std::uint64_t seed = resolve_seed(flags, config);

    const json feas_config = config.value("feasibility", json::object());
    check_keys(feas_config, "config.feasibility",
               {"targets", "independence", "budget"});
    const TargetTable feas_targets =
        feas_config.contains("targets")
            ? parse_targets(feas_config.at("targets"),
                            "config.feasibility.targets")
            : table2_targets();
    const std::uint64_t feas_budget =
        flags.budget ? *flags.budget
                     : get_u64(feas_config, "config.feasibility", "budget",
                               1000000);

    json result;
    result["mode"] = mode;
    result["seed"] = seed;
    bool clean = true;
    bool exhausted = false;

    if (mode == "lemma" || mode == "all") {
        const LemmaSuiteResult r = run_lemma_suite(trials, seed);
        clean = clean && r.violations == 0 && r.blocking_violations == 0;
        result["lemma"] = lemma_json(r);
    }
    if (mode == "conjunction" || mode == "all") {
        const ConjunctionSuiteResult r = run_conjunction_suite(trials, seed);
        clean = clean && r.violations == 0 && r.joint_violations == 0;
        exhausted = exhausted || r.exhausted;
        result["conjunction"] = conjunction_json(r);
    }
    if (mode == "feasibility" || mode == "all") {
        const FeasibilityConstraints with{{'a', 'b', 'c'}, 'd'};
        const FeasibilityConstraints without{};
        json feas;
        if (!feas_config.contains("independence") ||
            get_bool(feas_config, "feasibility", "independence", true)) {
            feas["with_independence"] = feasibility_json(
                feasibility_search(feas_targets, with, seed, feas_budget));
        }
        if (!feas_config.contains("independence") ||
            !get_bool(feas_config, "feasibility", "independence", true)) {
            feas["without_independence"] = feasibility_json(
                feasibility_search(feas_targets, without, seed,
                                   feas_budget));
        }
        result["feasibility"] = std::move(feas);
    }

    result["pass"] = clean && !exhausted;
    emit_json(flags, result, out);
    if (exhausted)
        return 5;
    return clean ? 0 : 1;
}

// -------------------------------------------------------------- witness --

int cmd_witness(const Flags& flags, std::ostream& out) {
    const json config = load_optional_config(flags);
    check_keys(config, "config", {"c2", "w"});
    WitnessParams params;
    params.c2 = get_number(config, "config", "c2", params.c2);
    params.w = get_number(config, "config", "w", params.w);

    const ModelInstance inst = build_toy_witness(params);
    const ProbabilityReport rep = evaluate_report(inst);

    json j;
    j["c2"] = params.c2;
    j["w"] = params.w;
    j["p_d"] = rep.p_d;
    j["p_d_given_x"] = opt_json(rep.p_d_given_a);
    j["p_x_given_d"] = opt_json(rep.p_joint_given_d);
    j["p_x_given_not_d"] = opt_json(rep.p_joint_given_not_d);

    const bool raises = rep.p_d_given_a && *rep.p_d_given_a > rep.p_d;
    const bool inverted = rep.p_joint_given_d && rep.p_joint_given_not_d &&
                          *rep.p_joint_given_d < *rep.p_joint_given_not_d;
    j["classical_lemma_violated"] = raises && inverted;
    j["zero_prior_update"] = rep.p_d < 1e-12 && raises;
    if (raises && inverted)
        j["verdict"] = "classical Lemma violated";
    else if (rep.p_d < 1e-12 && raises)
        j["verdict"] = "zero-prior update (Cromwell bypass)";
    else
        j["verdict"] = "no violation at these parameters";
    emit_json(flags, j, out);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
    try {
        const Flags flags = parse_flags(args);
        if (flags.command == "verify")
            return cmd_verify(flags, out);
        if (flags.command == "sweep")
            return cmd_sweep(flags, out);
        if (flags.command == "fit")
            return cmd_fit(flags, out);
        if (flags.command == "classical")
            return cmd_classical(flags, out);
        if (flags.command == "witness")
            return cmd_witness(flags, out);
        throw ConfigError("unknown command '" + flags.command +
                          "'; expected verify, sweep, fit, classical, or "
                          "witness");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const FitInfeasible& e) {
        err << "fit infeasible: " << e.what() << "\n";
        return 4;
    } catch (const SamplerExhausted& e) {
        err << "sampler exhausted: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace qlcause::cli
