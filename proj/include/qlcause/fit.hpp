#pragma once
// Fits model parameters to named probability targets by multi-start
// derivative-free descent over transformed coordinates: logit for unit-
// interval parameters, free (wrapped-on-build) coordinates for angles.
// Iterates stay feasible by construction except for the model-build guard,
// which maps invalid parameter combinations to a fixed penalty.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlcause/models.hpp"
#include "qlcause/targets.hpp"

namespace qlcause {

enum class ModelFamily { two_cause, three_cause, three_cause_generalized };

std::string family_name(ModelFamily family);
ModelFamily family_from_name(const std::string& name); // throws ConfigError

struct FitProblem {
    ModelFamily family = ModelFamily::three_cause_generalized;
    TargetTable targets;
    // subset of the family's parameter catalog to optimize; empty = all
    // free parameters not pinned by `fixed`
    std::vector<std::string> free_names;
    std::map<std::string, double> fixed; // angles in units of pi
    // eliminate a1 through the independence quadratic (both roots tried);
    // otherwise a1 is a free unit-interval parameter and the independence
    // residual |p(ab)-p(a)p(b)| joins the objective as a weighted penalty
    bool eliminate_a1 = true;
    double independence_penalty_weight = 1.0;
    std::uint64_t seed = 1;
    std::uint64_t budget = 400000;
    std::size_t starts = 40;
};

struct TargetResidual {
    std::string name;
    double target = 0.0;
    // empty achieved = the report field was undefined (penalty 1 applied)
    std::optional<double> achieved;
    double residual = 0.0;
};

struct FitResult {
    ModelFamily family = ModelFamily::two_cause;
    std::map<std::string, double> best_params; // includes the derived a1
    RootChoice root_choice = RootChoice::large;
    ProbabilityReport report;
    std::vector<TargetResidual> residuals;
    double rmse = 0.0;
    double max_abs_error = 0.0;
    double objective_value = 0.0;      // rmse plus any independence penalty
    double best_start_objective = 0.0; // best objective over the raw starts
    bool qualitative_ordering = false; // p(d|joint) < p(d) < single causes
    std::uint64_t evaluations = 0;
};

// Weighted root-mean-square error between a report and the targets;
// undefined report fields incur a fixed residual of 1.
double objective(const ProbabilityReport& report, ModelFamily family,
                 const TargetTable& targets);

// The report field a target name addresses under the family's joint
// convention (ab / abc); empty when the field is undefined for this
// report. Throws ConfigError for names outside the family's table.
std::optional<double> report_target_value(const ProbabilityReport& report,
                                          ModelFamily family,
                                          const std::string& target_name);

FitResult fit(const FitProblem& problem);

// Best objective over `draws` raw random starts generated with the same
// seed protocol fit() uses (no descent). The yardstick fitted results are
// measured against.
double random_start_baseline(const FitProblem& problem, std::size_t draws);

// The fitted parameter set materialized as buildable parameters.
TwoCauseParams two_cause_params_from(const FitResult& result);
ThreeCauseParams three_cause_params_from(const FitResult& result);

} // namespace qlcause
