#pragma once
// Derivative-free minimization used by the fit and feasibility modules:
// a deterministic Nelder-Mead simplex with bounded evaluation budget.

#include <cstdint>
#include <functional>
#include <vector>

namespace qlcause::optim {

using Objective = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
    std::uint64_t max_evaluations = 20000;
    double initial_step = 0.5;
    double x_tol = 1e-12; // simplex diameter convergence
    double f_tol = 1e-15; // objective spread convergence
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    std::uint64_t evaluations = 0;
};

// Standard reflect/expand/contract/shrink descent. Ties are broken by
// insertion order, so the result is a pure function of (f, x0, options).
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

} // namespace qlcause::optim
