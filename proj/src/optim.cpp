#include "qlcause/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qlcause::optim {
namespace {

// standard coefficients: reflection, expansion, contraction, shrink
constexpr double kAlpha = 1.0;
constexpr double kGamma = 2.0;
constexpr double kRho = 0.5;
constexpr double kSigma = 0.5;

struct Vertex {
    std::vector<double> x;
    double f;
};

} // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0)
        throw std::invalid_argument("nelder_mead: empty start point");

    std::uint64_t evals = 0;
    const auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };

    if (options.max_evaluations < n + 2) {
        // not enough budget for a simplex; report the start point
        const double f0 = eval(x0);
        return NelderMeadResult{std::move(x0), f0, evals};
    }

    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    simplex.push_back({x0, eval(x0)});
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x = x0;
        x[i] += options.initial_step;
        simplex.push_back({std::move(x), 0.0});
        simplex.back().f = eval(simplex.back().x);
    }

    const auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) {
                             return a.f < b.f;
                         });
    };
    order();

    std::vector<double> centroid(n), trial(n);
    // worst case one iteration spends n+2 evaluations (reflect + expand or
    // contract + full shrink); stop early so the budget is never exceeded
    while (evals + n + 2 <= options.max_evaluations) {
        // convergence: simplex collapsed in x or f
        double fspread = simplex.back().f - simplex.front().f;
        double xspread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            xspread = std::max(std::abs(simplex.back().x[i] -
                                        simplex.front().x[i]),
                               xspread);
        if (fspread <= options.f_tol && xspread <= options.x_tol)
            break;

        // centroid of all but the worst vertex
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t i = 0; i < n; ++i)
                centroid[i] += simplex[v].x[i];
        for (double& c : centroid)
            c /= static_cast<double>(n);

        Vertex& worst = simplex.back();
        for (std::size_t i = 0; i < n; ++i)
            trial[i] = centroid[i] + kAlpha * (centroid[i] - worst.x[i]);
        const double fr = eval(trial);

        if (fr < simplex.front().f) {
            // expand
            std::vector<double> expanded(n);
            for (std::size_t i = 0; i < n; ++i)
                expanded[i] = centroid[i] + kGamma * (trial[i] - centroid[i]);
            const double fe = eval(expanded);
            if (fe < fr)
                worst = {std::move(expanded), fe};
            else
                worst = {trial, fr};
        } else if (fr < simplex[n - 1].f) {
            worst = {trial, fr};
        } else {
            // contract (outside when the reflection improved on the worst)
            const bool outside = fr < worst.f;
            const std::vector<double>& toward = outside ? trial : worst.x;
            std::vector<double> contracted(n);
            for (std::size_t i = 0; i < n; ++i)
                contracted[i] =
                    centroid[i] + kRho * (toward[i] - centroid[i]);
            const double fc = eval(contracted);
            if (fc < std::min(fr, worst.f)) {
                worst = {std::move(contracted), fc};
            } else {
                // shrink toward the best vertex
                for (std::size_t v = 1; v <= n; ++v) {
                    for (std::size_t i = 0; i < n; ++i)
                        simplex[v].x[i] =
                            simplex[0].x[i] +
                            kSigma * (simplex[v].x[i] - simplex[0].x[i]);
                    simplex[v].f = eval(simplex[v].x);
                    if (evals >= options.max_evaluations)
                        break;
                }
            }
        }
        order();
    }

    return NelderMeadResult{simplex.front().x, simplex.front().f, evals};
}

} // namespace qlcause::optim
