#pragma once
// Error taxonomy shared across modules. The CLI maps these onto exit
// codes: config 2, I/O 3, infeasible fit 4, sampler exhaustion 5.

#include <stdexcept>

namespace qlcause {

// Conditioning on an event of zero probability (quantum or classical).
struct UndefinedConditional : std::domain_error {
    using std::domain_error::domain_error;
};

// Constrained rejection sampler ran out of redraws.
struct SamplerExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or unschematic run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem trouble on inputs/outputs.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The fit could not find a single feasible starting point.
struct FitInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qlcause
