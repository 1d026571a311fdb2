#pragma once
// Batch command-line front end.
//
// Commands: verify | sweep | fit | classical | witness
// Flags:    --config <path>  --out <path>  --seed <u64>  --budget <u64>
//
// Exit codes: 0 success, 1 checks failed, 2 config error, 3 I/O error,
// 4 infeasible fit, 5 sampler exhaustion. QLCAUSE_SEED serves as the seed
// fallback when neither the flag nor the config provides one.

#include <iosfwd>
#include <string>
#include <vector>

namespace qlcause::cli {

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

int run(int argc, const char* const* argv);

} // namespace qlcause::cli
