#pragma once
// Named probability targets and the grammar for their names.
//
// A target name is p_<outcome> or p_<outcome>_<condition>, where
// <outcome> and <condition> are strings of single-letter event names and
// the condition may carry a not_ prefix:
//   p_d        p(d)            p_d_ab      p(d | a and b)
//   p_ab       p(a and b)      p_ab_not_d  p(a and b | not d)

#include <string>
#include <vector>

#include "qlcause/errors.hpp"

namespace qlcause {

struct TargetTable {
    struct Entry {
        std::string name;
        double value = 0.0;
        double weight = 1.0;
    };
    std::vector<Entry> entries;
};

struct TargetSpec {
    std::string name;
    std::vector<char> outcome;   // event letters
    std::vector<char> condition; // empty for unconditional targets
    bool condition_negated = false;
};

// Throws ConfigError on names outside the grammar.
TargetSpec parse_target_name(const std::string& name);

// Sorted unique event letters appearing in the table's names.
std::vector<char> target_events(const TargetTable& table);

} // namespace qlcause
