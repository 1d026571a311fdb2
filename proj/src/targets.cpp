#include "qlcause/targets.hpp"

#include <algorithm>

namespace qlcause {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t next = s.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(s.substr(pos));
            break;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

std::vector<char> event_letters(const std::string& token,
                                const std::string& name) {
    if (token.empty())
        throw ConfigError("target '" + name + "': empty event group");
    std::vector<char> out;
    for (char ch : token) {
        if (ch < 'a' || ch > 'z')
            throw ConfigError("target '" + name +
                              "': event names must be single letters a-z");
        if (std::find(out.begin(), out.end(), ch) != out.end())
            throw ConfigError("target '" + name + "': repeated event '" +
                              std::string(1, ch) + "'");
        out.push_back(ch);
    }
    return out;
}

} // namespace

TargetSpec parse_target_name(const std::string& name) {
    std::vector<std::string> parts = split(name, '_');
    if (parts.size() < 2 || parts[0] != "p")
        throw ConfigError("target '" + name +
                          "': expected p_<events> or p_<events>_<given>");
    TargetSpec spec;
    spec.name = name;
    spec.outcome = event_letters(parts[1], name);
    if (parts.size() == 2)
        return spec;
    std::size_t cond = 2;
    if (parts[cond] == "not") {
        spec.condition_negated = true;
        ++cond;
    }
    if (cond + 1 != parts.size())
        throw ConfigError("target '" + name + "': unrecognized name shape");
    spec.condition = event_letters(parts[cond], name);
    return spec;
}

std::vector<char> target_events(const TargetTable& table) {
    std::vector<char> events;
    for (const auto& entry : table.entries) {
        const TargetSpec spec = parse_target_name(entry.name);
        for (char ch : spec.outcome)
            events.push_back(ch);
        for (char ch : spec.condition)
            events.push_back(ch);
    }
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    return events;
}

} // namespace qlcause
