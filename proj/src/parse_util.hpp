#pragma once

// Helpers shared by the small "kind:key=value,..." spec parsers.

#include <charconv>
#include <map>
#include <string>
#include <string_view>
#include <system_error>

#include "modstab/error.hpp"

namespace modstab::detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view text, const std::string& what) {
    text = trim(text);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw ConfigError("cannot parse " + what + " from '" + std::string(text) + "'");
    return value;
}

inline long long parse_integer(std::string_view text, const std::string& what) {
    text = trim(text);
    long long value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw ConfigError("cannot parse integer " + what + " from '" + std::string(text) + "'");
    return value;
}

struct KindSpec {
    std::string kind;
    std::map<std::string, std::string, std::less<>> params;
};

/// "power:p=2,tau=4" -> {"power", {p: "2", tau: "4"}}
inline KindSpec split_kind_spec(std::string_view text) {
    KindSpec out;
    text = trim(text);
    const auto colon = text.find(':');
    out.kind = std::string(trim(text.substr(0, colon)));
    if (colon == std::string_view::npos) return out;
    auto rest = text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected key=value in '" + std::string(text) + "'");
        out.params.emplace(std::string(trim(item.substr(0, eq))),
                           std::string(trim(item.substr(eq + 1))));
    }
    return out;
}

}  // namespace modstab::detail
