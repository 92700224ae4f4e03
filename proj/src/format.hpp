#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace modstab::detail {

/// Locale-independent shortest round-trip text for a finite double.
inline std::string short_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Fixed 17-significant-digit text, the report number format.
inline std::string fixed17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

}  // namespace modstab::detail
