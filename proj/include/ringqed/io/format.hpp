// format.hpp: shortest round-trip number formatting

#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace ringqed::io {

/// Shortest decimal that parses back to the same double; "" for NaN and
/// "0" for negative zero.
inline std::string format_number(double v) {
    if (std::isnan(v))
        return {};
    if (v == 0.0)
        return "0";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace ringqed::io
