#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace tandemfluid {

inline constexpr int kSignificantDigits = 12;

/// Decimal text of `x` with 12 significant digits ("nan"/"inf" passthrough).
[[nodiscard]] inline std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, x);
    return buf;
}

/// `x` rounded to 12 significant digits, for serializers that print shortest round-trip.
[[nodiscard]] inline double round_significant(double x) {
    if (!std::isfinite(x)) return x;
    return std::strtod(format_number(x).c_str(), nullptr);
}

}  // namespace tandemfluid
