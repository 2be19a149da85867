#pragma once

#include <cstdio>
#include <string>

namespace hypdisk {

/// Shortest-safe round-trip text for a double (17 significant digits).
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
    return buf;
}

inline std::string format_fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    std::string s = buf;
    if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
        // Normalise negative zero so output bytes do not depend on its sign.
        if (!s.empty() && s[0] == '-') s.erase(0, 1);
    }
    return s;
}

inline std::string format_sci(double x, int digits = 3) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*e", digits, x);
    return buf;
}

} // namespace hypdisk
