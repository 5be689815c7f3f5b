#pragma once

#include <cstdio>
#include <string>

namespace minent::csv {

/// Decimal rendering with 17 significant digits: doubles round-trip exactly,
/// so repeated runs with the same seed produce byte-identical files.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline std::string num(int v) { return std::to_string(v); }
inline std::string num(long v) { return std::to_string(v); }
inline std::string num(unsigned long v) { return std::to_string(v); }
inline std::string num(unsigned long long v) { return std::to_string(v); }

} // namespace minent::csv
