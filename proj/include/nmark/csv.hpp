// csv.hpp — round-trip number formatting for CSV output

#pragma once

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>

namespace nmark {

/// 17 significant digits, so values survive a text round trip bit for bit.
inline std::string fmt17(double x) {
    char buf[40];
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv_row(std::ostream& os, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) os << ',';
        os << fmt17(v);
        first = false;
    }
    os << '\n';
}

}  // namespace nmark
