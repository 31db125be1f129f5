#pragma once

#include <cstdio>
#include <string>

namespace polc {

// Shortest decimal that round-trips a double (17 significant digits).
// All CSV/JSON emitters use this so identical runs are byte-identical.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

}  // namespace polc
