#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace ilm {

/// Shortest decimal string that parses back to exactly the same double.
/// Every persisted number (map files, CSVs, frame records) goes through
/// this so that re-loading round-trips bit-for-bit.
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

}  // namespace ilm
