#pragma once

#include <cstdio>
#include <string>

namespace dmac {

/// 17 significant digits, enough to round-trip a double.
inline std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace dmac
