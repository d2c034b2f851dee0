#pragma once

#include <cstdio>
#include <string>

namespace riskdec::util {

// All human-readable numeric output goes through this: 12 significant digits
// so diffs between runs are meaningful.
inline std::string num12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace riskdec::util
