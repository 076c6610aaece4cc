#pragma once

#include <cstdio>
#include <string>

namespace restop {

// Shortest round-trip decimal form for doubles in text outputs.
inline std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace restop
