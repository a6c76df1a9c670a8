#pragma once

#include <cstdio>
#include <string>

namespace wnls {

// Scientific notation for diagnostics; std::to_string prints fixed point.
inline std::string sci(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

}  // namespace wnls
