#pragma once

#include <cstdio>
#include <string>

namespace flagdyn {

// every float we ever print: 17 significant digits, locale-independent
inline std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace flagdyn
