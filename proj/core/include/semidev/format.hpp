#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace semidev {

// Shortest-safe decimal forms used by the CSV/JSON writers. 12 significant
// digits for tables, 17 for specs that must round-trip bit-exactly.
inline std::string fmt_g(double v, int digits = 12) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

inline std::string fmt_g17(double v) { return fmt_g(v, 17); }

}  // namespace semidev
