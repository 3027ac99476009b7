#pragma once

#include <span>
#include <string>

#include "excal/expr.hpp"

namespace excal {

/// "(c1, c2, ...)" with round-trip number formatting.
inline std::string format_point(std::span<const double> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + format_number(p[i]);
  return s + ")";
}

}  // namespace excal
