#pragma once

#include <string_view>

namespace ammroute {

// Feasible region of each coordinate: (-R_i, inf) or [0, inf).
enum class Domain { extended, nonneg };

constexpr std::string_view to_string(Domain d) {
  return d == Domain::extended ? "extended" : "nonneg";
}

}  // namespace ammroute
