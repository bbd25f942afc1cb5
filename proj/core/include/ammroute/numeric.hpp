#pragma once

#include <cmath>
#include <ranges>

namespace ammroute {

// Neumaier-compensated sum.
template <std::ranges::input_range R>
double compensated_sum(R&& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

}  // namespace ammroute
