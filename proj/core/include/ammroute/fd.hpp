#pragma once

#include <cmath>
#include <concepts>

#include "ammroute/errors.hpp"

// Finite-difference derivative estimates. The callable's own domain errors
// propagate unchanged.
namespace ammroute::fd {

enum class Side { left, right };

namespace detail {
inline void check_step(double h) {
  if (!std::isfinite(h) || h <= 0.0) throw DomainError("finite-difference step must be > 0");
}
inline double sign(Side side) { return side == Side::right ? 1.0 : -1.0; }
}  // namespace detail

// (f(x+h) - f(x-h)) / 2h
template <std::invocable<double> F>
double derivative(F&& f, double x, double h) {
  detail::check_step(h);
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// First-order one-sided difference.
template <std::invocable<double> F>
double one_sided(F&& f, double x, double h, Side side) {
  detail::check_step(h);
  const double s = detail::sign(side);
  return s * (f(x + s * h) - f(x)) / h;
}

// Fourth-order one-sided stencil; only samples [x, x+4h] (or [x-4h, x]).
template <std::invocable<double> F>
double one_sided4(F&& f, double x, double h, Side side) {
  detail::check_step(h);
  const double s = detail::sign(side);
  const double f0 = f(x);
  const double f1 = f(x + s * h);
  const double f2 = f(x + 2.0 * s * h);
  const double f3 = f(x + 3.0 * s * h);
  const double f4 = f(x + 4.0 * s * h);
  return s * (-25.0 * f0 + 48.0 * f1 - 36.0 * f2 + 16.0 * f3 - 3.0 * f4) / (12.0 * h);
}

template <std::invocable<double> F>
double second_central(F&& f, double x, double h) {
  detail::check_step(h);
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Second-order accurate one-sided second derivative.
template <std::invocable<double> F>
double second_one_sided(F&& f, double x, double h, Side side) {
  detail::check_step(h);
  const double s = detail::sign(side);
  return (2.0 * f(x) - 5.0 * f(x + s * h) + 4.0 * f(x + 2.0 * s * h) - f(x + 3.0 * s * h)) /
         (h * h);
}

}  // namespace ammroute::fd
