#pragma once

// Independent reference values for tests. Nothing here calls the pool
// traversal code; piecewise quantities are recomputed from the band table.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "ammroute/pool.hpp"

namespace ammroute::testing {

// sqrt_price = 1, background 1, one extra unit of liquidity on [1, inf).
// Selling X stays in L = 1 (virtual reserves 1,1); buying X enters L = 2
// with virtual reserves (2,2), so R_X = 2.
inline Pool tick_boundary_pool() {
  return Pool(PiecewisePool(1.0, 1.0, {{1.0, std::numeric_limits<double>::infinity(), 1.0}}));
}

inline double v2_forward(double rx, double ry, double x) { return ry * x / (rx + x); }
inline double v2_reverse(double rx, double ry, double y) { return rx * y / (ry + y); }
inline double v2_price(double rx, double ry, double x) { return (rx + x) * (rx + x) / (rx * ry); }

// Signed X amount needed to move a piecewise pool from its current sqrt-price
// to `target`: positive when selling X (target below), negative otherwise.
inline double x_to_reach(const PiecewisePool& p, double target) {
  const double s0 = p.sqrt_price();
  const double lo = std::min(s0, target);
  const double hi = std::max(s0, target);
  double amount = 0.0;
  for (const auto& b : p.bands()) {
    const double a = std::max(lo, b.lo);
    const double c = std::min(hi, b.hi);
    if (c > a) amount += b.liquidity * (1.0 / a - 1.0 / c);
  }
  return target <= s0 ? amount : -amount;
}

// Y paid out (target below) or taken in (target above) on the way to target.
inline double y_to_reach(const PiecewisePool& p, double target) {
  const double s0 = p.sqrt_price();
  const double lo = std::min(s0, target);
  const double hi = std::max(s0, target);
  double amount = 0.0;
  for (const auto& b : p.bands()) {
    const double a = std::max(lo, b.lo);
    const double c = std::min(hi, b.hi);
    if (c > a) amount += b.liquidity * (c - a);
  }
  return target <= s0 ? amount : -amount;
}

// Band edges other than the current sqrt-price, nearest first on each side:
// distances (in X) to the first liquidity change strictly below and above.
struct SmoothReach {
  double sell;  // > 0
  double buy;   // > 0, bounded by reserve_x
};

inline SmoothReach smooth_reach(const PiecewisePool& p) {
  const double s0 = p.sqrt_price();
  double below = 0.0;
  double above = std::numeric_limits<double>::infinity();
  for (const auto& b : p.bands()) {
    if (b.lo < s0 && b.lo > below) below = b.lo;
    if (b.hi > s0 && b.hi < above) above = b.hi;
  }
  SmoothReach r;
  r.sell = below > 0.0 ? x_to_reach(p, below) : std::numeric_limits<double>::infinity();
  r.buy = std::isfinite(above) ? -x_to_reach(p, above) : p.reserve_x();
  return r;
}

// Length scale over which quote_extended is smooth on both sides of 0.
inline double smooth_scale(const Pool& pool) {
  if (const auto* v2 = std::get_if<V2Pool>(&pool.model())) return v2->r_x();
  const auto r = smooth_reach(std::get<PiecewisePool>(pool.model()));
  return std::min({r.sell, r.buy, reserve_x(pool)});
}

// Uniform point of the extended domain, biased toward the interesting region
// around 0 and kept clear of the pole.
inline double random_extended_point(const Pool& pool, std::mt19937_64& rng) {
  const double r = reserve_x(pool);
  std::uniform_real_distribution<double> u(-0.999, 3.0);
  return u(rng) * r;
}

}  // namespace ammroute::testing
