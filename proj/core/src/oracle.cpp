#include "ammroute/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ranges>
#include <string>

#include "ammroute/errors.hpp"
#include "ammroute/numeric.hpp"

namespace ammroute {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Pools closer than this (relative) to the pole count as held at the floor.
constexpr double kFloorBand = 1e-10;

// Signed X allocation that moves the sqrt-price from its current value to
// `target`, summed band by band.
double piecewise_allocation_to(const PiecewisePool& pool, double target) {
  const double s0 = pool.sqrt_price();
  double x = 0.0;
  if (target < s0) {
    for (const auto& band : pool.bands()) {
      const double upper = std::min(band.hi, s0);
      const double lower = std::max(band.lo, target);
      if (lower < upper) x += band.liquidity * (1.0 / lower - 1.0 / upper);
    }
  } else if (target > s0) {
    for (const auto& band : pool.bands()) {
      const double lower = std::max(band.lo, s0);
      const double upper = std::min(band.hi, target);
      if (lower < upper) {
        const double inv_upper = std::isinf(upper) ? 0.0 : 1.0 / upper;
        x -= band.liquidity * (1.0 / lower - inv_upper);
      }
    }
  }
  return x;
}

double marginal(const Pool& pool, double x) { return 1.0 / price(pool, x); }

}  // namespace

PricedAllocation allocation_at_price(const Pool& pool, double p, Domain domain) {
  if (!std::isfinite(p) || p <= 0.0) throw DomainError("price must be finite and > 0");

  double x = 0.0;
  if (const auto* v2 = std::get_if<V2Pool>(&pool.model())) {
    x = std::sqrt(p * v2->r_x() * v2->r_y()) - v2->r_x();
  } else {
    x = piecewise_allocation_to(std::get<PiecewisePool>(pool.model()), 1.0 / std::sqrt(p));
  }

  const double floor = domain == Domain::nonneg ? 0.0 : -reserve_x(pool) * (1.0 - kPoleMargin);
  if (x < floor) return {floor, true};
  return {x, false};
}

KktReport check_kkt(std::span<const Pool> pools, std::span<const double> x, Domain domain,
                    double tol) {
  if (pools.size() != x.size()) throw ConfigError("allocation size does not match pool count");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be > 0");

  std::vector<std::string> violations;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    const double bound =
        domain == Domain::nonneg ? 0.0 : -reserve_x(pools[i]) * (1.0 - kPoleMargin);
    if (!std::isfinite(x[i]) || x[i] < bound) {
      violations.push_back("x[" + std::to_string(i) + "] = " + std::to_string(x[i]) +
                           " below bound " + std::to_string(bound));
    }
  }
  if (!violations.empty()) throw FeasibilityError(std::move(violations));

  const std::size_t n = pools.size();
  KktReport report;
  report.classes.resize(n);
  report.stationary.resize(n);
  report.residual.assign(n, 0.0);
  report.slack.assign(n, 0.0);

  std::vector<double> marg(n);
  double lo = kInf;
  double hi = 0.0;
  double bound_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    report.classes[i] = x[i] > 0.0   ? SignClass::positive
                        : x[i] < 0.0 ? SignClass::negative
                                     : SignClass::zero;
    report.stationary[i] = domain == Domain::nonneg
                               ? x[i] > 0.0
                               : x[i] > -reserve_x(pools[i]) * (1.0 - kFloorBand);
    marg[i] = marginal(pools[i], x[i]);
    if (report.stationary[i]) {
      lo = std::min(lo, marg[i]);
      hi = std::max(hi, marg[i]);
    } else {
      bound_max = std::max(bound_max, marg[i]);
    }
  }

  bool pass = true;
  if (hi > 0.0) {
    report.lambda_lo = lo;
    report.lambda_hi = hi;
    report.lambda = 0.5 * (lo + hi);
    pass = (hi - lo) / hi <= tol;
  } else {
    report.lambda_lo = bound_max;
    report.lambda_hi = kInf;
    report.lambda = bound_max;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (report.stationary[i]) {
      report.residual[i] = std::abs(marg[i] / report.lambda - 1.0);
      report.max_residual = std::max(report.max_residual, report.residual[i]);
    } else {
      report.slack[i] = report.lambda - marg[i];
      if (marg[i] > report.lambda * (1.0 + tol)) pass = false;
    }
  }
  report.pass = pass;
  return report;
}

OracleSolution oracle_solve(std::span<const Pool> pools, double x_total, Domain domain,
                            double tol) {
  if (pools.empty()) throw ConfigError("oracle needs at least one pool");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be > 0");
  if (!std::isfinite(x_total)) throw DomainError("x_total must be finite");

  double scale = std::abs(x_total);
  for (const auto& pool : pools) scale += reserve_x(pool);
  const double target_gap = tol * scale;

  auto total_at = [&](double p) {
    double sum = 0.0;
    for (const auto& pool : pools) sum += allocation_at_price(pool, p, domain).x;
    return sum;
  };

  OracleSolution out;

  double p_lo = kInf;
  double p_hi = 0.0;
  for (const auto& pool : pools) {
    p_lo = std::min(p_lo, price(pool, 0.0));
    p_hi = std::max(p_hi, price(pool, std::max(x_total, 0.0)));
  }

  // Every pool sits at or below its spot allocation at p_lo, and at or above
  // x_total at p_hi; widen only if x_total is outside that range.
  double g_lo = total_at(p_lo);
  for (int k = 0; g_lo > x_total; ++k) {
    if (k > 2000 || p_lo == 0.0) {
      out.feasible = false;
      out.message = "no price brings the total allocation down to x_total";
      return out;
    }
    p_lo *= 0.5;
    g_lo = total_at(p_lo);
  }
  double g_hi = total_at(p_hi);
  for (int k = 0; g_hi < x_total; ++k) {
    if (k > 2000 || !std::isfinite(p_hi)) {
      out.feasible = false;
      out.message = "no price brings the total allocation up to x_total";
      return out;
    }
    p_hi *= 2.0;
    g_hi = total_at(p_hi);
  }

  double p = p_lo;
  if (std::abs(g_lo - x_total) > target_gap) {
    p = p_hi;
    if (std::abs(g_hi - x_total) > target_gap) {
      // Bisect in log-price.
      for (out.iterations = 0; out.iterations < 2000; ++out.iterations) {
        const double mid = std::sqrt(p_lo) * std::sqrt(p_hi);
        if (!(mid > p_lo && mid < p_hi)) {
          p = std::abs(g_lo - x_total) <= std::abs(g_hi - x_total) ? p_lo : p_hi;
          break;
        }
        const double g = total_at(mid);
        p = mid;
        if (std::abs(g - x_total) <= target_gap) break;
        if (g < x_total) {
          p_lo = mid;
          g_lo = g;
        } else {
          p_hi = mid;
          g_hi = g;
        }
      }
    }
  }

  out.price = p;
  out.x.reserve(pools.size());
  for (const auto& pool : pools) out.x.push_back(allocation_at_price(pool, p, domain).x);
  out.objective = compensated_sum(std::views::iota(std::size_t{0}, pools.size()) |
                                  std::views::transform([&](std::size_t i) {
                                    return quote_extended(pools[i], out.x[i]);
                                  }));
  out.kkt = check_kkt(pools, out.x, domain, 10.0 * tol);
  return out;
}

}  // namespace ammroute
