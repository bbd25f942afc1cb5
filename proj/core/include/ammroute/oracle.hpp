#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ammroute/domain.hpp"
#include "ammroute/pool.hpp"

// Independent reference solver: water-filling on the common marginal price.
// Nothing here calls into the transfer solver.
namespace ammroute {

struct PricedAllocation {
  double x;
  bool clamped;  // hit the domain floor (-R + margin, or 0 in nonneg mode)
};

// Allocation at which the pool's marginal price of Y in X equals p.
PricedAllocation allocation_at_price(const Pool& pool, double p, Domain domain);

enum class SignClass : std::int8_t { negative = -1, zero = 0, positive = 1 };

struct KktReport {
  bool pass = false;
  // Common marginal output E'. When no pool is stationary the report carries
  // the admissible band [lambda_lo, +inf) and lambda = lambda_lo.
  double lambda = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double max_residual = 0.0;
  std::vector<SignClass> classes;
  std::vector<bool> stationary;
  // |E'_i(x_i) / lambda - 1| for stationary pools, 0 otherwise.
  std::vector<double> residual;
  // lambda - E'_i(x_i) for pools held at a bound; 0 for stationary pools.
  std::vector<double> slack;
};

KktReport check_kkt(std::span<const Pool> pools, std::span<const double> x, Domain domain,
                    double tol);

struct OracleSolution {
  bool feasible = true;
  std::string message;
  std::vector<double> x;
  double objective = 0.0;
  double price = 0.0;  // common marginal price P* = 1 / lambda*
  int iterations = 0;
  KktReport kkt;
};

// Bisects p until |sum_i x_i(p) - x_total| <= tol * (|x_total| + sum_i R_i).
OracleSolution oracle_solve(std::span<const Pool> pools, double x_total, Domain domain,
                            double tol = 1e-13);

}  // namespace ammroute
