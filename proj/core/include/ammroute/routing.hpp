#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ammroute/domain.hpp"
#include "ammroute/errors.hpp"
#include "ammroute/pool.hpp"

namespace ammroute {

struct SolverConfig {
  double epsilon = 1e-9;        // relative price-gap tolerance
  std::size_t portions = 0;     // greedy portions M; 0 means max(N, 8)
  std::size_t max_rounds = 0;   // 0 means 10 N ceil(log2(1/epsilon))
  double delta_floor = 1e-14;   // minimum transfer, fraction of |X| + sum R_i
  bool record_trace = false;

  void validate() const;
  std::size_t portions_for(std::size_t n) const;
  std::size_t max_rounds_for(std::size_t n) const;
};

enum class Termination { converged, iteration_cap, delta_underflow };

constexpr std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::iteration_cap: return "iteration_cap";
    case Termination::delta_underflow: return "delta_underflow";
  }
  return "unknown";
}

// State after one donor -> receiver transfer.
struct TransferRecord {
  std::size_t round;
  std::size_t donor;
  std::size_t receiver;
  double delta;
  int halvings;
  double p_max;
  double p_min;
  double objective;
};

struct TransferTrace {
  // Band, objective and signs right after greedy initialisation.
  double initial_p_max = 0.0;
  double initial_p_min = 0.0;
  double initial_objective = 0.0;
  std::vector<std::int8_t> initial_signs;
  std::vector<TransferRecord> rounds;
  std::vector<std::vector<std::int8_t>> signs;  // one vector per round
};

struct Solution {
  Domain domain = Domain::extended;
  std::vector<double> x;
  double x_total = 0.0;  // budget as carried on the allocation grid
  double objective = 0.0;
  double p_max = 0.0;
  double p_min = 0.0;
  double lambda_lo = 0.0;  // 1 / p_max
  double lambda_hi = 0.0;  // 1 / p_min
  Termination reason = Termination::converged;
  std::size_t rounds = 0;
  std::size_t active_after_init = 0;
  TransferTrace trace;
};

// Non-finite quote inside the loop. Carries the trace up to the failure.
class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, TransferTrace trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const TransferTrace& trace() const noexcept { return trace_; }

 private:
  TransferTrace trace_;
};

// Allocations are kept on a power-of-two grid fine enough that every
// transfer and every partial sum of the allocation is exact:
//   grid = 2^(e - 50) with 2^(e-1) <= |x_total| + sum_i R_i < 2^e.
double allocation_grid(std::span<const Pool> pools, double x_total);

// x_total rounded to the nearest multiple of grid.
double snap_to_grid(double value, double grid);

// M portions of x_total / M, each to the currently cheapest pool.
// Portions are floored to the allocation grid and the last one takes the
// remainder, so the result sums exactly to snap_to_grid(x_total).
std::vector<double> greedy_init(std::span<const Pool> pools, double x_total, std::size_t portions);

// P_D(x_D - delta) >= P_R(x_R + delta).
bool is_legitimate(const Pool& donor, const Pool& receiver, double x_donor, double x_receiver,
                   double delta);

// First trial of the halving rule: x_D / 2 for a positive donor, otherwise
// (R_D + x_D) / 2.
double initial_trial_delta(double x_donor, double reserve_donor, Domain domain = Domain::extended);

struct HalvingResult {
  double delta = 0.0;
  int halvings = 0;
  bool underflow = false;
};

// Halves the initial trial until the transfer is legitimate. `grid`, when
// positive, floors every trial to a multiple of grid.
HalvingResult halving_delta(const Pool& donor, const Pool& receiver, double x_donor,
                            double x_receiver, double delta_floor, Domain domain = Domain::extended,
                            double grid = 0.0);

// Mutable solver state over an immutable pool set; exposes single steps so
// per-round invariants can be inspected.
class TransferState {
 public:
  TransferState(std::span<const Pool> pools, double x_total, Domain domain, SolverConfig config);

  // Starts from an explicit allocation instead of greedy initialisation.
  TransferState(std::span<const Pool> pools, std::vector<double> x, Domain domain,
                SolverConfig config);

  enum class StepStatus { applied, converged, underflow };

  struct StepResult {
    StepStatus status;
    std::optional<TransferRecord> record;
  };

  // One round of the loop body. No-op (status converged) when the loop guard
  // fails.
  StepResult step();

  std::span<const double> allocation() const noexcept { return x_; }
  std::span<const double> prices() const noexcept { return prices_; }
  double x_total() const noexcept { return x_total_; }
  double grid() const noexcept { return grid_; }
  std::size_t rounds() const noexcept { return rounds_; }
  Domain domain() const noexcept { return domain_; }

  std::size_t donor() const;
  std::size_t receiver() const;
  double gap() const;  // (P_D - P_R) / P_D, 0 with no eligible donor
  double objective() const;

 private:
  void init_grid();
  void refresh_price(std::size_t i);

  std::span<const Pool> pools_;
  Domain domain_;
  SolverConfig config_;
  std::vector<double> x_;
  std::vector<double> prices_;
  double x_total_ = 0.0;
  double scale_ = 0.0;
  double grid_ = 0.0;
  double delta_floor_abs_ = 0.0;
  std::size_t rounds_ = 0;
};

// Transfer algorithm on the extended domain (-R_i, inf).
Solution solve_extended(std::span<const Pool> pools, double x_total, const SolverConfig& config);

// Transfer algorithm restricted to [0, inf); baseline for the arbitrage gain.
Solution solve_baseline(std::span<const Pool> pools, double x_total, const SolverConfig& config);

Solution solve(std::span<const Pool> pools, double x_total, Domain domain,
               const SolverConfig& config);

}  // namespace ammroute
