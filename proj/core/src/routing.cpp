#include "ammroute/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ranges>
#include <string>

#include "ammroute/numeric.hpp"

namespace ammroute {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

double floor_to_grid(double value, double grid) {
  if (grid <= 0.0) return value;
  return std::floor(value / grid) * grid;
}

void require_pools(std::span<const Pool> pools) {
  if (pools.empty()) throw ConfigError("pool list is empty");
}

void require_budget(double x_total) {
  if (!std::isfinite(x_total) || x_total < 0.0) {
    throw DomainError("x_total must be finite and >= 0");
  }
}

std::int8_t sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

std::vector<std::int8_t> signs_of(std::span<const double> x) {
  std::vector<std::int8_t> out(x.size());
  std::ranges::transform(x, out.begin(), sign_of);
  return out;
}

}  // namespace

// ---------------------------------------------------------- SolverConfig

void SolverConfig::validate() const {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) throw ConfigError("epsilon must be > 0");
  if (!std::isfinite(delta_floor) || delta_floor <= 0.0) {
    throw ConfigError("delta_floor must be > 0");
  }
}

std::size_t SolverConfig::portions_for(std::size_t n) const {
  return portions > 0 ? portions : std::max<std::size_t>(n, 8);
}

std::size_t SolverConfig::max_rounds_for(std::size_t n) const {
  if (max_rounds > 0) return max_rounds;
  const double bits = std::max(1.0, std::ceil(std::log2(1.0 / epsilon)));
  return 10 * std::max<std::size_t>(n, 1) * static_cast<std::size_t>(bits);
}

// ------------------------------------------------------------- primitives

double allocation_grid(std::span<const Pool> pools, double x_total) {
  double scale = std::abs(x_total);
  for (const auto& pool : pools) scale += reserve_x(pool);
  return std::ldexp(1.0, std::ilogb(scale) + 1 - 50);
}

double snap_to_grid(double value, double grid) {
  if (grid <= 0.0) return value;
  return std::nearbyint(value / grid) * grid;
}

std::vector<double> greedy_init(std::span<const Pool> pools, double x_total,
                                std::size_t portions) {
  require_pools(pools);
  require_budget(x_total);
  if (portions == 0) throw ConfigError("portions must be >= 1");

  std::vector<double> x(pools.size(), 0.0);
  const double grid = allocation_grid(pools, x_total);
  const double budget = snap_to_grid(x_total, grid);
  if (budget == 0.0) return x;

  const double portion = floor_to_grid(budget / static_cast<double>(portions), grid);
  const double last = budget - static_cast<double>(portions - 1) * portion;

  std::vector<double> prices(pools.size());
  for (std::size_t i = 0; i < pools.size(); ++i) prices[i] = price(pools[i], 0.0);

  for (std::size_t k = 0; k < portions; ++k) {
    const auto cheapest =
        static_cast<std::size_t>(std::ranges::min_element(prices) - prices.begin());
    x[cheapest] += k + 1 == portions ? last : portion;
    prices[cheapest] = price(pools[cheapest], x[cheapest]);
  }
  return x;
}

bool is_legitimate(const Pool& donor, const Pool& receiver, double x_donor, double x_receiver,
                   double delta) {
  if (!(delta > 0.0)) throw DomainError("transfer must be positive");
  if (!(x_donor - delta > -reserve_x(donor))) {
    throw DomainError("transfer pushes the donor past its reserve");
  }
  return price(donor, x_donor - delta) >= price(receiver, x_receiver + delta);
}

double initial_trial_delta(double x_donor, double reserve_donor, Domain domain) {
  if (x_donor > 0.0 || domain == Domain::nonneg) return 0.5 * x_donor;
  return 0.5 * (reserve_donor + x_donor);
}

HalvingResult halving_delta(const Pool& donor, const Pool& receiver, double x_donor,
                            double x_receiver, double delta_floor, Domain domain, double grid) {
  HalvingResult out;
  double delta = floor_to_grid(initial_trial_delta(x_donor, reserve_x(donor), domain), grid);
  while (true) {
    if (!(delta >= delta_floor) || delta <= 0.0) {
      out.underflow = true;
      out.delta = delta;
      return out;
    }
    if (is_legitimate(donor, receiver, x_donor, x_receiver, delta)) {
      out.delta = delta;
      return out;
    }
    delta = floor_to_grid(0.5 * delta, grid);
    ++out.halvings;
  }
}

// --------------------------------------------------------- TransferState

TransferState::TransferState(std::span<const Pool> pools, double x_total, Domain domain,
                             SolverConfig config)
    : pools_(pools), domain_(domain), config_(config) {
  config_.validate();
  require_pools(pools);
  require_budget(x_total);
  x_ = greedy_init(pools, x_total, config_.portions_for(pools.size()));
  x_total_ = x_total;
  init_grid();
  prices_.resize(pools_.size());
  for (std::size_t i = 0; i < pools_.size(); ++i) refresh_price(i);
}

TransferState::TransferState(std::span<const Pool> pools, std::vector<double> x, Domain domain,
                             SolverConfig config)
    : pools_(pools), domain_(domain), config_(config), x_(std::move(x)) {
  config_.validate();
  require_pools(pools);
  if (x_.size() != pools.size()) throw ConfigError("allocation size does not match pool count");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double bound = domain == Domain::nonneg ? 0.0 : -reserve_x(pools[i]);
    if (!std::isfinite(x_[i]) || x_[i] < bound || (domain == Domain::extended && x_[i] == bound)) {
      throw DomainError("initial allocation outside the feasible region at pool " +
                        std::to_string(i));
    }
  }
  x_total_ = compensated_sum(x_);
  init_grid();
  for (double& v : x_) v = snap_to_grid(v, grid_);
  x_total_ = 0.0;
  for (double v : x_) x_total_ += v;
  prices_.resize(pools_.size());
  for (std::size_t i = 0; i < pools_.size(); ++i) refresh_price(i);
}

void TransferState::init_grid() {
  scale_ = std::abs(x_total_);
  for (const auto& pool : pools_) scale_ += reserve_x(pool);
  grid_ = allocation_grid(pools_, x_total_);
  x_total_ = snap_to_grid(x_total_, grid_);
  delta_floor_abs_ = config_.delta_floor * scale_;
}

void TransferState::refresh_price(std::size_t i) {
  prices_[i] = price(pools_[i], x_[i]);
  if (!std::isfinite(prices_[i]) || prices_[i] <= 0.0) {
    throw NumericalError("non-finite price at pool " + std::to_string(i));
  }
}

std::size_t TransferState::donor() const {
  std::size_t best = kNone;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (domain_ == Domain::nonneg && !(x_[i] > 0.0)) continue;
    if (best == kNone || prices_[i] > prices_[best]) best = i;
  }
  return best;
}

std::size_t TransferState::receiver() const {
  return static_cast<std::size_t>(std::ranges::min_element(prices_) - prices_.begin());
}

double TransferState::gap() const {
  const std::size_t d = donor();
  if (d == kNone) return 0.0;
  const double p_d = prices_[d];
  return (p_d - prices_[receiver()]) / p_d;
}

double TransferState::objective() const {
  return compensated_sum(std::views::iota(std::size_t{0}, x_.size()) |
                         std::views::transform([this](std::size_t i) {
                           return quote_extended(pools_[i], x_[i]);
                         }));
}

TransferState::StepResult TransferState::step() {
  const std::size_t d = donor();
  if (d == kNone) return {StepStatus::converged, std::nullopt};
  const std::size_t r = receiver();
  if (d == r || (prices_[d] - prices_[r]) / prices_[d] <= config_.epsilon) {
    return {StepStatus::converged, std::nullopt};
  }

  const HalvingResult h =
      halving_delta(pools_[d], pools_[r], x_[d], x_[r], delta_floor_abs_, domain_, grid_);
  if (h.underflow) return {StepStatus::underflow, std::nullopt};

  x_[d] -= h.delta;
  x_[r] += h.delta;
  refresh_price(d);
  refresh_price(r);

  TransferRecord rec{rounds_, d, r, h.delta, h.halvings, 0.0, 0.0, 0.0};
  const std::size_t d_next = donor();
  rec.p_max = d_next == kNone ? prices_[receiver()] : prices_[d_next];
  rec.p_min = prices_[receiver()];
  rec.objective = config_.record_trace ? objective() : std::numeric_limits<double>::quiet_NaN();
  ++rounds_;
  return {StepStatus::applied, rec};
}

// ---------------------------------------------------------------- solvers

Solution solve(std::span<const Pool> pools, double x_total, Domain domain,
               const SolverConfig& config) {
  TransferState state(pools, x_total, domain, config);
  const std::size_t max_rounds = config.max_rounds_for(pools.size());

  Solution sol;
  sol.domain = domain;
  sol.active_after_init =
      static_cast<std::size_t>(std::ranges::count_if(state.allocation(), [](double v) {
        return v > 0.0;
      }));

  auto band = [&state] {
    const std::size_t d = state.donor();
    const double p_min = state.prices()[state.receiver()];
    return std::pair{d == kNone ? p_min : state.prices()[d], p_min};
  };

  if (config.record_trace) {
    std::tie(sol.trace.initial_p_max, sol.trace.initial_p_min) = band();
    sol.trace.initial_objective = state.objective();
    sol.trace.initial_signs = signs_of(state.allocation());
  }

  try {
    while (true) {
      if (state.gap() <= config.epsilon) {
        sol.reason = Termination::converged;
        break;
      }
      if (state.rounds() >= max_rounds) {
        sol.reason = Termination::iteration_cap;
        break;
      }
      const auto result = state.step();
      if (result.status == TransferState::StepStatus::underflow) {
        sol.reason = Termination::delta_underflow;
        break;
      }
      if (result.status == TransferState::StepStatus::converged) {
        sol.reason = Termination::converged;
        break;
      }
      if (config.record_trace) {
        sol.trace.rounds.push_back(*result.record);
        sol.trace.signs.push_back(signs_of(state.allocation()));
      }
    }
  } catch (const NumericalError& e) {
    throw SolverError(e.what(), std::move(sol.trace));
  }

  sol.x.assign(state.allocation().begin(), state.allocation().end());
  sol.x_total = state.x_total();
  sol.objective = state.objective();
  std::tie(sol.p_max, sol.p_min) = band();
  sol.lambda_lo = 1.0 / sol.p_max;
  sol.lambda_hi = 1.0 / sol.p_min;
  sol.rounds = state.rounds();
  return sol;
}

Solution solve_extended(std::span<const Pool> pools, double x_total, const SolverConfig& config) {
  return solve(pools, x_total, Domain::extended, config);
}

Solution solve_baseline(std::span<const Pool> pools, double x_total, const SolverConfig& config) {
  return solve(pools, x_total, Domain::nonneg, config);
}

}  // namespace ammroute
