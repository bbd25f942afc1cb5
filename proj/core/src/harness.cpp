#include "ammroute/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>
#include <random>

#include "ammroute/errors.hpp"
#include "ammroute/oracle.hpp"

namespace ammroute {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point since) {
  return std::chrono::duration<double, std::micro>(Clock::now() - since).count();
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double unit() { return unit_(rng_); }
  double normal() { return normal_(rng_); }
  double log_uniform(double lo, double hi) {
    return std::exp(std::log(lo) + unit() * (std::log(hi) - std::log(lo)));
  }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

PiecewisePool make_piecewise(const GeneratorSpec& spec, Sampler& rng, double depth,
                             double spot) {
  const double s0 = 1.0 / std::sqrt(spot);
  const double liq_scale = depth * s0;  // virtual X reserve L / s0 == depth
  const double background = spec.background_share * liq_scale;
  const std::size_t k = spec.segments;
  if (k == 0) return PiecewisePool(s0, background, {});

  // Breakpoints b_0 < ... < b_k with s0 in [b_j0, b_j0+1). Half of the pools
  // sit exactly on a tick so that liquidity jumps at the current price.
  const std::size_t j0 = k / 2;
  const double w = spec.segment_width;
  std::vector<double> b(k + 1);
  const bool at_tick = rng.unit() < 0.5;
  b[j0] = at_tick && j0 > 0 ? s0 : s0 * std::exp(-w * rng.unit());
  b[j0 + 1] = s0 * std::exp(w * (0.5 + rng.unit()));
  for (std::size_t j = j0 + 2; j <= k; ++j) b[j] = b[j - 1] * std::exp(w * (0.5 + rng.unit()));
  for (std::size_t j = j0; j-- > 0;) b[j] = b[j + 1] * std::exp(-w * (0.5 + rng.unit()));

  std::vector<LiquiditySegment> segments;
  segments.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    segments.push_back({b[j], b[j + 1], liq_scale * (0.2 + 1.8 * rng.unit())});
  }
  return PiecewisePool(s0, background, std::move(segments));
}

BenchRow timed_solve(std::span<const Pool> pools, double x_total, Domain domain,
                     const SolverConfig& cfg) {
  BenchRow row;
  row.n = pools.size();
  row.algo = domain == Domain::extended ? "extended" : "baseline";
  try {
    const auto t0 = Clock::now();
    const Solution sol = solve(pools, x_total, domain, cfg);
    row.time_us = elapsed_us(t0);
    row.output_y = sol.objective;
    row.rounds = sol.rounds;
    row.active_pools =
        static_cast<std::size_t>(std::count_if(sol.x.begin(), sol.x.end(), [](double v) {
          return v != 0.0;
        }));
    if (sol.reason != Termination::converged) {
      row.diagnostic = std::string("terminated: ") + std::string(to_string(sol.reason));
    }
  } catch (const std::exception& e) {
    row.output_y = std::nan("");
    row.diagnostic = e.what();
  }
  return row;
}

std::vector<BenchRow> sweep_one(const GeneratorSpec& spec, std::size_t n,
                                const SweepOptions& options) {
  std::vector<BenchRow> rows;
  std::vector<Pool> pools;
  try {
    pools = gen_pools(spec, n);
  } catch (const std::exception& e) {
    for (const char* algo : {"extended", "baseline", "oracle"}) {
      BenchRow row;
      row.n = n;
      row.algo = algo;
      row.output_y = std::nan("");
      row.diagnostic = e.what();
      rows.push_back(row);
    }
    return rows;
  }

  SolverConfig cfg;
  cfg.epsilon = options.epsilon;
  BenchRow ext = timed_solve(pools, options.x_total, Domain::extended, cfg);
  BenchRow base = timed_solve(pools, options.x_total, Domain::nonneg, cfg);

  BenchRow orc;
  orc.n = n;
  orc.algo = "oracle";
  try {
    const auto t0 = Clock::now();
    const OracleSolution sol = oracle_solve(pools, options.x_total, Domain::extended);
    orc.time_us = elapsed_us(t0);
    orc.output_y = sol.objective;
    orc.rounds = static_cast<std::size_t>(sol.iterations);
    orc.active_pools =
        static_cast<std::size_t>(std::count_if(sol.x.begin(), sol.x.end(), [](double v) {
          return v != 0.0;
        }));
    if (!sol.feasible) orc.diagnostic = sol.message;
  } catch (const std::exception& e) {
    orc.output_y = std::nan("");
    orc.diagnostic = e.what();
  }

  for (BenchRow* row : {&ext, &base, &orc}) row->arb_gain = row->output_y - base.output_y;

  if (ext.diagnostic.empty() && orc.diagnostic.empty()) {
    const double denom = orc.output_y != 0.0 ? std::abs(orc.output_y) : 1.0;
    const double rel = std::abs(ext.output_y - orc.output_y) / denom;
    if (!(rel <= options.agreement_tol)) {
      ext.diagnostic = "oracle disagreement " + format_number(rel);
    }
  }

  rows = {ext, base, orc};
  return rows;
}

}  // namespace

void GeneratorSpec::validate() const {
  if (!(depth_min > 0.0) || !(depth_max >= depth_min) || !std::isfinite(depth_max)) {
    throw ConfigError("depth range must satisfy 0 < depth_min <= depth_max < inf");
  }
  if (!(dispersion >= 0.0) || !std::isfinite(dispersion)) {
    throw ConfigError("dispersion must be finite and >= 0");
  }
  if (kind == PoolKind::piecewise) {
    if (!(segment_width > 0.0) || !std::isfinite(segment_width)) {
      throw ConfigError("segment_width must be > 0");
    }
    if (!(background_share > 0.0) || !std::isfinite(background_share)) {
      throw ConfigError("background_share must be > 0");
    }
  }
}

std::vector<Pool> gen_pools(const GeneratorSpec& spec, std::size_t n) {
  spec.validate();
  if (n == 0) throw ConfigError("pool count must be >= 1");

  Sampler rng(spec.seed);
  std::vector<Pool> pools;
  pools.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double depth = rng.log_uniform(spec.depth_min, spec.depth_max);
    const double spot = std::exp(spec.dispersion * rng.normal());
    if (spec.kind == PoolKind::v2) {
      pools.emplace_back(V2Pool(depth, depth / spot));
    } else {
      pools.emplace_back(make_piecewise(spec, rng, depth, spot));
    }
  }
  return pools;
}

std::vector<BenchRow> run_sweep(const GeneratorSpec& spec, std::span<const std::size_t> n_list,
                                const SweepOptions& options) {
  if (n_list.empty()) throw ConfigError("n_list is empty");

  std::vector<std::vector<BenchRow>> per_n(n_list.size());
  if (options.parallel) {
    std::vector<std::future<std::vector<BenchRow>>> jobs;
    for (std::size_t n : n_list) {
      jobs.push_back(std::async(std::launch::async, sweep_one, std::cref(spec), n,
                                std::cref(options)));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) per_n[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < n_list.size(); ++i) per_n[i] = sweep_one(spec, n_list[i], options);
  }

  std::vector<BenchRow> rows;
  for (auto& block : per_n) {
    for (auto& row : block) rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(std::ostream& os, std::span<const BenchRow> rows, bool timing) {
  os << kBenchCsvHeader << '\n';
  for (const auto& row : rows) {
    os << row.n << ',' << row.algo << ',' << (timing ? format_number(row.time_us) : "0") << ','
       << format_number(row.output_y) << ',' << row.rounds << ',' << format_number(row.arb_gain)
       << '\n';
  }
}

DiscrepancyReport induced_discrepancy(std::span<const Pool> pools, std::size_t inflate_index,
                                      double inflate_amount, double x_total, double epsilon) {
  if (inflate_index >= pools.size()) throw ConfigError("inflate_index out of range");
  if (!std::isfinite(inflate_amount) || inflate_amount < 0.0) {
    throw ConfigError("inflate_amount must be finite and >= 0");
  }

  std::vector<Pool> state(pools.begin(), pools.end());
  state[inflate_index] = state[inflate_index].after_trade(inflate_amount);

  SolverConfig cfg;
  cfg.epsilon = epsilon;

  DiscrepancyReport report;
  report.inflated_index = inflate_index;
  report.inflate_amount = inflate_amount;
  report.baseline = solve_baseline(state, x_total, cfg);
  report.extended = solve_extended(state, x_total, cfg);
  report.y_baseline = report.baseline.objective;
  report.y_extended = report.extended.objective;
  report.improvement_bps =
      report.y_baseline > 0.0
          ? (report.y_extended - report.y_baseline) / report.y_baseline * 1e4
          : std::numeric_limits<double>::quiet_NaN();
  report.inflated_allocation = report.extended.x[inflate_index];
  return report;
}

}  // namespace ammroute
