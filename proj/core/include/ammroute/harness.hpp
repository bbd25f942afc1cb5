#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ammroute/pool.hpp"
#include "ammroute/routing.hpp"

namespace ammroute {

enum class PoolKind { v2, piecewise };

constexpr std::string_view to_string(PoolKind k) { return k == PoolKind::v2 ? "v2" : "piecewise"; }

// Random pool families. Depth (X reserve for V2, virtual X reserve L / s for
// piecewise pools) is log-uniform in [depth_min, depth_max]; spot prices are
// exp(dispersion * N(0, 1)).
struct GeneratorSpec {
  std::uint64_t seed = 1;
  PoolKind kind = PoolKind::v2;
  double depth_min = 10.0;
  double depth_max = 1000.0;
  double dispersion = 0.2;
  // Piecewise only.
  std::size_t segments = 6;
  double segment_width = 0.05;      // mean log sqrt-price width per segment
  double background_share = 0.1;    // background liquidity relative to depth

  void validate() const;
};

std::vector<Pool> gen_pools(const GeneratorSpec& spec, std::size_t n);

struct BenchRow {
  std::size_t n = 0;
  std::string algo;
  double time_us = 0.0;
  double output_y = 0.0;
  std::size_t rounds = 0;
  double arb_gain = 0.0;  // output_y - baseline output at the same n
  std::size_t active_pools = 0;
  std::string diagnostic;  // empty when the row completed cleanly
};

struct SweepOptions {
  double x_total = 100.0;
  double epsilon = 1e-9;
  double agreement_tol = 1e-5;  // extended vs oracle, relative
  bool parallel = false;
};

// Extended, baseline and oracle rows for every n, ordered by (n, algo).
std::vector<BenchRow> run_sweep(const GeneratorSpec& spec, std::span<const std::size_t> n_list,
                                const SweepOptions& options);

inline constexpr std::string_view kBenchCsvHeader = "n,algo,time_us,output_y,rounds,arb_gain";

void write_csv(std::ostream& os, std::span<const BenchRow> rows, bool timing = true);

struct DiscrepancyReport {
  std::size_t inflated_index = 0;
  double inflate_amount = 0.0;
  double y_baseline = 0.0;
  double y_extended = 0.0;
  double improvement_bps = 0.0;  // NaN when the baseline output is 0
  double inflated_allocation = 0.0;
  Solution baseline;
  Solution extended;
};

// Sells inflate_amount of X into pools[inflate_index] (raising its price of
// Y in X), then routes a fresh x_total with both solvers.
DiscrepancyReport induced_discrepancy(std::span<const Pool> pools, std::size_t inflate_index,
                                      double inflate_amount, double x_total, double epsilon);

// 12 significant digits, trailing zeros dropped.
std::string format_number(double v);

}  // namespace ammroute
