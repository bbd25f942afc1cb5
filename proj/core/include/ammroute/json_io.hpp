#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ammroute/harness.hpp"
#include "ammroute/oracle.hpp"
#include "ammroute/pool.hpp"
#include "ammroute/routing.hpp"

// JSON wire formats. Every emitted document carries "schema_version".
// Numbers are rounded to 12 significant digits before emission so golden
// files do not depend on the last bits of a platform's libm.
namespace ammroute::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct Issue {
  std::string path;  // JSONPath-style, e.g. "$.pools[1].r_x"
  std::string message;
};

std::string describe(const std::vector<Issue>& issues);

double round12(double v);

// {"kind":"v2","r_x":..,"r_y":..} or
// {"kind":"piecewise","sqrt_price":..,"background_liquidity":..,
//  "segments":[{"sqrt_lo":..,"sqrt_hi":..,"liquidity":..}, ...]}
// A missing or null sqrt_hi on the last segment means unbounded above.
json to_json(const Pool& pool);

// Appends every problem found to `issues`; returns a pool only if none.
std::optional<Pool> pool_from_json(const json& j, const std::string& path,
                                   std::vector<Issue>& issues);

// Throws ConfigError listing all issues.
Pool pool_from_json(const json& j);

json to_json(const TransferTrace& trace);
json to_json(const Solution& sol, bool include_trace = false);
json to_json(const KktReport& report);
json to_json(const OracleSolution& sol);
json to_json(const DiscrepancyReport& report);
json bench_rows_to_json(std::span<const BenchRow> rows, bool timing = true);

// Accepts {"allocation":[...]}, {"x":[...]}, a bare array, or a route
// document whose first result carries an allocation.
std::vector<double> allocation_from_json(const json& j);

}  // namespace ammroute::io
