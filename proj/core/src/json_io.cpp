#include "ammroute/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "ammroute/errors.hpp"

namespace ammroute::io {
namespace {

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round12(v);
}

json num_array(std::span<const double> xs) {
  json arr = json::array();
  for (double v : xs) arr.push_back(num(v));
  return arr;
}

json sign_array(std::span<const std::int8_t> s) {
  json arr = json::array();
  for (auto v : s) arr.push_back(static_cast<int>(v));
  return arr;
}

// Reads a required finite number; records an issue otherwise.
std::optional<double> number_at(const json& obj, const char* key, const std::string& path,
                                std::vector<Issue>& issues) {
  const std::string where = path + "." + key;
  if (!obj.contains(key)) {
    issues.push_back({where, "missing"});
    return std::nullopt;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) {
    issues.push_back({where, "must be a number"});
    return std::nullopt;
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    issues.push_back({where, "must be finite"});
    return std::nullopt;
  }
  return d;
}

void require_positive(std::optional<double> v, const std::string& where,
                      std::vector<Issue>& issues) {
  if (v && !(*v > 0.0)) issues.push_back({where, "must be > 0"});
}

}  // namespace

std::string describe(const std::vector<Issue>& issues) {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "\n";
    out += issue.path + ": " + issue.message;
  }
  return out;
}

double round12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

json to_json(const Pool& pool) {
  if (const auto* v2 = std::get_if<V2Pool>(&pool.model())) {
    return {{"kind", "v2"}, {"r_x", v2->r_x()}, {"r_y", v2->r_y()}};
  }
  const auto& pw = std::get<PiecewisePool>(pool.model());
  json segs = json::array();
  for (const auto& seg : pw.segments()) {
    json s = {{"sqrt_lo", seg.sqrt_lo}, {"liquidity", seg.liquidity}};
    if (std::isfinite(seg.sqrt_hi)) s["sqrt_hi"] = seg.sqrt_hi;
    segs.push_back(std::move(s));
  }
  return {{"kind", "piecewise"},
          {"sqrt_price", pw.sqrt_price()},
          {"background_liquidity", pw.background_liquidity()},
          {"segments", std::move(segs)}};
}

std::optional<Pool> pool_from_json(const json& j, const std::string& path,
                                   std::vector<Issue>& issues) {
  if (!j.is_object()) {
    issues.push_back({path, "pool must be an object"});
    return std::nullopt;
  }
  const std::size_t before = issues.size();
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    issues.push_back({path + ".kind", "missing or not a string"});
    return std::nullopt;
  }
  const std::string kind = j.at("kind").get<std::string>();

  if (kind == "v2") {
    const auto rx = number_at(j, "r_x", path, issues);
    const auto ry = number_at(j, "r_y", path, issues);
    require_positive(rx, path + ".r_x", issues);
    require_positive(ry, path + ".r_y", issues);
    if (issues.size() != before) return std::nullopt;
    return Pool(V2Pool(*rx, *ry));
  }

  if (kind != "piecewise") {
    issues.push_back({path + ".kind", "unknown pool kind '" + kind + "'"});
    return std::nullopt;
  }

  const auto sp = number_at(j, "sqrt_price", path, issues);
  const auto bg = number_at(j, "background_liquidity", path, issues);
  require_positive(sp, path + ".sqrt_price", issues);
  require_positive(bg, path + ".background_liquidity", issues);

  std::vector<LiquiditySegment> segments;
  if (j.contains("segments")) {
    const json& arr = j.at("segments");
    if (!arr.is_array()) {
      issues.push_back({path + ".segments", "must be an array"});
    } else {
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string sp_path = path + ".segments[" + std::to_string(i) + "]";
        const json& s = arr[i];
        if (!s.is_object()) {
          issues.push_back({sp_path, "segment must be an object"});
          continue;
        }
        const auto lo = number_at(s, "sqrt_lo", sp_path, issues);
        const auto liq = number_at(s, "liquidity", sp_path, issues);
        std::optional<double> hi;
        const bool last = i + 1 == arr.size();
        if (last && (!s.contains("sqrt_hi") || s.at("sqrt_hi").is_null())) {
          hi = std::numeric_limits<double>::infinity();
        } else {
          hi = number_at(s, "sqrt_hi", sp_path, issues);
        }
        if (lo && *lo < 0.0) issues.push_back({sp_path + ".sqrt_lo", "must be >= 0"});
        if (lo && hi && !(*hi > *lo)) issues.push_back({sp_path + ".sqrt_hi", "must exceed sqrt_lo"});
        if (liq && *liq < 0.0) issues.push_back({sp_path + ".liquidity", "must be >= 0"});
        if (lo && hi && liq) {
          if (!segments.empty() && segments.back().sqrt_hi != *lo) {
            issues.push_back({sp_path + ".sqrt_lo", "segments must be contiguous and sorted"});
          }
          segments.push_back({*lo, *hi, *liq});
        }
      }
    }
  }
  if (issues.size() != before) return std::nullopt;
  try {
    return Pool(PiecewisePool(*sp, *bg, std::move(segments)));
  } catch (const ConfigError& e) {
    issues.push_back({path, e.what()});
    return std::nullopt;
  }
}

Pool pool_from_json(const json& j) {
  std::vector<Issue> issues;
  auto pool = pool_from_json(j, "$", issues);
  if (!pool) throw ConfigError(describe(issues));
  return *pool;
}

json to_json(const TransferTrace& trace) {
  json rounds = json::array();
  for (std::size_t k = 0; k < trace.rounds.size(); ++k) {
    const auto& r = trace.rounds[k];
    json rec = {{"round", r.round},     {"donor", r.donor},     {"receiver", r.receiver},
                {"delta", num(r.delta)}, {"halvings", r.halvings}, {"p_max", num(r.p_max)},
                {"p_min", num(r.p_min)}, {"objective", num(r.objective)}};
    if (k < trace.signs.size()) rec["signs"] = sign_array(trace.signs[k]);
    rounds.push_back(std::move(rec));
  }
  return {{"initial",
           {{"p_max", num(trace.initial_p_max)},
            {"p_min", num(trace.initial_p_min)},
            {"objective", num(trace.initial_objective)},
            {"signs", sign_array(trace.initial_signs)}}},
          {"rounds", std::move(rounds)}};
}

json to_json(const Solution& sol, bool include_trace) {
  json j = {{"domain", std::string(to_string(sol.domain))},
            {"allocation", num_array(sol.x)},
            {"x_total", num(sol.x_total)},
            {"objective", num(sol.objective)},
            {"p_min", num(sol.p_min)},
            {"p_max", num(sol.p_max)},
            {"lambda_band", {num(sol.lambda_lo), num(sol.lambda_hi)}},
            {"termination", std::string(to_string(sol.reason))},
            {"rounds", sol.rounds}};
  if (include_trace) j["trace"] = to_json(sol.trace);
  return j;
}

json to_json(const KktReport& report) {
  json classes = json::array();
  json stationary = json::array();
  for (std::size_t i = 0; i < report.classes.size(); ++i) {
    classes.push_back(static_cast<int>(report.classes[i]));
    stationary.push_back(static_cast<bool>(report.stationary[i]));
  }
  return {{"pass", report.pass},
          {"lambda", num(report.lambda)},
          {"lambda_band", {num(report.lambda_lo), num(report.lambda_hi)}},
          {"max_residual", num(report.max_residual)},
          {"classes", std::move(classes)},
          {"stationary", std::move(stationary)},
          {"residual", num_array(report.residual)},
          {"slack", num_array(report.slack)}};
}

json to_json(const OracleSolution& sol) {
  json j = {{"feasible", sol.feasible},
            {"allocation", num_array(sol.x)},
            {"objective", num(sol.objective)},
            {"price", num(sol.price)},
            {"iterations", sol.iterations},
            {"kkt", to_json(sol.kkt)}};
  if (!sol.message.empty()) j["message"] = sol.message;
  return j;
}

json to_json(const DiscrepancyReport& report) {
  return {{"schema_version", kSchemaVersion},
          {"inflated_index", report.inflated_index},
          {"inflate_amount", num(report.inflate_amount)},
          {"y_baseline", num(report.y_baseline)},
          {"y_extended", num(report.y_extended)},
          {"improvement_bps", num(report.improvement_bps)},
          {"inflated_allocation", num(report.inflated_allocation)},
          {"baseline", to_json(report.baseline)},
          {"extended", to_json(report.extended)}};
}

json bench_rows_to_json(std::span<const BenchRow> rows, bool timing) {
  json arr = json::array();
  for (const auto& row : rows) {
    json r = {{"n", row.n},
              {"algo", row.algo},
              {"time_us", timing ? num(row.time_us) : json(0)},
              {"output_y", num(row.output_y)},
              {"rounds", row.rounds},
              {"arb_gain", num(row.arb_gain)},
              {"active_pools", row.active_pools}};
    if (!row.diagnostic.empty()) r["diagnostic"] = row.diagnostic;
    arr.push_back(std::move(r));
  }
  return {{"schema_version", kSchemaVersion}, {"rows", std::move(arr)}};
}

std::vector<double> allocation_from_json(const json& j) {
  auto read = [](const json& arr) {
    if (!arr.is_array()) throw ConfigError("allocation must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : arr) {
      if (!v.is_number()) throw ConfigError("allocation must be an array of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  };
  if (j.is_array()) return read(j);
  if (j.is_object()) {
    if (j.contains("allocation")) return read(j.at("allocation"));
    if (j.contains("x")) return read(j.at("x"));
    if (j.contains("results") && j.at("results").is_array() && !j.at("results").empty()) {
      return allocation_from_json(j.at("results").at(0));
    }
  }
  throw ConfigError("no allocation found in document");
}

}  // namespace ammroute::io
