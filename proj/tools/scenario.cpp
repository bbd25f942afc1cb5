#include "scenario.hpp"

#include <cmath>
#include <string>

namespace ammroute::cli {
namespace {

using io::Issue;
using io::json;

std::optional<double> optional_number(const json& obj, const char* key, const std::string& path,
                                      std::vector<Issue>& issues) {
  if (!obj.contains(key)) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    issues.push_back({path + "." + key, "must be a finite number"});
    return std::nullopt;
  }
  return v.get<double>();
}

std::optional<std::size_t> optional_count(const json& obj, const char* key,
                                          const std::string& path, std::vector<Issue>& issues) {
  if (!obj.contains(key)) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    issues.push_back({path + "." + key, "must be a non-negative integer"});
    return std::nullopt;
  }
  return static_cast<std::size_t>(v.get<long long>());
}

void parse_generator(const json& g, Scenario& sc, std::vector<Issue>& issues) {
  const std::string path = "$.generator";
  if (!g.is_object()) {
    issues.push_back({path, "must be an object"});
    return;
  }
  GeneratedPools gen;
  if (g.contains("seed")) {
    if (!g.at("seed").is_number_unsigned()) {
      issues.push_back({path + ".seed", "must be a non-negative integer"});
    } else {
      gen.spec.seed = g.at("seed").get<std::uint64_t>();
    }
  }
  if (g.contains("kind")) {
    const json& k = g.at("kind");
    if (k == "v2") {
      gen.spec.kind = PoolKind::v2;
    } else if (k == "piecewise") {
      gen.spec.kind = PoolKind::piecewise;
    } else {
      issues.push_back({path + ".kind", "unknown pool kind"});
    }
  }
  if (!g.contains("n")) {
    issues.push_back({path + ".n", "missing"});
  } else if (auto n = optional_count(g, "n", path, issues)) {
    if (*n == 0) issues.push_back({path + ".n", "must be >= 1"});
    gen.n = *n;
  }
  if (auto v = optional_number(g, "depth_min", path, issues)) gen.spec.depth_min = *v;
  if (auto v = optional_number(g, "depth_max", path, issues)) gen.spec.depth_max = *v;
  if (auto v = optional_number(g, "dispersion", path, issues)) gen.spec.dispersion = *v;
  if (auto v = optional_count(g, "segments", path, issues)) gen.spec.segments = *v;
  if (auto v = optional_number(g, "segment_width", path, issues)) gen.spec.segment_width = *v;
  if (auto v = optional_number(g, "background_share", path, issues)) {
    gen.spec.background_share = *v;
  }
  try {
    gen.spec.validate();
  } catch (const std::exception& e) {
    issues.push_back({path, e.what()});
  }
  sc.generator = gen;
}

void parse_solver(const json& s, Scenario& sc, std::vector<Issue>& issues) {
  const std::string path = "$.solver";
  if (!s.is_object()) {
    issues.push_back({path, "must be an object"});
    return;
  }
  if (auto v = optional_count(s, "portions", path, issues)) sc.solver.portions = *v;
  if (auto v = optional_count(s, "max_rounds", path, issues)) sc.solver.max_rounds = *v;
  if (auto v = optional_number(s, "delta_floor", path, issues)) {
    if (*v > 0.0) {
      sc.solver.delta_floor = *v;
    } else {
      issues.push_back({path + ".delta_floor", "must be > 0"});
    }
  }
  if (s.contains("trace")) {
    if (!s.at("trace").is_boolean()) {
      issues.push_back({path + ".trace", "must be a boolean"});
    } else {
      sc.solver.record_trace = s.at("trace").get<bool>();
    }
  }
}

}  // namespace

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::extended: return "extended";
    case RunMode::baseline: return "baseline";
    case RunMode::both: return "both";
    case RunMode::oracle: return "oracle";
  }
  return "extended";
}

std::optional<RunMode> parse_mode(std::string_view text) {
  if (text == "extended") return RunMode::extended;
  if (text == "baseline") return RunMode::baseline;
  if (text == "both") return RunMode::both;
  if (text == "oracle") return RunMode::oracle;
  return std::nullopt;
}

std::vector<Pool> Scenario::materialize() const {
  if (generator) return gen_pools(generator->spec, generator->n);
  return pools;
}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("$", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("$", "scenario must be a JSON object");

  std::vector<Issue> issues;
  Scenario sc;

  if (doc.contains("schema_version")) {
    const json& v = doc.at("schema_version");
    if (!v.is_number_integer() || v.get<int>() != io::kSchemaVersion) {
      issues.push_back({"$.schema_version",
                        "unsupported schema version (expected " +
                            std::to_string(io::kSchemaVersion) + ")"});
    }
  }

  const bool has_pools = doc.contains("pools");
  const bool has_gen = doc.contains("generator");
  if (has_pools == has_gen) {
    issues.push_back({"$", "exactly one source: provide either \"pools\" or \"generator\""});
  }

  if (has_pools) {
    const json& arr = doc.at("pools");
    if (!arr.is_array() || arr.empty()) {
      issues.push_back({"$.pools", "must be a non-empty array"});
    } else {
      for (std::size_t i = 0; i < arr.size(); ++i) {
        auto pool = io::pool_from_json(arr[i], "$.pools[" + std::to_string(i) + "]", issues);
        if (pool) sc.pools.push_back(std::move(*pool));
      }
    }
  }
  if (has_gen) parse_generator(doc.at("generator"), sc, issues);

  if (auto v = optional_number(doc, "x_total", "$", issues)) {
    if (*v < 0.0) {
      issues.push_back({"$.x_total", "must be >= 0"});
    } else {
      sc.x_total = *v;
    }
  }
  if (auto v = optional_number(doc, "epsilon", "$", issues)) {
    if (!(*v > 0.0)) {
      issues.push_back({"$.epsilon", "must be > 0"});
    } else {
      sc.epsilon = *v;
    }
  }
  if (doc.contains("mode")) {
    const json& m = doc.at("mode");
    std::optional<RunMode> mode;
    if (m.is_string()) mode = parse_mode(m.get<std::string>());
    if (!mode) {
      issues.push_back({"$.mode", "must be one of extended, baseline, both, oracle"});
    } else {
      sc.mode = *mode;
    }
  }
  if (doc.contains("solver")) parse_solver(doc.at("solver"), sc, issues);

  if (!issues.empty()) throw ScenarioError(std::move(issues));
  sc.solver.epsilon = sc.epsilon;
  return sc;
}

}  // namespace ammroute::cli
