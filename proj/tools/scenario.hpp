#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ammroute/harness.hpp"
#include "ammroute/json_io.hpp"
#include "ammroute/pool.hpp"
#include "ammroute/routing.hpp"

namespace ammroute::cli {

enum class RunMode { extended, baseline, both, oracle };

std::string_view to_string(RunMode mode);
std::optional<RunMode> parse_mode(std::string_view text);

struct GeneratedPools {
  GeneratorSpec spec;
  std::size_t n = 0;
};

// A routing problem instance. Exactly one of `pools` / `generator` is the
// pool source.
struct Scenario {
  std::vector<Pool> pools;
  std::optional<GeneratedPools> generator;
  double x_total = 0.0;
  double epsilon = 1e-9;
  RunMode mode = RunMode::extended;
  SolverConfig solver;

  std::vector<Pool> materialize() const;
};

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<io::Issue> issues)
      : std::runtime_error(io::describe(issues)), issues_(std::move(issues)) {}
  ScenarioError(std::string path, std::string message)
      : ScenarioError(std::vector<io::Issue>{{std::move(path), std::move(message)}}) {}
  const std::vector<io::Issue>& issues() const noexcept { return issues_; }

 private:
  std::vector<io::Issue> issues_;
};

// Validates the whole document and throws ScenarioError with every
// violation found.
Scenario parse_scenario(std::string_view text);

}  // namespace ammroute::cli
