#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ammroute/errors.hpp"
#include "ammroute/harness.hpp"
#include "ammroute/json_io.hpp"
#include "ammroute/numeric.hpp"
#include "ammroute/oracle.hpp"
#include "ammroute/routing.hpp"
#include "scenario.hpp"

namespace ammroute::cli {
namespace {

using io::json;
using Clock = std::chrono::steady_clock;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path);
  return buf.str();
}

struct CommonFlags {
  std::string scenario_path;
  std::string mode;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  bool trace = false;
  std::string format = "json";
  bool no_timing = false;
  CLI::Option* epsilon_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* mode_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool scenario_required) {
  auto* sc = cmd->add_option("--scenario", f.scenario_path, "Scenario JSON file");
  if (scenario_required) sc->required();
  f.mode_opt = cmd->add_option("--mode", f.mode, "extended | baseline | both | oracle");
  f.epsilon_opt = cmd->add_option("--epsilon", f.epsilon, "Relative price-gap tolerance");
  f.seed_opt = cmd->add_option("--seed", f.seed, "Generator seed override");
  cmd->add_flag("--trace", f.trace, "Emit per-round transfer traces");
  cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--no-timing", f.no_timing, "Zero out wall-time fields");
}

Scenario load_scenario(const CommonFlags& f) {
  Scenario sc = parse_scenario(read_file(f.scenario_path));
  if (f.epsilon_opt->count() > 0) {
    if (!(f.epsilon > 0.0)) throw ScenarioError("--epsilon", "must be > 0");
    sc.epsilon = f.epsilon;
    sc.solver.epsilon = f.epsilon;
  }
  if (f.mode_opt->count() > 0) {
    auto mode = parse_mode(f.mode);
    if (!mode) throw ScenarioError("--mode", "must be one of extended, baseline, both, oracle");
    sc.mode = *mode;
  }
  if (f.seed_opt->count() > 0 && sc.generator) sc.generator->spec.seed = f.seed;
  if (f.trace) sc.solver.record_trace = true;
  return sc;
}

double elapsed_us(Clock::time_point t0) {
  return std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
}

int route(const CommonFlags& f, std::ostream& out) {
  if (f.format != "json") throw ScenarioError("--format", "route emits json only");
  const Scenario sc = load_scenario(f);
  const std::vector<Pool> pools = sc.materialize();

  json results = json::array();
  bool all_converged = true;
  auto run = [&](Domain domain, const char* name) {
    const auto t0 = Clock::now();
    const Solution sol = solve(pools, sc.x_total, domain, sc.solver);
    const double us = elapsed_us(t0);
    json r = io::to_json(sol, sc.solver.record_trace);
    r["algorithm"] = name;
    r["time_us"] = f.no_timing ? 0.0 : io::round12(us);
    all_converged = all_converged && sol.reason == Termination::converged;
    results.push_back(std::move(r));
  };

  switch (sc.mode) {
    case RunMode::extended: run(Domain::extended, "extended"); break;
    case RunMode::baseline: run(Domain::nonneg, "baseline"); break;
    case RunMode::both:
      run(Domain::extended, "extended");
      run(Domain::nonneg, "baseline");
      break;
    case RunMode::oracle: {
      const auto t0 = Clock::now();
      const OracleSolution sol = oracle_solve(pools, sc.x_total, Domain::extended);
      json r = io::to_json(sol);
      r["algorithm"] = "oracle";
      r["time_us"] = f.no_timing ? 0.0 : io::round12(elapsed_us(t0));
      all_converged = sol.feasible;
      results.push_back(std::move(r));
      break;
    }
  }

  json doc = {{"schema_version", io::kSchemaVersion},
              {"mode", std::string(to_string(sc.mode))},
              {"x_total", io::round12(sc.x_total)},
              {"epsilon", sc.epsilon},
              {"results", std::move(results)}};
  out << doc.dump(2) << '\n';
  return all_converged ? kOk : kNotConverged;
}

int verify(const CommonFlags& f, const std::string& allocation_path, std::ostream& out) {
  const Scenario sc = load_scenario(f);
  const std::vector<Pool> pools = sc.materialize();
  const Domain domain = sc.mode == RunMode::baseline ? Domain::nonneg : Domain::extended;
  const double tol = 10.0 * sc.epsilon;

  std::vector<double> x;
  if (!allocation_path.empty()) {
    json doc;
    try {
      doc = json::parse(read_file(allocation_path));
    } catch (const json::parse_error& e) {
      throw ScenarioError("--allocation", std::string("malformed JSON: ") + e.what());
    }
    x = io::allocation_from_json(doc);
    if (x.size() != pools.size()) {
      throw ScenarioError("--allocation", "expected " + std::to_string(pools.size()) +
                                                " entries, got " + std::to_string(x.size()));
    }
  } else {
    x = solve(pools, sc.x_total, domain, sc.solver).x;
  }

  double scale = sc.x_total;
  for (const auto& p : pools) scale += reserve_x(p);
  const double budget_residual = std::abs(compensated_sum(x) - sc.x_total);
  const bool budget_ok = budget_residual <= tol * scale;

  const KktReport kkt = check_kkt(pools, x, domain, tol);
  const OracleSolution oracle = oracle_solve(pools, sc.x_total, domain);
  double objective = 0.0;
  for (std::size_t i = 0; i < pools.size(); ++i) objective += quote_extended(pools[i], x[i]);

  const bool pass = kkt.pass && budget_ok;
  json doc = {{"schema_version", io::kSchemaVersion},
              {"domain", std::string(to_string(domain))},
              {"tolerance", tol},
              {"pass", pass},
              {"objective", io::round12(objective)},
              {"oracle_objective", io::round12(oracle.objective)},
              {"budget_residual", io::round12(budget_residual)},
              {"kkt", io::to_json(kkt)},
              {"oracle", io::to_json(oracle)}};
  out << doc.dump(2) << '\n';
  return pass ? kOk : kCheckFailed;
}

struct BenchFlags {
  std::string kind = "v2";
  std::vector<std::size_t> n_list{3, 5, 10, 20, 50, 100};
  double x_total = 100.0;
  double dispersion = 0.2;
  std::string output;
  bool parallel = false;
  CLI::Option* kind_opt = nullptr;
  CLI::Option* x_opt = nullptr;
  CLI::Option* dispersion_opt = nullptr;
};

int bench(const CommonFlags& f, const BenchFlags& b, std::ostream& out) {
  GeneratorSpec spec;
  SweepOptions options;
  options.x_total = b.x_total;
  if (!f.scenario_path.empty()) {
    const Scenario sc = load_scenario(f);
    if (!sc.generator) throw ScenarioError("$.generator", "bench needs a generator scenario");
    spec = sc.generator->spec;
    options.x_total = sc.x_total;
    options.epsilon = sc.epsilon;
  }
  if (f.seed_opt->count() > 0) spec.seed = f.seed;
  if (f.epsilon_opt->count() > 0) {
    if (!(f.epsilon > 0.0)) throw ScenarioError("--epsilon", "must be > 0");
    options.epsilon = f.epsilon;
  }
  if (b.kind_opt->count() > 0) spec.kind = b.kind == "v2" ? PoolKind::v2 : PoolKind::piecewise;
  if (b.x_opt->count() > 0) {
    if (!(b.x_total >= 0.0)) throw ScenarioError("--x-total", "must be >= 0");
    options.x_total = b.x_total;
  }
  if (b.dispersion_opt->count() > 0) spec.dispersion = b.dispersion;
  options.parallel = b.parallel;
  if (b.n_list.empty() || std::ranges::count(b.n_list, 0u) > 0) {
    throw ScenarioError("--n-list", "pool counts must be >= 1");
  }
  spec.validate();

  const auto rows = run_sweep(spec, b.n_list, options);
  const bool timing = !f.no_timing;

  std::ofstream file;
  std::ostream* sink = &out;
  if (!b.output.empty()) {
    file.open(b.output);
    if (!file) throw IoError("cannot write " + b.output);
    sink = &file;
  }
  if (f.format == "csv") {
    write_csv(*sink, rows, timing);
  } else {
    *sink << io::bench_rows_to_json(rows, timing).dump(2) << '\n';
  }
  if (!*sink) throw IoError("write failed");

  const bool clean = std::ranges::all_of(rows, [](const BenchRow& r) { return r.diagnostic.empty(); });
  return clean ? kOk : kNotConverged;
}

int discrepancy(const CommonFlags& f, std::size_t index, double amount, std::ostream& out) {
  const Scenario sc = load_scenario(f);
  const std::vector<Pool> pools = sc.materialize();
  const DiscrepancyReport report = induced_discrepancy(pools, index, amount, sc.x_total, sc.epsilon);
  out << io::to_json(report).dump(2) << '\n';
  const bool ok = report.baseline.reason == Termination::converged &&
                  report.extended.reason == Termination::converged;
  return ok ? kOk : kNotConverged;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-hop AMM routing and arbitrage"};
  app.name("ammroute");
  app.require_subcommand(1);

  CommonFlags route_flags;
  auto* route_cmd = app.add_subcommand("route", "Solve a scenario and print the solution");
  add_common(route_cmd, route_flags, true);

  CommonFlags bench_flags;
  BenchFlags bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "Seeded random sweep over pool counts");
  add_common(bench_cmd, bench_flags, false);
  bench_opts.kind_opt = bench_cmd->add_option("--kind", bench_opts.kind, "v2 | piecewise")
                            ->check(CLI::IsMember({"v2", "piecewise"}));
  bench_cmd->add_option("--n-list", bench_opts.n_list, "Pool counts")->delimiter(',');
  bench_opts.x_opt = bench_cmd->add_option("--x-total", bench_opts.x_total, "Input budget");
  bench_opts.dispersion_opt =
      bench_cmd->add_option("--dispersion", bench_opts.dispersion, "Log spot-price spread");
  bench_cmd->add_option("--output", bench_opts.output, "Write rows to a file");
  bench_cmd->add_flag("--parallel", bench_opts.parallel, "Run pool counts concurrently");

  CommonFlags verify_flags;
  std::string allocation_path;
  auto* verify_cmd = app.add_subcommand("verify", "Check KKT conditions against the oracle");
  add_common(verify_cmd, verify_flags, true);
  verify_cmd->add_option("--allocation", allocation_path,
                         "Allocation JSON (route output or {\"allocation\": [...]})");

  CommonFlags disc_flags;
  std::size_t inflate_index = 0;
  double inflate_amount = 0.0;
  auto* disc_cmd =
      app.add_subcommand("discrepancy", "Inflate one pool, then compare both solvers");
  add_common(disc_cmd, disc_flags, true);
  disc_cmd->add_option("--inflate-index", inflate_index, "Pool to inflate")->required();
  disc_cmd->add_option("--inflate-amount", inflate_amount, "X sold into that pool")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (route_cmd->parsed()) return route(route_flags, out);
    if (bench_cmd->parsed()) return bench(bench_flags, bench_opts, out);
    if (verify_cmd->parsed()) return verify(verify_flags, allocation_path, out);
    if (disc_cmd->parsed()) return discrepancy(disc_flags, inflate_index, inflate_amount, out);
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const ScenarioError& e) {
    err << "validation error:\n" << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    err << "solver error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::logic_error& e) {
    // ConfigError and DomainError derive from logic_error.
    err << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}

}  // namespace ammroute::cli
