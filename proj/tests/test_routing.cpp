#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "ammroute/errors.hpp"
#include "ammroute/harness.hpp"
#include "ammroute/oracle.hpp"
#include "ammroute/routing.hpp"

namespace ammroute {
namespace {

std::vector<Pool> ab_pools() { return {Pool(V2Pool(100, 100)), Pool(V2Pool(100, 400))}; }
std::vector<Pool> twin_pools() { return {Pool(V2Pool(100, 100)), Pool(V2Pool(100, 100))}; }

struct Instance {
  std::vector<Pool> pools;
  double x_total;
};

// Mixed sizes, kinds, budgets and dispersions.
std::vector<Instance> random_instances(int count, std::uint64_t base_seed) {
  std::vector<Instance> out;
  const std::size_t ns[] = {2, 3, 7, 15, 40};
  for (int i = 0; i < count; ++i) {
    GeneratorSpec spec;
    spec.seed = base_seed + static_cast<std::uint64_t>(i);
    spec.kind = i % 2 ? PoolKind::piecewise : PoolKind::v2;
    spec.dispersion = (i / 2) % 3 == 0 ? 0.6 : 0.2;
    const double x_total = (i / 6) % 3 == 0 ? 0.0 : (i / 6) % 3 == 1 ? 100.0 : 3000.0;
    out.push_back({gen_pools(spec, ns[static_cast<std::size_t>(i) % 5]), x_total});
  }
  return out;
}

double exact_sum(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); }

// Configuration.

TEST(SolverConfig, DefaultsAndValidation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.portions_for(3), 8u);
  EXPECT_EQ(cfg.portions_for(20), 20u);
  EXPECT_EQ(cfg.max_rounds_for(2), 10u * 2u * 30u);  // ceil(log2(1e9)) = 30
  cfg.epsilon = 1e-6;
  EXPECT_EQ(cfg.max_rounds_for(5), 10u * 5u * 20u);
  cfg.portions = 3;
  cfg.max_rounds = 7;
  EXPECT_EQ(cfg.portions_for(100), 3u);
  EXPECT_EQ(cfg.max_rounds_for(100), 7u);

  SolverConfig bad;
  bad.epsilon = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = {};
  bad.delta_floor = -1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

// Greedy initialisation.

TEST(GreedyInit, Examples) {
  EXPECT_EQ(greedy_init(twin_pools(), 10.0, 2), (std::vector<double>{5.0, 5.0}));
  const std::vector<Pool> one{Pool(V2Pool(7, 3))};
  EXPECT_EQ(greedy_init(one, 42.0, 5), (std::vector<double>{42.0}));
  EXPECT_EQ(greedy_init(ab_pools(), 30.0, 3), (std::vector<double>{0.0, 30.0}));
  EXPECT_EQ(greedy_init(ab_pools(), 0.0, 4), (std::vector<double>{0.0, 0.0}));
}

TEST(GreedyInit, Errors) {
  EXPECT_THROW(greedy_init({}, 1.0, 1), ConfigError);
  EXPECT_THROW(greedy_init(ab_pools(), 1.0, 0), ConfigError);
  EXPECT_THROW(greedy_init(ab_pools(), -1.0, 2), DomainError);
}

TEST(GreedyInit, NonNegativeAndSumsExactly) {
  for (const auto& inst : random_instances(30, 10)) {
    for (std::size_t m : {1u, 3u, 8u, 50u}) {
      const auto x = greedy_init(inst.pools, inst.x_total, m);
      const double grid = allocation_grid(inst.pools, inst.x_total);
      for (double v : x) EXPECT_GE(v, 0.0);
      EXPECT_EQ(exact_sum(x), snap_to_grid(inst.x_total, grid));
    }
  }
}

// Legitimacy and halving.

TEST(IsLegitimate, Examples) {
  const Pool p(V2Pool(100, 100));
  EXPECT_TRUE(is_legitimate(p, p, 10.0, 0.0, 5.0));
  EXPECT_FALSE(is_legitimate(p, p, 10.0, 0.0, 10.0));
  // Equal prices and a step too small to move either price: boundary case.
  EXPECT_TRUE(is_legitimate(p, p, 10.0, 10.0, 1e-30));
}

TEST(IsLegitimate, Errors) {
  const Pool p(V2Pool(100, 100));
  EXPECT_THROW(is_legitimate(p, p, 10.0, 0.0, 0.0), DomainError);
  EXPECT_THROW(is_legitimate(p, p, 10.0, 0.0, -1.0), DomainError);
  EXPECT_THROW(is_legitimate(p, p, 10.0, 0.0, 110.0), DomainError);
}

TEST(HalvingDelta, InitialTrial) {
  EXPECT_EQ(initial_trial_delta(8.0, 100.0), 4.0);
  EXPECT_EQ(initial_trial_delta(0.0, 100.0), 50.0);
  EXPECT_EQ(initial_trial_delta(-20.0, 100.0), 40.0);
  EXPECT_EQ(initial_trial_delta(8.0, 100.0, Domain::nonneg), 4.0);
}

TEST(HalvingDelta, FirstLegitimateTrial) {
  const Pool p(V2Pool(100, 100));
  const HalvingResult r = halving_delta(p, p, 10.0, 0.0, 1e-12);
  EXPECT_EQ(r.delta, 5.0);
  EXPECT_EQ(r.halvings, 0);
  EXPECT_FALSE(r.underflow);

  // Donor priced 1% above the receiver; the first trials overshoot and
  // need several halvings. Compare with a direct scan of the sequence.
  const Pool donor(V2Pool(100, 99));
  const Pool receiver(V2Pool(100, 100));
  const HalvingResult h = halving_delta(donor, receiver, 0.0, 0.0, 1e-12);
  double d = 50.0;
  int k = 0;
  while (!is_legitimate(donor, receiver, 0.0, 0.0, d)) {
    d *= 0.5;
    ++k;
  }
  EXPECT_EQ(h.delta, d);
  EXPECT_EQ(h.halvings, k);
  EXPECT_GT(k, 3);
  EXPECT_GT(-h.delta, -reserve_x(donor));
}

TEST(HalvingDelta, Underflow) {
  const Pool p(V2Pool(100, 100));
  // Prices equal: no positive step is legitimate.
  const HalvingResult r = halving_delta(p, p, 0.0, 0.0, 1e-3);
  EXPECT_TRUE(r.underflow);
}

// Single steps.

TEST(TransferStep, SymmetricPairEqualisesInOneStep) {
  const auto pools = twin_pools();
  TransferState st(pools, std::vector<double>{10.0, 0.0}, Domain::extended, SolverConfig{});
  const auto r = st.step();
  ASSERT_EQ(r.status, TransferState::StepStatus::applied);
  ASSERT_TRUE(r.record.has_value());
  EXPECT_EQ(r.record->donor, 0u);
  EXPECT_EQ(r.record->receiver, 1u);
  EXPECT_EQ(r.record->delta, 5.0);
  EXPECT_EQ(std::vector<double>(st.allocation().begin(), st.allocation().end()),
            (std::vector<double>{5.0, 5.0}));
  EXPECT_EQ(st.step().status, TransferState::StepStatus::converged);
}

TEST(TransferStep, NoOpWhenPricesEqual) {
  const std::vector<Pool> pools(3, Pool(V2Pool(50, 50)));
  TransferState st(pools, std::vector<double>{0.0, 0.0, 0.0}, Domain::extended, SolverConfig{});
  const auto r = st.step();
  EXPECT_EQ(r.status, TransferState::StepStatus::converged);
  EXPECT_FALSE(r.record.has_value());
  EXPECT_EQ(st.rounds(), 0u);
}

TEST(TransferStep, RejectsInfeasibleStart) {
  const auto pools = twin_pools();
  EXPECT_THROW(TransferState(pools, std::vector<double>{-100.0, 100.0}, Domain::extended, {}),
               DomainError);
  EXPECT_THROW(TransferState(pools, std::vector<double>{-1.0, 1.0}, Domain::nonneg, {}),
               DomainError);
  EXPECT_THROW(TransferState(pools, std::vector<double>{1.0}, Domain::extended, {}), ConfigError);
}

TEST(TransferStep, PerRoundInvariants) {
  for (const auto& inst : random_instances(20, 50)) {
    TransferState st(inst.pools, inst.x_total, Domain::extended, SolverConfig{});
    const double total = st.x_total();
    double f = st.objective();
    for (int k = 0; k < 200; ++k) {
      const auto r = st.step();
      if (r.status != TransferState::StepStatus::applied) break;
      EXPECT_GT(r.record->delta, 0.0);
      EXPECT_EQ(exact_sum(st.allocation()), total);
      const double g = st.objective();
      EXPECT_GE(g, f - 1e-12 * std::max(1.0, std::abs(f)));
      f = g;
    }
  }
}

// Full solver.

TEST(SolveExtended, TwoPoolArbitrage) {
  const auto pools = ab_pools();
  const Solution s = solve_extended(pools, 0.0, SolverConfig{});
  EXPECT_EQ(s.reason, Termination::converged);
  EXPECT_NEAR(s.x[0], -100.0 / 3.0, 1e-6);
  EXPECT_NEAR(s.x[1], 100.0 / 3.0, 1e-6);
  EXPECT_NEAR(s.objective, 50.0, 1e-6);
  EXPECT_EQ(s.x[0] + s.x[1], 0.0);
  EXPECT_LE(s.p_min, 4.0 / 9.0 * (1 + 1e-9));
  EXPECT_GE(s.p_max, 4.0 / 9.0 * (1 - 1e-9));
}

TEST(SolveExtended, SymmetricSplit) {
  const auto pools = twin_pools();
  const Solution s = solve_extended(pools, 10.0, SolverConfig{});
  EXPECT_EQ(s.x, (std::vector<double>{5.0, 5.0}));
  EXPECT_NEAR(s.objective, 2.0 * 100.0 * 5.0 / 105.0, 1e-12);
}

TEST(SolveExtended, SinglePool) {
  const std::vector<Pool> pools{Pool(V2Pool(100, 100))};
  const Solution s = solve_extended(pools, 100.0, SolverConfig{});
  EXPECT_EQ(s.x, (std::vector<double>{100.0}));
  EXPECT_EQ(s.rounds, 0u);
  EXPECT_EQ(s.reason, Termination::converged);
  EXPECT_DOUBLE_EQ(s.objective, 50.0);
}

TEST(SolveExtended, ZeroBudgetEqualPricesIsZero) {
  const std::vector<Pool> pools{Pool(V2Pool(10, 10)), Pool(V2Pool(300, 300))};
  const Solution s = solve_extended(pools, 0.0, SolverConfig{});
  EXPECT_EQ(s.x, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(s.rounds, 0u);
  EXPECT_EQ(s.reason, Termination::converged);
}

TEST(SolveExtended, Errors) {
  EXPECT_THROW(solve_extended({}, 1.0, SolverConfig{}), ConfigError);
  EXPECT_THROW(solve_extended(ab_pools(), -1.0, SolverConfig{}), DomainError);
  SolverConfig bad;
  bad.epsilon = -1;
  EXPECT_THROW(solve_extended(ab_pools(), 1.0, bad), ConfigError);
}

TEST(SolveExtended, StopConditionsAreReported) {
  GeneratorSpec spec;
  spec.seed = 4;
  const auto pools = gen_pools(spec, 20);
  SolverConfig capped;
  capped.max_rounds = 3;
  const Solution a = solve_extended(pools, 100.0, capped);
  EXPECT_EQ(a.reason, Termination::iteration_cap);
  EXPECT_EQ(a.rounds, 3u);

  SolverConfig coarse;
  coarse.delta_floor = 0.5;  // half of |X| + sum R: first halving already below
  const Solution b = solve_extended(pools, 100.0, coarse);
  EXPECT_EQ(b.reason, Termination::delta_underflow);
}

TEST(SolveBaseline, Examples) {
  const Solution a = solve_baseline(ab_pools(), 0.0, SolverConfig{});
  EXPECT_EQ(a.x, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(a.objective, 0.0);
  const Solution b = solve_baseline(twin_pools(), 10.0, SolverConfig{});
  EXPECT_EQ(b.x, (std::vector<double>{5.0, 5.0}));
  const Solution c = solve_baseline(ab_pools(), 30.0, SolverConfig{});
  EXPECT_EQ(c.x, (std::vector<double>{0.0, 30.0}));
}

TEST(SolverTrace, RecordsConsecutiveRounds) {
  GeneratorSpec spec;
  spec.seed = 8;
  spec.kind = PoolKind::piecewise;
  const auto pools = gen_pools(spec, 12);
  SolverConfig cfg;
  cfg.record_trace = true;
  const Solution s = solve_extended(pools, 0.0, cfg);
  ASSERT_EQ(s.trace.rounds.size(), s.rounds);
  ASSERT_EQ(s.trace.signs.size(), s.rounds);
  EXPECT_EQ(s.trace.initial_signs.size(), pools.size());
  for (std::size_t k = 0; k < s.trace.rounds.size(); ++k) {
    EXPECT_EQ(s.trace.rounds[k].round, k);
    EXPECT_GT(s.trace.rounds[k].delta, 0.0);
    EXPECT_NE(s.trace.rounds[k].donor, s.trace.rounds[k].receiver);
  }
  EXPECT_EQ(s.trace.rounds.back().objective, s.objective);

  cfg.record_trace = false;
  const Solution quiet = solve_extended(pools, 0.0, cfg);
  EXPECT_TRUE(quiet.trace.rounds.empty());
  EXPECT_EQ(quiet.x, s.x);
}

// Properties over random instances.

class SolverProperties : public ::testing::TestWithParam<Domain> {};

TEST_P(SolverProperties, ConservationTerminationAndMonotonicity) {
  const Domain domain = GetParam();
  SolverConfig cfg;
  cfg.record_trace = true;
  for (const auto& inst : random_instances(60, 1000)) {
    const Solution s = solve(inst.pools, inst.x_total, domain, cfg);
    const double grid = allocation_grid(inst.pools, inst.x_total);
    EXPECT_EQ(exact_sum(s.x), s.x_total);
    EXPECT_LE(std::abs(s.x_total - inst.x_total), 0.5 * grid);

    ASSERT_EQ(s.reason, Termination::converged);
    EXPECT_LE((s.p_max - s.p_min) / s.p_max, cfg.epsilon);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (domain == Domain::nonneg) {
        EXPECT_GE(s.x[i], 0.0);
      } else {
        EXPECT_GT(s.x[i], -reserve_x(inst.pools[i]));
      }
    }

    double magnitude = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      magnitude += std::abs(quote_extended(inst.pools[i], s.x[i]));
    }
    const double slack = 1e-13 * std::max(magnitude, 1.0);
    double f = s.trace.initial_objective;
    double lo = s.trace.initial_p_min;
    double hi = s.trace.initial_p_max;
    for (const auto& r : s.trace.rounds) {
      EXPECT_GE(r.objective, f - slack);
      EXPECT_GE(r.p_min, lo * (1 - 1e-12));
      EXPECT_LE(r.p_max, hi * (1 + 1e-12));
      f = r.objective;
      lo = r.p_min;
      hi = r.p_max;
    }
  }
}

TEST_P(SolverProperties, SignsPersist) {
  SolverConfig cfg;
  cfg.record_trace = true;
  for (const auto& inst : random_instances(60, 2000)) {
    const Solution s = solve(inst.pools, inst.x_total, GetParam(), cfg);
    std::vector<std::int8_t> seen = s.trace.initial_signs;
    for (const auto& signs : s.trace.signs) {
      for (std::size_t j = 0; j < signs.size(); ++j) {
        if (seen[j] != 0) EXPECT_EQ(signs[j], seen[j]) << "pool " << j;
        if (signs[j] != 0) seen[j] = signs[j];
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Domains, SolverProperties,
                         ::testing::Values(Domain::extended, Domain::nonneg),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(SolverAgainstOracle, SignsAgreeWithOptimum) {
  for (const auto& inst : random_instances(80, 3000)) {
    const Solution s = solve_extended(inst.pools, inst.x_total, SolverConfig{});
    const OracleSolution o = oracle_solve(inst.pools, inst.x_total, Domain::extended);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.x[i] == 0.0) continue;
      EXPECT_EQ(s.x[i] > 0.0, o.x[i] > 0.0) << "pool " << i << " x=" << s.x[i] << " x*=" << o.x[i];
    }
  }
}

TEST(SolverAgainstOracle, ObjectiveAndAllocationAgree) {
  SolverConfig cfg;
  for (const auto& inst : random_instances(80, 4000)) {
    const Solution s = solve_extended(inst.pools, inst.x_total, cfg);
    const OracleSolution o = oracle_solve(inst.pools, inst.x_total, Domain::extended);
    ASSERT_TRUE(o.feasible);
    EXPECT_LE(std::abs(s.objective - o.objective),
              std::max(10.0 * cfg.epsilon * o.objective, 1e-9));
    // Both the optimal price and each pool's final price lie in the
    // terminal band, so each allocation lies between x_i(p_min), x_i(p_max).
    double scale = inst.x_total;
    for (const auto& p : inst.pools) scale += reserve_x(p);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double a = allocation_at_price(inst.pools[i], s.p_min, Domain::extended).x;
      const double b = allocation_at_price(inst.pools[i], s.p_max, Domain::extended).x;
      EXPECT_LE(std::abs(s.x[i] - o.x[i]), (b - a) + 1e-11 * scale) << "pool " << i;
    }
  }
}

TEST(SolverAgainstBaseline, ExtendedDominates) {
  for (const auto& inst : random_instances(80, 5000)) {
    const double fe = solve_extended(inst.pools, inst.x_total, SolverConfig{}).objective;
    const double fb = solve_baseline(inst.pools, inst.x_total, SolverConfig{}).objective;
    EXPECT_GE(fe, fb - 1e-9 * std::abs(fb));
  }
}

TEST(SolverDeterminism, RepeatedRunsAreBitIdentical) {
  for (const auto& inst : random_instances(10, 6000)) {
    const Solution a = solve_extended(inst.pools, inst.x_total, SolverConfig{});
    const Solution b = solve_extended(inst.pools, inst.x_total, SolverConfig{});
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.rounds, b.rounds);
  }
}

}  // namespace
}  // namespace ammroute
