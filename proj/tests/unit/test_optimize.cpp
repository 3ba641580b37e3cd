#include <gtest/gtest.h>

#include <cmath>

#include "pilinv/demand.hpp"
#include "pilinv/errors.hpp"
#include "pilinv/optimize.hpp"
#include "pilinv/theory.hpp"

using namespace pilinv;

TEST(Alpha, ExponentialEqualCosts) {
  EXPECT_NEAR(alpha_D(DemandModel::exponential(1.0), CostParams{1.0, 1.0}), std::log(2.0), 1e-9);
}

TEST(Alpha, RejectsDeterministic) {
  EXPECT_THROW(alpha_D(DemandModel::deterministic(5.0), CostParams{1.0, 1.0}), DomainError);
}

TEST(Alpha, NondecreasingInPenalty) {
  DemandModel d = fit_mixed_erlang({100.0, 0.5});
  double prev = 0.0;
  for (double p : {1.0, 2.0, 4.0, 9.0, 19.0, 99.0}) {
    const double a = alpha_D(d, CostParams{1.0, p});
    EXPECT_GE(a, prev - 1e-12);
    prev = a;
  }
}

TEST(Grid, EqualCostsHaveOneGeometricPoint) {
  DemandModel d = DemandModel::exponential(1.0);
  GuaranteedGrid g = build_grid(0.5, d, CostParams{1.0, 1.0});
  EXPECT_EQ(g.n_geom, 0);
  EXPECT_EQ(g.n_arith, static_cast<long>(std::ceil(2.0 / (g.alpha * 0.5))) - 1);
  EXPECT_NEAR(g.points.back(), 2.0, 1e-12);
  EXPECT_TRUE(g.within_bound());
  EXPECT_NEAR(g.cardinality_bound, 2.0 * (2.0 / g.alpha) + 2.0, 1e-12);
}

TEST(Grid, PointsSortedAndUnique) {
  GuaranteedGrid g = build_grid(0.1, fit_mixed_erlang({100.0, 0.5}), CostParams{1.0, 9.0});
  for (std::size_t i = 1; i < g.points.size(); ++i) EXPECT_LT(g.points[i - 1], g.points[i]);
  EXPECT_EQ(g.n_geom, static_cast<long>(std::ceil(std::log(9.0) / std::log(1.1))));
  EXPECT_DOUBLE_EQ(g.points.front(), 0.0);
}

TEST(Grid, SearchPicksMinimum) {
  GuaranteedGrid g = build_grid(0.25, DemandModel::exponential(10.0), CostParams{1.0, 4.0});
  GridOptimum o = grid_search(g, [](double u) { return (u - 13.0) * (u - 13.0); });
  EXPECT_EQ(o.evaluations, g.points.size());
  for (double u : g.points) EXPECT_LE(o.search_cost, (u - 13.0) * (u - 13.0));
}

TEST(Scalar, WidensOnceAtUpperEdge) {
  ScalarOptimum o = optimize_scalar(SearchSpec{0.0, 10.0, 1e-4}, [](double x) { return (x - 15.0) * (x - 15.0); });
  EXPECT_TRUE(o.edge_hit);
  EXPECT_TRUE(o.widened);
  EXPECT_FALSE(o.flagged);
  EXPECT_NEAR(o.param, 15.0, 1e-3);
}

TEST(Scalar, FlagsAfterSecondEdge) {
  ScalarOptimum o = optimize_scalar(SearchSpec{0.0, 10.0, 1e-3}, [](double x) { return -x; });
  EXPECT_TRUE(o.widened);
  EXPECT_TRUE(o.flagged);
}

TEST(Scalar, LowerEdgeAtZeroIsFine) {
  ScalarOptimum o = optimize_scalar(SearchSpec{0.0, 10.0, 1e-3}, [](double x) { return x; });
  EXPECT_NEAR(o.param, 0.0, 1e-12);
  EXPECT_FALSE(o.flagged);
}

TEST(Capped, FindsBowlMinimum) {
  auto f = [](double S, double r) { return (S - 12.0) * (S - 12.0) + (r - 4.0) * (r - 4.0); };
  CappedOptimum o = optimize_capped(f, 10.0, 3.0, 2.0, 6.0, 1e-6, 400);
  EXPECT_NEAR(o.S, 12.0, 1e-2);
  EXPECT_NEAR(o.r, 4.0, 1e-2);
  EXPECT_FALSE(o.flat_region);
}

TEST(Capped, FlatRegion) {
  CappedOptimum o = optimize_capped([](double, double) { return 1.0; }, 10.0, 3.0, 2.0, 6.0);
  EXPECT_TRUE(o.flat_region);
}

TEST(Brackets, Defaults) {
  DemandModel d = DemandModel::poisson(5.0);
  const CostParams c{1.0, 9.0};
  SearchSpec cop = default_bracket(PolicyFamily::ConstantOrder, d, 1, c);
  EXPECT_DOUBLE_EQ(cop.lo, 0.0);
  EXPECT_LT(cop.hi, 5.0);
  EXPECT_NEAR(default_bracket(PolicyFamily::PIL, d, 1, c).hi, 50.0, 1e-12);
}

TEST(Objective, ZeroLevelLosesAll) {
  DemandModel d = DemandModel::poisson(5.0);
  OptimizeConfig cfg = OptimizeConfig::defaults(3);
  auto f = simulation_objective(PolicyFamily::PIL, d, 2, CostParams{1.0, 4.0}, cfg.search, default_backend(d));
  EXPECT_NEAR(f(0.0), 20.0, 0.2);
}

TEST(Optimize, ExponentialConstantOrderRate) {
  DemandModel d = DemandModel::exponential(100.0);
  const CostParams c{1.0, 9.0};
  OptimizeConfig cfg = OptimizeConfig::defaults(5);
  cfg.search.replications = 20;
  cfg.search.periods = 20000;
  PolicyOptimum o = optimize_policy(PolicyFamily::ConstantOrder, d, 1, c, cfg);
  const double r_star = optimal_constant_rate(100.0, c);
  EXPECT_NEAR(r_star, 100.0 * (1.0 - std::sqrt(1.0 / 19.0)), 1e-12);
  // the gain is flat near r*: compare costs, then parameters loosely
  const BiasFunction at_opt = BiasFunction::make(100.0, r_star, c);
  const BiasFunction at_found = BiasFunction::make(100.0, o.param, c);
  EXPECT_LT(at_found.gain() - at_opt.gain(), 0.01 * at_opt.gain());
  EXPECT_NEAR(o.param, r_star, 5.0);
}

TEST(Optimize, PoissonBaseStockAndPIL) {
  DemandModel d = DemandModel::poisson(5.0);
  const CostParams c{1.0, 4.0};
  OptimizeConfig cfg = OptimizeConfig::defaults(1);
  cfg.final.ci_target = 0.01;
  PolicyOptimum bs = optimize_policy(PolicyFamily::BaseStock, d, 1, c, cfg);
  PolicyOptimum pil = optimize_policy(PolicyFamily::PIL, d, 1, c, cfg);
  EXPECT_NEAR(bs.estimate.mean, 4.16, 0.01 * 4.16 + bs.estimate.ci_halfwidth);
  EXPECT_NEAR(pil.estimate.mean, 4.04, 0.01 * 4.04 + pil.estimate.ci_halfwidth);
  EXPECT_LE(pil.estimate.mean, bs.estimate.mean + 3.0 * bs.estimate.ci_halfwidth);
}
