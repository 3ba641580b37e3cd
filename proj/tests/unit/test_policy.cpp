#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pilinv/demand.hpp"
#include "pilinv/errors.hpp"
#include "pilinv/policy.hpp"
#include "pilinv/projection.hpp"
#include "pilinv/rng.hpp"
#include "pilinv/simulation.hpp"

using namespace pilinv;

TEST(BaseStock, Examples) {
  PipelineState x{5.0, {6.0, 4.0}};
  EXPECT_DOUBLE_EQ(decide_base_stock(20.0, x), 5.0);
  EXPECT_DOUBLE_EQ(decide_base_stock(10.0, PipelineState{8.0, {6.0, 4.0}}), 0.0);
  EXPECT_DOUBLE_EQ(decide_base_stock(0.0, x), 0.0);
  EXPECT_DOUBLE_EQ(Policy::base_stock(20.0).decide(x), 5.0);
}

TEST(Constant, Examples) {
  EXPECT_DOUBLE_EQ(Policy::constant(3.0, 5.0).decide(PipelineState{100.0, {2.0}}), 3.0);
  EXPECT_DOUBLE_EQ(Policy::constant(0.0, 5.0).decide(PipelineState{0.0, {}}), 0.0);
  EXPECT_THROW(Policy::constant(5.0, 5.0), ParameterError);
  EXPECT_THROW(Policy::constant(-1.0, 5.0), std::exception);
}

TEST(Capped, Examples) {
  PipelineState x{5.0, {6.0, 4.0}};
  EXPECT_DOUBLE_EQ(decide_capped(20.0, 2.0, x), 2.0);
  EXPECT_DOUBLE_EQ(decide_capped(20.0, 100.0, x), 5.0);
  EXPECT_DOUBLE_EQ(decide_capped(1e9, 3.5, x), 3.5);
  EXPECT_DOUBLE_EQ(Policy::capped(20.0, 2.0).decide(x), 2.0);
}

TEST(PIL, Examples) {
  DemandModel e = DemandModel::exponential(1.0);
  EXPECT_NEAR(Policy::pil(0.5, e).decide(PipelineState{0.0, {}}), 0.5, 1e-12);

  // 2 - E[(5 - D)^+] for Poisson mean 5
  DemandModel p = DemandModel::poisson(5.0);
  EXPECT_NEAR(Policy::pil(2.0, p).decide(PipelineState{5.0, {}}), 2.0 - 0.8773368488392532, 1e-10);

  // projection above U clamps to zero
  EXPECT_DOUBLE_EQ(Policy::pil(2.0, p).decide(PipelineState{30.0, {}}), 0.0);
}

TEST(Myopic, NewsvendorAtEmptyState) {
  DemandModel d = DemandModel::poisson(5.0);
  const double q = decide_myopic(CostParams{1.0, 9.0}, PipelineState{0.0, {}}, d, ProjectionBackend::lattice());
  EXPECT_NEAR(q, 8.0, 1e-5);
}

TEST(Myopic, MatchesScanOracle) {
  DemandModel d = DemandModel::poisson(5.0);
  const CostParams cost{1.0, 9.0};
  PipelineState x{2.5, {3.0, 4.2}};
  ArrivalOutlook o = arrival_outlook(x, d, ProjectionBackend::lattice());
  double best = 0.0, bv = INFINITY;
  for (int i = 0; i <= 200000; ++i) {
    const double q = i * 1e-4;
    const double v = myopic_objective(o, d, cost, q);
    if (v < bv - 1e-13) bv = v, best = q;
  }
  const double q = decide_myopic(cost, x, d, ProjectionBackend::lattice());
  EXPECT_NEAR(myopic_objective(o, d, cost, q), bv, 1e-9);
  EXPECT_NEAR(q, best, 2e-4);
}

TEST(Myopic, MonotoneInPenalty) {
  DemandModel d = DemandModel::poisson(5.0);
  PipelineState x{1.0, {2.0}};
  double prev = -1.0;
  for (double p : {10.0, 1e3, 1e6}) {
    const double q = decide_myopic(CostParams{1.0, p}, x, d, ProjectionBackend::lattice());
    EXPECT_GE(q, prev - 1e-6);
    prev = q;
  }
}

TEST(Myopic, HugeStockOrdersNothing) {
  DemandModel d = DemandModel::poisson(5.0);
  EXPECT_NEAR(decide_myopic(CostParams{1.0, 9.0}, PipelineState{100.0, {0.0}}, d, ProjectionBackend::lattice()), 0.0,
              1e-6);
}

TEST(Parse, PolicySpecs) {
  DemandModel d = DemandModel::poisson(5.0);
  const CostParams c{1.0, 4.0};
  const ProjectionBackend be = ProjectionBackend::lattice();
  EXPECT_EQ(parse_policy("bs:S=12", d, c, be).family(), PolicyFamily::BaseStock);
  EXPECT_EQ(parse_policy("cop:r=4", d, c, be).family(), PolicyFamily::ConstantOrder);
  EXPECT_EQ(parse_policy("pil:U=7", d, c, be).family(), PolicyFamily::PIL);
  EXPECT_EQ(parse_policy("myopic", d, c, be).family(), PolicyFamily::Myopic);
  Policy cbs = parse_policy("cbs:S=14,r=6", d, c, be);
  EXPECT_DOUBLE_EQ(cbs.level(), 14.0);
  EXPECT_DOUBLE_EQ(cbs.cap(), 6.0);
  EXPECT_THROW(parse_policy("cop:r=5", d, c, be), ParameterError);
}

namespace {

// Runs PIL from zero and checks attainment, stationarity and the position bound.
void check_pil_path(const DemandModel& d, int tau, double U, int paths, int periods) {
  const ProjectionBackend be = default_backend(d);
  const Policy pil = Policy::pil(U, d, be);
  const CostParams cost{1.0, 9.0};
  for (int r = 0; r < paths; ++r) {
    PipelineState x = PipelineState::zero(tau);
    const std::uint64_t key = StreamKey{3, 0, static_cast<std::uint64_t>(r)}.hash();
    for (int t = 0; t < periods; ++t) {
      const double ej = project_expected_level(x, d, be);
      const double q = pil.decide(x);
      ASSERT_LE(q, std::max(0.0, U + tau * d.mean() - x.position()) + 1e-9);
      ASSERT_LE(ej, U + 1e-9) << "clamp bound at t " << t;
      ASSERT_NEAR(ej + q, U, 1e-9);
      Rng rng = period_rng(key, t);
      advance(x, q, d.sample(rng), cost);
    }
  }
}

}  // namespace

TEST(Property, PILAttainmentPoisson) { check_pil_path(DemandModel::poisson(5.0), 2, 6.5, 1000, 1000); }

TEST(Property, PILAttainmentME) { check_pil_path(fit_mixed_erlang({100.0, 1.5}), 3, 120.0, 20, 500); }

TEST(Property, PILMonotoneInLevel) {
  std::vector<DemandModel> models = {DemandModel::poisson(5.0), DemandModel::geometric(5.0),
                                     fit_mixed_erlang({5.0, 0.5})};
  const CostParams cost{1.0, 9.0};
  for (const auto& d : models) {
    const std::vector<double> levels = {0.0, 2.0, 4.5, 7.0, 11.0};
    for (int path = 0; path < 30; ++path) {
      std::vector<Trajectory> tr;
      for (double U : levels) tr.push_back(simulate_path(Policy::pil(U, d), d, 3, cost, 5, 0, path, 200));
      for (std::size_t k = 1; k < levels.size(); ++k) {
        double qa = 0.0, qb = 0.0, la = 0.0, lb = 0.0;
        for (std::size_t t = 0; t < tr[k].orders.size(); ++t) {
          ASSERT_EQ(tr[k].demand[t], tr[k - 1].demand[t]);
          qa += tr[k - 1].orders[t];
          qb += tr[k].orders[t];
          la += tr[k - 1].lost[t];
          lb += tr[k].lost[t];
          ASSERT_LE(qa, qb + 1e-9);
          ASSERT_GE(la, lb - 1e-9);
        }
      }
    }
  }
}
