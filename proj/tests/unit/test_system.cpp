#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "pilinv/errors.hpp"
#include "pilinv/system.hpp"

using namespace pilinv;

namespace {
const CostParams kCost{1.0, 9.0};
}

TEST(Step, Examples) {
  PeriodOutcome a = step(PipelineState{10.0, {}}, 0.0, 4.0, kCost);
  EXPECT_DOUBLE_EQ(a.end_inventory, 6.0);
  EXPECT_DOUBLE_EQ(a.lost, 0.0);
  EXPECT_DOUBLE_EQ(a.cost, 6.0);

  PeriodOutcome b = step(PipelineState{3.0, {}}, 0.0, 7.0, kCost);
  EXPECT_DOUBLE_EQ(b.end_inventory, 0.0);
  EXPECT_DOUBLE_EQ(b.lost, 4.0);
  EXPECT_DOUBLE_EQ(b.cost, 36.0);

  PeriodOutcome c = step(PipelineState{5.0, {}}, 0.0, 5.0, kCost);
  EXPECT_DOUBLE_EQ(c.end_inventory, 0.0);
  EXPECT_DOUBLE_EQ(c.lost, 0.0);
  EXPECT_DOUBLE_EQ(c.cost, 0.0);
}

TEST(Step, PipelineAdvances) {
  // tau = 3: order joins the back, the front arrives
  PeriodOutcome o = step(PipelineState{4.0, {2.0, 3.0}}, 7.0, 1.0, kCost);
  EXPECT_DOUBLE_EQ(o.next_state.on_hand, 3.0 + 2.0);
  ASSERT_EQ(o.next_state.outstanding.size(), 2u);
  EXPECT_DOUBLE_EQ(o.next_state.outstanding[0], 3.0);
  EXPECT_DOUBLE_EQ(o.next_state.outstanding[1], 7.0);

  // tau = 1: the order is on hand next period
  PeriodOutcome t1 = step(PipelineState{4.0, {}}, 7.0, 1.0, kCost);
  EXPECT_DOUBLE_EQ(t1.next_state.on_hand, 10.0);
}

TEST(Step, RejectsNegativeInputs) {
  EXPECT_THROW(step(PipelineState{-1.0, {}}, 0.0, 1.0, kCost), ContractViolation);
  EXPECT_THROW(step(PipelineState{1.0, {}}, -1.0, 1.0, kCost), ContractViolation);
  EXPECT_THROW(step(PipelineState{1.0, {}}, 0.0, -1.0, kCost), ContractViolation);
  EXPECT_THROW(step(PipelineState{1.0, {-2.0}}, 0.0, 1.0, kCost), ContractViolation);
}

TEST(Step, Deterministic) {
  PipelineState x{3.3, {1.1, 2.2}};
  PeriodOutcome a = step(x, 0.7, 4.9, kCost);
  PeriodOutcome b = step(x, 0.7, 4.9, kCost);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.next_state.on_hand, b.next_state.on_hand);
  EXPECT_EQ(a.next_state.outstanding, b.next_state.outstanding);
}

TEST(Cost, Validation) {
  EXPECT_THROW((CostParams{0.0, 1.0}.validate()), ParameterError);
  EXPECT_THROW((CostParams{1.0, -1.0}.validate()), ParameterError);
}

TEST(CumulativeLost, Examples) {
  EXPECT_DOUBLE_EQ(cumulative_lost(PipelineState{10.0, {0.0, 0.0}}, {3, 3, 3}, {0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(cumulative_lost(PipelineState{2.0, {0.0, 0.0}}, {5, 0, 0}, {0, 0, 0}), 3.0);
  EXPECT_THROW(cumulative_lost(PipelineState{2.0, {}}, {5, 0}, {0}), ContractViolation);
}

TEST(Property, MaxFormulaEqualsStepSum) {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_int_distribution<int> len(1, 12), lead(1, 5);
  for (int trial = 0; trial < 10000; ++trial) {
    const int tau = lead(gen);
    PipelineState x{u(gen), std::vector<double>(tau - 1)};
    for (double& q : x.outstanding) q = u(gen) * 0.8;
    const int T = len(gen);
    std::vector<double> d(T), q(T);
    for (int t = 0; t < T; ++t) {
      d[t] = u(gen);
      q[t] = u(gen) * 0.9;
    }
    const double a = cumulative_lost(x, d, q);
    const double b = cumulative_lost_by_steps(x, d, q);
    ASSERT_NEAR(a, b, 1e-9 * (1.0 + a)) << "trial " << trial;
  }
}

TEST(Property, MassBalance) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int i = 0; i < 10000; ++i) {
    const double I = u(gen), d = u(gen);
    PeriodOutcome o = step(PipelineState{I, {1.0}}, 2.0, d, kCost);
    ASSERT_NEAR(I - d + o.lost, o.end_inventory, 1e-12);
    ASSERT_NEAR(o.cost, kCost.h * o.end_inventory + kCost.p * o.lost, 1e-12);
  }
}
