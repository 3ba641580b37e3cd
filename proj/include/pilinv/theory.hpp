#pragma once

#include <cstdint>
#include <vector>

#include "pilinv/demand.hpp"
#include "pilinv/optimize.hpp"
#include "pilinv/simulation.hpp"
#include "pilinv/system.hpp"

namespace pilinv {

/// Bias of the constant order policy under exponential demand,
/// H(x) = a1 x^2 - p x with a1 = h / (2 (mu - r)).
struct BiasFunction {
  double mu = 1.0;
  double r = 0.0;
  double h = 1.0;
  double p = 1.0;

  /// Rejects r >= mu or r < 0.
  static BiasFunction make(double mu, double r, const CostParams& cost);

  double a1() const { return h / (2.0 * (mu - r)); }
  double a2() const { return -p * p * (mu - r) / (2.0 * h); }
  double improving_level() const { return p * (mu - r) / h; }
  double gain() const { return p * (mu - r) + h * r * r / (2.0 * (mu - r)); }
};

double bias_eval(const BiasFunction& bf, double x);

/// Right-hand side of the bias fixed-point equation,
/// E[h(x-D)^+ + p(D-x)^+ + H((x-D)^+ + r)] - g, integrated in closed form.
double bias_rhs(const BiasFunction& bf, double x);

/// max |H(x) - rhs(x)| over `points` equally spaced x in [0, span * U(r)].
double verify_bias_fixed_point(const BiasFunction& bf, int points = 50, double span = 4.0);

/// argmin_r of the constant-order gain under exponential demand.
double optimal_constant_rate(double mu, const CostParams& cost);

struct ImprovementReport {
  int states = 0;
  double max_order_error = 0.0;  // |grid argmin - PIL order|
  double max_mean_z = 0.0;       // projected E[J] versus sampled mean, in standard errors
  bool passed = false;
};

/// On random pipeline states, the PIL order for U(r) minimizes E[H(J + q)].
/// E[H(J + q)] is built from Var[J] and E[J] and scanned over q.
ImprovementReport verify_pil_improvement(double r, const DemandModel& demand, int tau, const CostParams& cost,
                                         std::uint64_t seed, int states = 100, long samples = 20000);

/// Cost identity for PIL started from zero: C = hU - h mu + (h + p) * lost rate.
struct IdentityCheck {
  double residual = 0.0;
  double std_error = 0.0;
  bool passed = false;
};
IdentityCheck verify_cost_identity(const CostEstimate& est, double U, double mu, const CostParams& cost,
                                   double slack_se = 3.0);

/// One (tau, p) row of the exponential dominance chain.
struct DominanceRow {
  int tau = 1;
  double p = 0.0;
  double r_star = 0.0;
  double U_r = 0.0;      // U(r*)
  double U_star = 0.0;   // searched PIL level
  double cost_pil_opt = 0.0;
  double cost_pil_r = 0.0;
  double cost_cop = 0.0;
  double gain_closed = 0.0;
  double cop_se = 0.0;
  double d_opt = 0.0;  // C(P^{U*}) - C(P^{U(r*)})
  double d_opt_se = 0.0;
  double d_cop = 0.0;  // C(P^{U(r*)}) - C(C^{r*})
  double d_cop_se = 0.0;
  double quad_rhs = 0.0;  // a1 * mean squared order gap
  double quad_residual = 0.0;  // (C(C) - C(P)) - a1 * gap, paired by replication
  double quad_residual_se = 0.0;
  bool chain_ok = false;
  bool closed_form_ok = false;
  bool quadratic_ok = false;
};

DominanceRow verify_dominance(const DemandModel& demand, int tau, const CostParams& cost, const OptimizeConfig& cfg);

}  // namespace pilinv
