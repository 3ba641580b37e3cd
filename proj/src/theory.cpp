#include "pilinv/theory.hpp"

#include <algorithm>
#include <cmath>

#include "pilinv/errors.hpp"
#include "pilinv/policy.hpp"
#include "pilinv/projection.hpp"
#include "pilinv/rng.hpp"

namespace pilinv {

BiasFunction BiasFunction::make(double mu, double r, const CostParams& cost) {
  cost.validate();
  if (!(mu > 0.0)) throw ParameterError("mean demand must be positive");
  if (!(r >= 0.0 && r < mu)) throw DomainError("constant order rate must satisfy 0 <= r < mu");
  return BiasFunction{mu, r, cost.h, cost.p};
}

double bias_eval(const BiasFunction& bf, double x) {
  if (!(bf.r < bf.mu)) throw DomainError("constant order rate must satisfy r < mu");
  return bf.a1() * x * x - bf.p * x;
}

double bias_rhs(const BiasFunction& bf, double x) {
  const double mu = bf.mu;
  const double e = std::exp(-x / mu);
  // partial moments of D on [0, x]
  const double m0 = -std::expm1(-x / mu);
  const double m1 = mu * m0 - x * e;
  const double m2 = 2.0 * mu * m1 - x * x * e;
  const double excess = x - mu * m0;  // E[(x - D)^+]
  const double shortfall = mu * e;    // E[(D - x)^+]
  const double s = x + bf.r;
  const double a = bf.a1();
  const double future = e * bias_eval(bf, bf.r) + a * (s * s * m0 - 2.0 * s * m1 + m2) - bf.p * (s * m0 - m1);
  return bf.h * excess + bf.p * shortfall + future - bf.gain();
}

double verify_bias_fixed_point(const BiasFunction& bf, int points, double span) {
  if (points < 2) throw ParameterError("need at least two check points");
  const double top = span * bf.improving_level();
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = top * i / (points - 1);
    worst = std::max(worst, std::abs(bias_eval(bf, x) - bias_rhs(bf, x)));
  }
  return worst;
}

double optimal_constant_rate(double mu, const CostParams& cost) {
  cost.validate();
  return mu * (1.0 - std::sqrt(cost.h / (2.0 * cost.p + cost.h)));
}

namespace {

// argmin of f on [lo, hi] by successively refined grids
double scan_argmin(const std::function<double(double)>& f, double lo, double hi, double resolution) {
  const int n = 200;
  double best = lo;
  for (;;) {
    const double step = (hi - lo) / n;
    double bv = INFINITY;
    for (int i = 0; i <= n; ++i) {
      const double x = lo + step * i;
      const double v = f(x);
      if (v < bv) bv = v, best = x;
    }
    if (step < resolution) return best;
    lo = std::max(lo, best - step);
    hi = std::min(hi, best + step);
  }
}

}  // namespace

ImprovementReport verify_pil_improvement(double r, const DemandModel& demand, int tau, const CostParams& cost,
                                         std::uint64_t seed, int states, long samples) {
  if (demand.kind() != DemandKind::Exponential) throw ConfigurationError("improvement check needs exponential demand");
  if (tau < 1) throw ParameterError("lead time must be at least 1");
  const double mu = demand.mean();
  const BiasFunction bf = BiasFunction::make(mu, r, cost);
  const double U = bf.improving_level();
  const ProjectionBackend backend = default_backend(demand);
  const Policy pil = Policy::pil(U, demand, backend);
  ImprovementReport rep;
  rep.states = states;
  Rng pick(StreamKey{seed, 0x696d70ULL, 0}.hash());
  for (int s = 0; s < states; ++s) {
    PipelineState x = PipelineState::zero(tau);
    x.on_hand = pick.uniform() * (U + mu);
    for (double& q : x.outstanding) q = pick.uniform() * 2.0 * mu;
    const double ej = project_expected_level(x, demand, backend);

    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < samples; ++i) {
      const std::uint64_t key = StreamKey{seed, static_cast<std::uint64_t>(s) + 1, static_cast<std::uint64_t>(i)}.hash();
      PipelineState y = x;
      double j = 0.0;
      for (int k = 0; k < tau; ++k) {
        Rng rng = period_rng(key, static_cast<std::uint64_t>(k));
        j = advance(y, 0.0, demand.sample(rng), cost).end_inventory;
      }
      sum += j;
      sum2 += j * j;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum2 - sum * mean) / (n - 1.0));
    if (var > 0.0) rep.max_mean_z = std::max(rep.max_mean_z, std::abs(ej - mean) / std::sqrt(var / n));

    // E[H(J + q)] = a1 Var[J] + a1 (E[J] + q - U)^2 + a2
    auto expected_bias = [&](double q) { return bf.a1() * var + bf.a1() * (ej + q - U) * (ej + q - U) + bf.a2(); };
    const double q_scan = scan_argmin(expected_bias, 0.0, 2.0 * (U + tau * mu), 1e-6);
    rep.max_order_error = std::max(rep.max_order_error, std::abs(q_scan - pil.decide(x)));
  }
  rep.passed = rep.max_order_error < 1e-4 && rep.max_mean_z < 4.0;
  return rep;
}

IdentityCheck verify_cost_identity(const CostEstimate& est, double U, double mu, const CostParams& cost,
                                   double slack_se) {
  std::vector<double> res;
  res.reserve(est.reps.size());
  for (const auto& r : est.reps) res.push_back(r.cost - (cost.h * U - cost.h * mu + (cost.h + cost.p) * r.lost));
  MeanCI m = mean_ci(res);
  IdentityCheck out;
  out.residual = m.mean;
  out.std_error = m.std_error;
  out.passed = std::abs(m.mean) <= slack_se * m.std_error + 1e-9 * std::max(1.0, est.mean);
  return out;
}

DominanceRow verify_dominance(const DemandModel& demand, int tau, const CostParams& cost, const OptimizeConfig& cfg) {
  if (demand.kind() != DemandKind::Exponential) throw ConfigurationError("dominance chain needs exponential demand");
  const double mu = demand.mean();
  const ProjectionBackend backend = cfg.backend_set ? cfg.backend : default_backend(demand);
  DominanceRow row;
  row.tau = tau;
  row.p = cost.p;
  row.r_star = optimal_constant_rate(mu, cost);
  const BiasFunction bf = BiasFunction::make(mu, row.r_star, cost);
  row.U_r = bf.improving_level();
  row.gain_closed = bf.gain();

  auto objective = simulation_objective(PolicyFamily::PIL, demand, tau, cost, cfg.search, backend);
  ScalarOptimum o = optimize_scalar(default_bracket(PolicyFamily::PIL, demand, tau, cost), objective);
  row.U_star = objective(row.U_r) < o.search_cost ? row.U_r : o.param;

  const Policy pil_opt = Policy::pil(row.U_star, demand, backend);
  const Policy pil_r = Policy::pil(row.U_r, demand, backend);
  const Policy cop = Policy::constant(row.r_star, mu);
  PairedEstimate first = estimate_difference_crn(pil_opt, pil_r, demand, tau, cost, cfg.final);
  PairedEstimate second = estimate_difference_crn(pil_r, cop, demand, tau, cost, cfg.final);
  row.cost_pil_opt = first.a.mean;
  row.cost_pil_r = second.a.mean;
  row.cost_cop = second.b.mean;
  row.cop_se = second.b.std_error;
  row.d_opt = first.diff_mean;
  row.d_opt_se = first.diff_std_error;
  row.d_cop = second.diff_mean;
  row.d_cop_se = second.diff_std_error;
  row.chain_ok = row.d_opt <= 3.0 * row.d_opt_se + 1e-12 && row.d_cop <= 3.0 * row.d_cop_se + 1e-12;
  row.closed_form_ok = std::abs(row.cost_cop - row.gain_closed) <= 3.0 * row.cop_se;

  // (C(C) - C(P)) - a1 * gap per replication
  std::vector<double> resid(second.diff_reps.size());
  for (std::size_t i = 0; i < resid.size(); ++i)
    resid[i] = -second.diff_reps[i] - bf.a1() * second.sq_gap_reps[i];
  MeanCI q = mean_ci(resid, cfg.final.confidence);
  row.quad_rhs = bf.a1() * second.sq_gap_mean;
  row.quad_residual = q.mean;
  row.quad_residual_se = q.std_error;
  row.quadratic_ok = std::abs(q.mean) <= 3.0 * q.std_error;
  return row;
}

}  // namespace pilinv
