#include "pilinv/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pilinv/backorder.hpp"
#include "pilinv/errors.hpp"
#include "pilinv/search.hpp"

namespace pilinv {

namespace {

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

ScalarMinimum run_golden(const SearchSpec& s, const std::function<double(double)>& f) {
  return golden_section_minimize(f, s.lo, s.hi, s.tol, true, s.max_evaluations);
}

}  // namespace

ScalarOptimum optimize_scalar(const SearchSpec& spec, const std::function<double(double)>& objective,
                              double hard_upper) {
  if (!(spec.lo <= spec.hi)) throw ParameterError("search bracket needs lo <= hi");
  if (!(spec.tol > 0.0)) throw ParameterError("search tolerance must be positive");
  ScalarOptimum out;
  out.bracket = spec;
  ScalarMinimum m = run_golden(spec, objective);
  out.evaluations = m.evaluations;
  auto on_upper = [&](const SearchSpec& s, double x) { return near(x, s.hi, s.tol) && s.hi < hard_upper; };
  auto on_lower = [&](const SearchSpec& s, double x) { return near(x, s.lo, s.tol) && s.lo > 0.0; };
  if (on_upper(spec, m.x) || on_lower(spec, m.x)) {
    out.edge_hit = true;
    out.widened = true;
    SearchSpec w = spec;
    const double width = spec.hi - spec.lo;
    if (on_upper(spec, m.x)) w.hi = std::min(hard_upper, spec.hi + width);
    if (on_lower(spec, m.x)) w.lo = std::max(0.0, spec.lo - width);
    ScalarMinimum m2 = run_golden(w, objective);
    out.evaluations += m2.evaluations;
    if (m2.fx <= m.fx) m = m2;
    out.bracket = w;
    out.flagged = on_upper(w, m.x) || on_lower(w, m.x);
  }
  out.param = m.x;
  out.search_cost = m.fx;
  return out;
}

CappedOptimum optimize_capped(const std::function<double(double, double)>& objective, double S0, double w,
                              double r_lo, double r_hi, double tol, int max_evaluations) {
  if (!(w >= 0.0) || !(r_lo <= r_hi)) throw ParameterError("capped search box is malformed");
  const double s_lo = std::max(0.0, S0 - w), s_hi = S0 + w;
  const double step_s = std::max(w / 2.0, 1.0), step_r = std::max((r_hi - r_lo) / 2.0, 0.5);
  const std::array<double, 2> lower{0.0, 0.0};
  const std::array<double, 2> upper{s_hi + 2.0 * w + 4.0 * step_s, s_hi + 2.0 * w + 4.0 * step_s};
  CappedOptimum best;
  best.search_cost = INFINITY;
  std::vector<SimplexMinimum> runs;
  for (double s : {s_lo, s_hi})
    for (double r : {r_lo, r_hi}) {
      SimplexMinimum m = nelder_mead_2d(objective, {s, r}, {step_s, step_r}, lower, upper, tol, max_evaluations);
      best.evaluations += m.evaluations;
      runs.push_back(m);
      if (m.fx < best.search_cost) {
        best.search_cost = m.fx;
        best.S = m.x[0];
        best.r = m.x[1];
      }
    }
  // same value reached from different parameters
  for (const auto& m : runs)
    if (std::abs(m.fx - best.search_cost) <= 1e-9 * std::max(1.0, std::abs(best.search_cost)) &&
        (std::abs(m.x[0] - best.S) > 10.0 * tol || std::abs(m.x[1] - best.r) > 10.0 * tol))
      best.flat_region = true;
  return best;
}

double alpha_D(const DemandModel& demand, const CostParams& cost) {
  cost.validate();
  if (!(demand.variance() > 0.0)) throw DomainError("alpha_D is zero for demand without variance");
  const double x = demand.quantile(cost.p / (cost.p + cost.h));
  return cost.p / cost.h * demand.expected_shortfall(x) + demand.expected_excess(x);
}

GuaranteedGrid build_grid(double epsilon, const DemandModel& demand, const CostParams& cost) {
  if (!(epsilon > 0.0)) throw ParameterError("grid epsilon must be positive");
  GuaranteedGrid g;
  g.epsilon = epsilon;
  g.alpha = alpha_D(demand, cost);
  const double mu = demand.mean();
  const double ratio = std::log(cost.p / cost.h);
  g.n_arith = static_cast<long>(std::ceil(2.0 * mu / (g.alpha * epsilon))) - 1;
  g.n_geom = std::max(0L, static_cast<long>(std::ceil(ratio / std::log1p(epsilon))));
  std::set<double> pts;
  for (long i = 0; i <= g.n_arith; ++i) pts.insert(static_cast<double>(i) * epsilon * g.alpha);
  for (long i = 0; i <= g.n_geom; ++i) pts.insert(mu + mu * std::pow(1.0 + epsilon, static_cast<double>(i)));
  g.points.assign(pts.begin(), pts.end());
  g.cardinality_bound = (2.0 * mu / g.alpha + ratio) / epsilon + 2.0;
  return g;
}

GridOptimum grid_search(const GuaranteedGrid& grid, const std::function<double(double)>& objective) {
  GridOptimum out;
  out.search_cost = INFINITY;
  for (double u : grid.points) {
    const double v = objective(u);
    ++out.evaluations;
    if (v < out.search_cost) {
      out.search_cost = v;
      out.param = u;
    }
  }
  return out;
}

OptimizeConfig OptimizeConfig::defaults(std::uint64_t seed) {
  OptimizeConfig c;
  c.search.seed = seed;
  c.search.stream = 101;
  c.search.replications = 10;
  c.search.periods = 5000;
  c.search.warmup = 1000;
  c.search.ci_target = 0.0;
  c.final.seed = seed;
  c.final.stream = 202;
  c.final.replications = 30;
  c.final.periods = 10000;
  c.final.warmup = 2000;
  c.final.ci_target = 0.01;
  c.final.max_periods = 320000;
  return c;
}

std::string PolicyOptimum::describe() const {
  std::ostringstream os;
  os << to_string(family);
  switch (family) {
    case PolicyFamily::BaseStock: os << ":S=" << param; break;
    case PolicyFamily::ConstantOrder: os << ":r=" << param; break;
    case PolicyFamily::PIL: os << ":U=" << param; break;
    case PolicyFamily::CappedBaseStock: os << ":S=" << param << ",r=" << param2; break;
    case PolicyFamily::Myopic: break;
  }
  return os.str();
}

namespace {

Policy make_policy(PolicyFamily family, double a, double b, const DemandModel& demand, const CostParams& cost,
                   const ProjectionBackend& backend) {
  switch (family) {
    case PolicyFamily::BaseStock: return Policy::base_stock(a);
    case PolicyFamily::ConstantOrder: return Policy::constant(a, demand.mean());
    case PolicyFamily::PIL: return Policy::pil(a, demand, backend);
    case PolicyFamily::Myopic: return Policy::myopic(cost, demand, backend);
    case PolicyFamily::CappedBaseStock: return Policy::capped(a, b);
  }
  throw ParameterError("unknown policy family");
}

double leadtime_sd(const DemandModel& demand, int tau) {
  return std::sqrt(static_cast<double>(tau + 1) * demand.variance());
}

}  // namespace

std::function<double(double)> simulation_objective(PolicyFamily family, const DemandModel& demand, int tau,
                                                   const CostParams& cost, const SimConfig& cfg,
                                                   const ProjectionBackend& backend) {
  if (family == PolicyFamily::Myopic || family == PolicyFamily::CappedBaseStock)
    throw ParameterError("scalar objective needs a one-parameter family");
  return [=, d = demand](double x) {
    Policy pol = make_policy(family, x, 0.0, d, cost, backend);
    return estimate_cost(pol, d, tau, cost, cfg).mean;
  };
}

SearchSpec default_bracket(PolicyFamily family, const DemandModel& demand, int tau, const CostParams& cost) {
  const double mu = demand.mean();
  SearchSpec s;
  s.tol = 0.005 * std::max(mu, 1.0);
  switch (family) {
    case PolicyFamily::BaseStock: {
      BackorderSolution b = solve_backorder(demand, tau, cost);
      s.hi = b.S_star + 2.0 * leadtime_sd(demand, tau) + mu;
      break;
    }
    case PolicyFamily::ConstantOrder: s.hi = mu * (1.0 - 1e-6); break;
    case PolicyFamily::PIL: s.hi = (1.0 + cost.p / cost.h) * mu; break;
    default: throw ParameterError("no scalar bracket for " + to_string(family));
  }
  return s;
}

PolicyOptimum optimize_policy(PolicyFamily family, const DemandModel& demand, int tau, const CostParams& cost,
                              const OptimizeConfig& cfg, const SearchSpec* bracket) {
  const ProjectionBackend backend = cfg.backend_set ? cfg.backend : default_backend(demand);
  PolicyOptimum out;
  out.family = family;
  const double mu = demand.mean();
  if (family == PolicyFamily::Myopic) {
    out.estimate = estimate_cost(make_policy(family, 0.0, 0.0, demand, cost, backend), demand, tau, cost, cfg.final);
    return out;
  }
  if (family == PolicyFamily::CappedBaseStock) {
    BackorderSolution b = solve_backorder(demand, tau, cost);
    const double sd = leadtime_sd(demand, tau);
    const double r_star = mu * (1.0 - std::sqrt(cost.h / (2.0 * cost.p + cost.h)));
    auto f = [&](double S, double r) {
      return estimate_cost(Policy::capped(S, r), demand, tau, cost, cfg.search).mean;
    };
    CappedOptimum c = optimize_capped(f, b.S_star, 2.0 * sd, r_star, mu, 1e-3 * std::max(mu, 1.0));
    out.param = c.S;
    out.param2 = c.r;
    out.search_cost = c.search_cost;
    out.evaluations = c.evaluations;
    out.flagged = c.flat_region;
    if (c.flat_region) out.note = "flat region";
  } else {
    SearchSpec s = bracket ? *bracket : default_bracket(family, demand, tau, cost);
    const double hard = family == PolicyFamily::ConstantOrder ? mu * (1.0 - 1e-6) : INFINITY;
    ScalarOptimum o = optimize_scalar(s, simulation_objective(family, demand, tau, cost, cfg.search, backend), hard);
    out.param = o.param;
    out.search_cost = o.search_cost;
    out.evaluations = o.evaluations;
    out.flagged = o.flagged;
    if (o.flagged) out.note = "optimum on bracket edge";
    else if (o.widened) out.note = "bracket widened";
  }
  out.estimate = estimate_cost(make_policy(family, out.param, out.param2, demand, cost, backend), demand, tau, cost,
                               cfg.final);
  return out;
}

}  // namespace pilinv
