#include "pilinv/policy.hpp"

#include <cmath>
#include <cstdio>

#include "pilinv/errors.hpp"
#include "pilinv/search.hpp"
#include "pilinv/spec_string.hpp"

namespace pilinv {

namespace {

constexpr double kMyopicTol = 1e-6;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be nonnegative and finite");
}

double table_mean(const DemandModel& demand) { return demand.integer_valued() ? demand.table().mean : demand.mean(); }

#ifndef NDEBUG
// Coarse scan of g used to guard the convexity assumption in debug builds.
void check_myopic_against_scan(const ArrivalOutlook& o, const DemandModel& demand, const CostParams& cost, double hi,
                               double q) {
  double gq = myopic_objective(o, demand, cost, q);
  double best = gq;
  for (int i = 0; i <= 200; ++i) best = std::min(best, myopic_objective(o, demand, cost, hi * i / 200.0));
  if (best < gq - 1e-6 * std::max(1.0, std::abs(gq)))
    throw ContractViolation("myopic golden-section result beaten by grid scan");
}
#endif

}  // namespace

std::string to_string(PolicyFamily family) {
  switch (family) {
    case PolicyFamily::BaseStock: return "bs";
    case PolicyFamily::ConstantOrder: return "cop";
    case PolicyFamily::PIL: return "pil";
    case PolicyFamily::Myopic: return "myopic";
    case PolicyFamily::CappedBaseStock: return "cbs";
  }
  return "?";
}

PolicyFamily parse_family(const std::string& name) {
  if (name == "bs" || name == "base-stock") return PolicyFamily::BaseStock;
  if (name == "cop" || name == "constant") return PolicyFamily::ConstantOrder;
  if (name == "pil") return PolicyFamily::PIL;
  if (name == "myopic") return PolicyFamily::Myopic;
  if (name == "cbs" || name == "capped") return PolicyFamily::CappedBaseStock;
  throw ParameterError("unknown policy family '" + name + "'");
}

double decide_base_stock(double S, const PipelineState& state) {
  double q = S - state.position();
  return q > 0.0 ? q : 0.0;
}

double decide_constant(double r, const PipelineState&) { return r; }

double decide_pil(double U, const PipelineState& state, const DemandModel& demand, const ProjectionBackend& backend) {
  double q = U - project_expected_level(state, demand, backend);
  return q > 0.0 ? q : 0.0;
}

double myopic_objective(const ArrivalOutlook& outlook, const DemandModel& demand, const CostParams& cost, double q) {
  return cost.h * (outlook.expected_level() + q - table_mean(demand)) + (cost.h + cost.p) * outlook.expected_shortfall(q);
}

double decide_myopic(const CostParams& cost, const PipelineState& state, const DemandModel& demand,
                     const ProjectionBackend& backend) {
  ArrivalOutlook o = arrival_outlook(state, demand, backend);
  const double hi = demand.quantile(cost.p / (cost.p + cost.h)) + 1.0;
  auto g = [&](double q) { return myopic_objective(o, demand, cost, q); };
  ScalarMinimum m = golden_section_minimize(g, 0.0, hi, kMyopicTol, true);
  // g is convex, so its near-minimal set is an interval; walk to its left end.
  const double slack = 1e-12 * std::max(1.0, std::abs(m.fx));
  double a = 0.0, b = m.x;
  if (g(0.0) <= m.fx + slack) {
    b = 0.0;
  } else {
    while (b - a > kMyopicTol) {
      double mid = 0.5 * (a + b);
      if (g(mid) <= m.fx + slack) b = mid; else a = mid;
    }
  }
#ifndef NDEBUG
  thread_local unsigned long calls = 0;
  if (++calls % 10000 == 0) check_myopic_against_scan(o, demand, cost, hi, b);
#endif
  return b;
}

double decide_capped(double S, double r, const PipelineState& state) {
  double q = decide_base_stock(S, state);
  return q < r ? q : r;
}

Policy Policy::base_stock(double S) {
  require_nonnegative(S, "base-stock level S");
  Policy p;
  p.family_ = PolicyFamily::BaseStock;
  p.a_ = S;
  return p;
}

Policy Policy::constant(double r, double mu) {
  require_nonnegative(r, "constant order r");
  if (!(r < mu)) throw ParameterError("constant order " + fmt(r) + " must be below mean demand " + fmt(mu));
  Policy p;
  p.family_ = PolicyFamily::ConstantOrder;
  p.a_ = r;
  return p;
}

Policy Policy::pil(double U, const DemandModel& demand, const ProjectionBackend& backend) {
  require_nonnegative(U, "projected level U");
  check_compatible(backend, demand);
  Policy p;
  p.family_ = PolicyFamily::PIL;
  p.a_ = U;
  p.demand_ = std::make_shared<const DemandModel>(demand);
  p.backend_ = backend;
  return p;
}

Policy Policy::myopic(const CostParams& cost, const DemandModel& demand, const ProjectionBackend& backend) {
  cost.validate();
  check_compatible(backend, demand);
  Policy p;
  p.family_ = PolicyFamily::Myopic;
  p.cost_ = cost;
  p.demand_ = std::make_shared<const DemandModel>(demand);
  p.backend_ = backend;
  return p;
}

Policy Policy::capped(double S, double r) {
  require_nonnegative(S, "base-stock level S");
  require_nonnegative(r, "cap r");
  Policy p;
  p.family_ = PolicyFamily::CappedBaseStock;
  p.a_ = S;
  p.b_ = r;
  return p;
}

double Policy::decide(const PipelineState& state) const {
  switch (family_) {
    case PolicyFamily::BaseStock: return decide_base_stock(a_, state);
    case PolicyFamily::ConstantOrder: return a_;
    case PolicyFamily::PIL: return decide_pil(a_, state, *demand_, backend_);
    case PolicyFamily::Myopic: return decide_myopic(cost_, state, *demand_, backend_);
    case PolicyFamily::CappedBaseStock: return decide_capped(a_, b_, state);
  }
  return 0.0;
}

std::string Policy::describe() const {
  switch (family_) {
    case PolicyFamily::BaseStock: return "bs:S=" + fmt(a_);
    case PolicyFamily::ConstantOrder: return "cop:r=" + fmt(a_);
    case PolicyFamily::PIL: return "pil:U=" + fmt(a_);
    case PolicyFamily::Myopic: return "myopic";
    case PolicyFamily::CappedBaseStock: return "cbs:S=" + fmt(a_) + ",r=" + fmt(b_);
  }
  return "?";
}

Policy parse_policy(const std::string& text, const DemandModel& demand, const CostParams& cost,
                    const ProjectionBackend& backend) {
  KeyValueSpec kv = parse_key_values(text);
  switch (parse_family(kv.name)) {
    case PolicyFamily::BaseStock: return Policy::base_stock(kv.number("S"));
    case PolicyFamily::ConstantOrder: return Policy::constant(kv.number("r"), demand.mean());
    case PolicyFamily::PIL: return Policy::pil(kv.number("U"), demand, backend);
    case PolicyFamily::Myopic: return Policy::myopic(cost, demand, backend);
    case PolicyFamily::CappedBaseStock: return Policy::capped(kv.number("S"), kv.number("r"));
  }
  throw ParameterError("unknown policy '" + text + "'");
}

}  // namespace pilinv
