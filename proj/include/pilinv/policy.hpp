#pragma once

#include <memory>
#include <string>

#include "pilinv/demand.hpp"
#include "pilinv/projection.hpp"
#include "pilinv/system.hpp"

namespace pilinv {

enum class PolicyFamily { BaseStock, ConstantOrder, PIL, Myopic, CappedBaseStock };

std::string to_string(PolicyFamily family);
PolicyFamily parse_family(const std::string& name);

double decide_base_stock(double S, const PipelineState& state);
double decide_constant(double r, const PipelineState& state);
double decide_pil(double U, const PipelineState& state, const DemandModel& demand, const ProjectionBackend& backend);
double decide_myopic(const CostParams& cost, const PipelineState& state, const DemandModel& demand,
                     const ProjectionBackend& backend);
double decide_capped(double S, double r, const PipelineState& state);

/// One-period cost in the arrival period as a function of the order size,
/// g(q) = h(E[J] + q - mu) + (h + p) E[(D - J - q)^+].
double myopic_objective(const ArrivalOutlook& outlook, const DemandModel& demand, const CostParams& cost, double q);

/// Immutable decision rule. Copies share the demand model.
class Policy {
 public:
  static Policy base_stock(double S);
  /// Rejects r >= mu.
  static Policy constant(double r, double mu);
  static Policy pil(double U, const DemandModel& demand, const ProjectionBackend& backend);
  static Policy pil(double U, const DemandModel& demand) { return pil(U, demand, default_backend(demand)); }
  static Policy myopic(const CostParams& cost, const DemandModel& demand, const ProjectionBackend& backend);
  static Policy myopic(const CostParams& cost, const DemandModel& demand) {
    return myopic(cost, demand, default_backend(demand));
  }
  static Policy capped(double S, double r);

  double decide(const PipelineState& state) const;

  PolicyFamily family() const { return family_; }
  /// S, r or U; S for capped base-stock.
  double level() const { return a_; }
  /// The cap r of a capped base-stock policy.
  double cap() const { return b_; }
  /// Cheap policies do not project.
  bool needs_projection() const { return family_ == PolicyFamily::PIL || family_ == PolicyFamily::Myopic; }
  const ProjectionBackend& backend() const { return backend_; }
  std::string describe() const;

 private:
  PolicyFamily family_ = PolicyFamily::BaseStock;
  double a_ = 0.0;
  double b_ = 0.0;
  CostParams cost_{};
  std::shared_ptr<const DemandModel> demand_;
  ProjectionBackend backend_{};
};

/// `bs:S=..`, `cop:r=..`, `pil:U=..`, `myopic`, `cbs:S=..,r=..`.
Policy parse_policy(const std::string& text, const DemandModel& demand, const CostParams& cost,
                    const ProjectionBackend& backend);

}  // namespace pilinv
