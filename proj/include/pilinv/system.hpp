#pragma once

#include <vector>

namespace pilinv {

struct CostParams {
  double h = 1.0;  // holding cost per item per period
  double p = 1.0;  // penalty per lost sale

  void validate() const;
};

/// x_t = (I_t, q_{t+1}, ..., q_{t+tau-1}).
struct PipelineState {
  double on_hand = 0.0;
  std::vector<double> outstanding;

  PipelineState() = default;
  PipelineState(double on_hand_, std::vector<double> outstanding_)
      : on_hand(on_hand_), outstanding(std::move(outstanding_)) {}

  /// Empty system for lead time tau.
  static PipelineState zero(int tau);

  int lead_time() const { return static_cast<int>(outstanding.size()) + 1; }
  double pipeline_total() const;
  double position() const { return on_hand + pipeline_total(); }
  void validate() const;
};

struct PeriodCost {
  double end_inventory = 0.0;  // J_t
  double lost = 0.0;           // L_t
  double cost = 0.0;           // h J_t + p L_t
};

struct PeriodOutcome : PeriodCost {
  PipelineState next_state;
};

/// One period: the order placed now joins the back of the pipeline, demand
/// is served from on-hand, then the oldest outstanding order arrives.
PeriodOutcome step(const PipelineState& state, double order, double demand, const CostParams& cost);

/// In-place version of step without argument checks; used by the simulator.
PeriodCost advance(PipelineState& state, double order, double demand, const CostParams& cost) noexcept;

/// L[0,T-1] = max_k (D[0,k] - I_0 - q[1,k])^+, where arrivals q[1,k] come
/// first from the initial pipeline and then from orders[j - tau].
double cumulative_lost(const PipelineState& initial, const std::vector<double>& demands,
                       const std::vector<double>& orders);

/// The same quantity accumulated period by period with step().
double cumulative_lost_by_steps(const PipelineState& initial, const std::vector<double>& demands,
                                const std::vector<double>& orders);

}  // namespace pilinv
