#include "pilinv/system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pilinv/errors.hpp"

namespace pilinv {

void CostParams::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("holding cost h must be positive");
  if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("penalty cost p must be positive");
}

PipelineState PipelineState::zero(int tau) {
  if (tau < 1) throw ParameterError("lead time must be at least 1");
  return PipelineState(0.0, std::vector<double>(static_cast<std::size_t>(tau - 1), 0.0));
}

double PipelineState::pipeline_total() const { return std::accumulate(outstanding.begin(), outstanding.end(), 0.0); }

void PipelineState::validate() const {
  if (!(on_hand >= 0.0)) throw ContractViolation("on-hand inventory must be nonnegative");
  for (double q : outstanding)
    if (!(q >= 0.0)) throw ContractViolation("outstanding orders must be nonnegative");
}

PeriodCost advance(PipelineState& state, double order, double demand, const CostParams& cost) noexcept {
  PeriodCost out;
  double left = state.on_hand - demand;
  out.end_inventory = left > 0.0 ? left : 0.0;
  out.lost = left < 0.0 ? -left : 0.0;
  out.cost = cost.h * out.end_inventory + cost.p * out.lost;
  auto& q = state.outstanding;
  if (q.empty()) {
    state.on_hand = out.end_inventory + order;
  } else {
    state.on_hand = out.end_inventory + q.front();
    std::move(q.begin() + 1, q.end(), q.begin());
    q.back() = order;
  }
  return out;
}

PeriodOutcome step(const PipelineState& state, double order, double demand, const CostParams& cost) {
  state.validate();
  if (!(order >= 0.0)) throw ContractViolation("order must be nonnegative");
  if (!(demand >= 0.0)) throw ContractViolation("demand must be nonnegative");
  PeriodOutcome out;
  out.next_state = state;
  static_cast<PeriodCost&>(out) = advance(out.next_state, order, demand, cost);
  return out;
}

double cumulative_lost(const PipelineState& initial, const std::vector<double>& demands,
                       const std::vector<double>& orders) {
  if (demands.size() != orders.size()) throw ContractViolation("demand and order sequences differ in length");
  initial.validate();
  const int tau = initial.lead_time();
  double dcum = 0.0;
  double qcum = 0.0;
  double best = 0.0;
  for (std::size_t k = 0; k < demands.size(); ++k) {
    if (k >= 1) {
      // arrival at the start of period k
      std::size_t j = k;
      if (j <= static_cast<std::size_t>(tau - 1)) qcum += initial.outstanding[j - 1];
      else qcum += orders[j - static_cast<std::size_t>(tau)];
    }
    dcum += demands[k];
    best = std::max(best, dcum - initial.on_hand - qcum);
  }
  return best;
}

double cumulative_lost_by_steps(const PipelineState& initial, const std::vector<double>& demands,
                                const std::vector<double>& orders) {
  if (demands.size() != orders.size()) throw ContractViolation("demand and order sequences differ in length");
  PipelineState x = initial;
  CostParams unit{1.0, 1.0};
  double total = 0.0;
  for (std::size_t k = 0; k < demands.size(); ++k) {
    PeriodOutcome o = step(x, orders[k], demands[k], unit);
    total += o.lost;
    x = std::move(o.next_state);
  }
  return total;
}

}  // namespace pilinv
