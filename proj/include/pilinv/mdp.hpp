#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pilinv/demand.hpp"
#include "pilinv/system.hpp"

namespace pilinv {

struct MDPConfig {
  int cap = 0;                  // bound on inventory position; 0 = ceil(6 mu (tau+1))
  double demand_tail = 1e-9;    // demand truncated where the tail drops below this, then renormalized
  double tolerance = 1e-8;      // span of the Bellman difference
  int max_iterations = 100000;
  double damping = 1.0;         // V' = (1-a) V + a (T V - offset)
  bool audit = true;            // stationary mass of cap-constrained decisions
  std::size_t max_states = 60'000'000;
};

struct MDPResult {
  double gain = 0.0;
  int iterations = 0;
  double span = 0.0;
  bool converged = false;
  int cap = 0;
  int lead_time = 1;
  std::size_t states = 0;
  double boundary_mass = 0.0;   // stationary probability that the cap restricted the action
  double truncated_mass = 0.0;  // demand tail dropped before renormalizing
  std::vector<double> span_history;
  std::vector<int> actions;     // indexed by encoded state; -1 for states beyond the cap

  /// Action of the stored policy in an integer state.
  int action(const PipelineState& state) const;
  /// Encoded index of an integer state; -1 when outside the lattice.
  long index(const PipelineState& state) const;
  /// All valid states and their actions as CSV (I, q1, ..., action).
  std::string policy_csv() const;
};

/// Relative value iteration for the average-cost lost-sales MDP with integer
/// states and orders.
MDPResult solve_average_cost(const DemandModel& demand, int tau, const CostParams& cost, const MDPConfig& cfg = {});

/// Average cost of a fixed integer policy on the same lattice.
MDPResult evaluate_policy_exact(const std::function<int(const PipelineState&)>& policy, const DemandModel& demand,
                                int tau, const CostParams& cost, const MDPConfig& cfg = {});

}  // namespace pilinv
