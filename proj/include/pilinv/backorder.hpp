#pragma once

#include <cstdint>
#include <vector>

#include "pilinv/demand.hpp"
#include "pilinv/projection.hpp"
#include "pilinv/simulation.hpp"
#include "pilinv/system.hpp"

namespace pilinv {

struct BackorderSolution {
  double S_star = 0.0;
  double C_star = 0.0;
  DemandModel leadtime_demand;  // D[0, tau]
};

/// Newsvendor-optimal base-stock level and cost of the back-order twin.
BackorderSolution solve_backorder(const DemandModel& demand, int tau, const CostParams& cost);

/// Level of the PIL policy whose back-order twin is base-stock S*: (S* - tau*mu)^+.
double backorder_equivalent_level(const BackorderSolution& sol, const DemandModel& demand, int tau);

/// Long-run estimate for the back-order system under base-stock S.
struct BackorderEstimate {
  double cost = 0.0;
  double ci_halfwidth = 0.0;
  double std_error = 0.0;
  double backorder_rate = 0.0;
  double mean_net_inventory = 0.0;  // E[I^B_t], expected to equal S - tau*mu
  double net_inventory_ci = 0.0;
  long periods = 0;
  int replications = 0;
};

BackorderEstimate simulate_backorder_base_stock(double S, const DemandModel& demand, int tau, const CostParams& cost,
                                                const SimConfig& cfg);

/// Both systems run the same PIL level U on the same demand paths from x_0 = 0.
/// The back-order system uses base-stock S = U + tau*mu.
struct CoupledComparison {
  int first_period = 0;  // tau; per-period vectors start here
  std::vector<double> lost;        // E[L_t]
  std::vector<double> backorders;  // E[B_t]
  std::vector<double> cost_lost;   // E[c_t]
  std::vector<double> cost_back;   // E[c^B_t]
  std::vector<double> diff;        // E[B_t - L_t]
  std::vector<double> diff_std_error;
  std::vector<double> cost_diff;   // E[c^B_t - c_t]
  std::vector<double> cost_diff_std_error;
  long paths = 0;
  bool identical_demand = true;  // both systems consumed identical draws
};

CoupledComparison coupled_lost_vs_backorder(double U, const DemandModel& demand, int tau, const CostParams& cost,
                                            const ProjectionBackend& backend, std::uint64_t seed, int window,
                                            long paths);

}  // namespace pilinv
