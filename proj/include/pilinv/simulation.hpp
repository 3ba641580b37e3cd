#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pilinv/demand.hpp"
#include "pilinv/policy.hpp"
#include "pilinv/system.hpp"

namespace pilinv {

struct SimConfig {
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;  // policies sharing seed and stream see the same demand
  int replications = 30;
  long periods = 20000;       // counted periods per replication before any extension
  long warmup = 2000;         // raised to tau when smaller
  double ci_target = 0.01;    // relative 95% half-width; <= 0 disables extension
  long max_periods = 1'000'000;  // per replication
  double confidence = 0.95;
};

/// Per-replication averages over the counted periods.
struct ReplicationStats {
  double cost = 0.0;
  double lost = 0.0;
  double end_inventory = 0.0;    // J_t
  double start_inventory = 0.0;  // I_t
  double demand = 0.0;
  double order = 0.0;
  long periods = 0;
};

struct CostEstimate {
  double mean = 0.0;
  double ci_halfwidth = 0.0;
  double std_error = 0.0;
  double lost_rate = 0.0;
  double lost_std_error = 0.0;
  double mean_inventory = 0.0;
  double mean_start_inventory = 0.0;
  double mean_demand = 0.0;
  double mean_order = 0.0;
  long periods = 0;  // counted periods per replication
  int replications = 0;
  std::uint64_t seed = 0;
  bool target_missed = false;
  std::vector<ReplicationStats> reps;
};

struct PairedEstimate {
  CostEstimate a;
  CostEstimate b;
  double diff_mean = 0.0;  // C(a) - C(b)
  double diff_ci_halfwidth = 0.0;
  double diff_std_error = 0.0;
  double sq_gap_mean = 0.0;  // time average of (order_a - order_b)^2 over orders arriving in the window
  double sq_gap_std_error = 0.0;
  std::vector<double> diff_reps;
  std::vector<double> sq_gap_reps;
};

struct MeanCI {
  double mean = 0.0;
  double std_error = 0.0;
  double halfwidth = 0.0;
};

/// Student-t interval over independent replication values.
MeanCI mean_ci(const std::vector<double>& values, double confidence = 0.95);

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = PILINV_THREADS, else hardware).
/// Callers store results by index so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

CostEstimate estimate_cost(const Policy& policy, const DemandModel& demand, int tau, const CostParams& cost,
                           const SimConfig& cfg);

PairedEstimate estimate_difference_crn(const Policy& a, const Policy& b, const DemandModel& demand, int tau,
                                       const CostParams& cost, const SimConfig& cfg);

/// One simulated trajectory from x_0 = 0 with per-period records; used by
/// pathwise checks.
struct Trajectory {
  std::vector<double> demand;
  std::vector<double> orders;
  std::vector<double> lost;
  std::vector<double> end_inventory;
  std::vector<double> start_inventory;
  std::vector<double> cost;
};

Trajectory simulate_path(const Policy& policy, const DemandModel& demand, int tau, const CostParams& cost,
                         std::uint64_t seed, std::uint64_t stream, std::uint64_t replication, long periods);

/// Demand drawn for (seed, stream, replication, period); the common random number contract.
double demand_draw(const DemandModel& demand, std::uint64_t seed, std::uint64_t stream, std::uint64_t replication,
                   long period);

}  // namespace pilinv
