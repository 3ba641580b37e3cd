#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pilinv/demand.hpp"
#include "pilinv/policy.hpp"
#include "pilinv/projection.hpp"
#include "pilinv/simulation.hpp"
#include "pilinv/system.hpp"

namespace pilinv {

struct SearchSpec {
  double lo = 0.0;
  double hi = 0.0;
  double tol = 1e-2;
  int max_evaluations = 80;
};

struct ScalarOptimum {
  double param = 0.0;
  double search_cost = 0.0;  // objective value at param on the search stream
  int evaluations = 0;
  bool edge_hit = false;     // best point landed on a bracket edge at least once
  bool widened = false;
  bool flagged = false;      // still on an edge after widening
  SearchSpec bracket;        // final bracket
};

/// Golden-section search with one widen-and-retry when the best point sits on
/// the upper edge (or on a lower edge above zero).
ScalarOptimum optimize_scalar(const SearchSpec& spec, const std::function<double(double)>& objective,
                              double hard_upper = INFINITY);

struct CappedOptimum {
  double S = 0.0;
  double r = 0.0;
  double search_cost = 0.0;
  int evaluations = 0;
  bool flat_region = false;
};

/// Multi-start Nelder-Mead over (S, r) on the corners of [S0 - w, S0 + w] x [r_lo, r_hi].
CappedOptimum optimize_capped(const std::function<double(double, double)>& objective, double S0, double w,
                              double r_lo, double r_hi, double tol = 1e-3, int max_evaluations = 150);

/// min_x E[(p/h)(D - x)^+ + (x - D)^+], attained at the p/(p+h) quantile.
double alpha_D(const DemandModel& demand, const CostParams& cost);

struct GuaranteedGrid {
  double epsilon = 0.0;
  double alpha = 0.0;
  long n_arith = 0;  // n_eps
  long n_geom = 0;   // n'_eps
  std::vector<double> points;  // sorted, duplicates removed
  double cardinality_bound = 0.0;
  bool within_bound() const { return static_cast<double>(points.size()) <= cardinality_bound; }
};

GuaranteedGrid build_grid(double epsilon, const DemandModel& demand, const CostParams& cost);

struct GridOptimum {
  double param = 0.0;
  double search_cost = 0.0;
  std::size_t evaluations = 0;
};

GridOptimum grid_search(const GuaranteedGrid& grid, const std::function<double(double)>& objective);

/// Simulation budgets for the search phase (fixed stream, no extension) and
/// the final evaluation (fresh stream, CI target).
struct OptimizeConfig {
  SimConfig search;
  SimConfig final;
  ProjectionBackend backend;
  bool backend_set = false;

  static OptimizeConfig defaults(std::uint64_t seed);
};

struct PolicyOptimum {
  PolicyFamily family = PolicyFamily::PIL;
  double param = 0.0;
  double param2 = 0.0;  // cap r for capped base-stock
  CostEstimate estimate;
  double search_cost = 0.0;
  int evaluations = 0;
  bool flagged = false;
  std::string note;
  std::string describe() const;
};

/// Objective used during a search: the simulated cost rate on a fixed stream.
std::function<double(double)> simulation_objective(PolicyFamily family, const DemandModel& demand, int tau,
                                                   const CostParams& cost, const SimConfig& cfg,
                                                   const ProjectionBackend& backend);

/// Default brackets: bs [0, S_B + 2 sigma + mu], cop [0, mu(1 - 1e-6)], pil [0, (1 + p/h) mu].
SearchSpec default_bracket(PolicyFamily family, const DemandModel& demand, int tau, const CostParams& cost);

/// Optimizes one family (bs, cop, pil, cbs) or evaluates myopic, then
/// re-estimates the winner on a fresh stream.
PolicyOptimum optimize_policy(PolicyFamily family, const DemandModel& demand, int tau, const CostParams& cost,
                              const OptimizeConfig& cfg, const SearchSpec* bracket = nullptr);

}  // namespace pilinv
