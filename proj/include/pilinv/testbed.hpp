#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pilinv/demand.hpp"
#include "pilinv/mdp.hpp"
#include "pilinv/optimize.hpp"
#include "pilinv/policy.hpp"
#include "pilinv/projection.hpp"
#include "pilinv/system.hpp"

namespace pilinv {

struct Instance {
  std::string testbed;
  std::string demand_spec;  // e.g. poisson:mean=5
  double cv = 0.0;
  int tau = 1;
  CostParams cost;

  DemandModel demand() const { return parse_demand(demand_spec); }
};

std::vector<Instance> zipkin_instances();
/// ME mean 100 over cv x tau x p; defaults {0.4,...,1.4} x {1..6} x {1,4,9,19,49,99}.
std::vector<Instance> large_instances(const std::vector<double>& cvs = {}, const std::vector<int>& taus = {},
                                      const std::vector<double>& ps = {});
/// ME mean 100 over cv {0.5,1.5} x tau {1..20} x p {4,9,19} unless overridden.
std::vector<Instance> leadtime_instances(const std::vector<double>& cvs = {}, const std::vector<int>& taus = {},
                                         const std::vector<double>& ps = {});

/// "optimal" stands for the exact MDP row.
std::vector<std::string> default_policies(const std::string& testbed);

struct TestbedOptions {
  std::uint64_t seed = 1;
  std::string out_dir = "results";
  std::optional<ProjectionBackend> backend;
  double ci_target = 0.01;
  bool extended = false;        // exact rows up to tau 4 instead of 2
  int exact_max_tau = 2;
  std::vector<double> cvs;      // empty = testbed default
  std::vector<int> taus;
  std::vector<double> ps;
  std::vector<std::string> policies;  // empty = testbed default
  std::optional<SimConfig> search;    // search-phase budget override
  std::optional<SimConfig> final;     // final-evaluation budget override
  MDPConfig mdp;
  bool write_files = true;

  OptimizeConfig optimize_config() const;
};

struct ResultRow {
  Instance instance;
  std::string policy;
  double param1 = NAN;
  double param2 = NAN;
  double cost = NAN;
  double ci_halfwidth = NAN;
  double std_error = NAN;
  double lost_rate = NAN;
  long periods = 0;
  int replications = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  bool flagged = false;
  std::string status = "ok";
  std::string note;
};

std::vector<std::string> result_header();
std::vector<std::string> result_fields(const ResultRow& row);

/// Optimizes and evaluates one policy on one instance. Failures are captured
/// in the row status.
ResultRow run_policy(const Instance& inst, const std::string& policy, const TestbedOptions& opts);

struct GapRow {
  std::string factor;  // cv, tau, p or total
  std::string level;
  std::string policy;
  double min_gap = 0.0;  // percent above PIL
  double max_gap = 0.0;
  double avg_gap = 0.0;
  int count = 0;
};

/// Percentage gaps of every non-PIL policy relative to PIL, grouped by factor.
std::vector<GapRow> gap_summary(const std::vector<ResultRow>& rows);

struct TestbedReport {
  std::string name;
  std::vector<ResultRow> rows;
  std::vector<GapRow> gaps;
  std::vector<std::string> files;
};

TestbedReport run_testbed(const std::string& name, const TestbedOptions& opts);

/// Writes leadtime_cv{cv}_p{p}.csv files (tau, CBS, CPIL, COP) into `dir`.
std::vector<std::string> write_leadtime_files(const std::vector<ResultRow>& rows, const std::string& dir);

struct ThroughputRow {
  double cv = 0.0;
  int tau = 1;
  double p = 0.0;
  int max_phases = 0;
  double projections_per_minute = 0.0;
};

struct ThroughputReport {
  std::vector<ThroughputRow> rows;
  double min = 0.0;
  double max = 0.0;
  double avg = 0.0;
};

/// ME projections per minute across the large-testbed grid. States are drawn
/// around the lead-time demand for each (cv, tau, p) cell.
ThroughputReport throughput_probe(const std::vector<double>& cvs, const std::vector<int>& taus,
                                  const std::vector<double>& ps, std::size_t count, std::uint64_t seed);

}  // namespace pilinv
