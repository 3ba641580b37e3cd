#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pilinv/demand.hpp"
#include "pilinv/system.hpp"

namespace pilinv {

enum class BackendKind { Lattice, MECustomer, MonteCarlo };

struct ProjectionBackend {
  BackendKind kind = BackendKind::Lattice;
  std::size_t paths = 100000;  // Monte Carlo only
  std::uint64_t seed = 20240601;

  static ProjectionBackend lattice() { return {BackendKind::Lattice, 0, 0}; }
  static ProjectionBackend me_customer() { return {BackendKind::MECustomer, 0, 0}; }
  static ProjectionBackend monte_carlo(std::size_t paths = 100000, std::uint64_t seed = 20240601) {
    return {BackendKind::MonteCarlo, paths, seed};
  }
  /// `lattice`, `me`, `mc`, `mc:paths=N,seed=S`
  static ProjectionBackend parse(const std::string& text);
  std::string describe() const;
};

/// Lattice for integer demand, ME recursion for phase-type demand, Monte Carlo otherwise.
ProjectionBackend default_backend(const DemandModel& demand);
/// Throws ConfigurationError when the backend cannot handle this demand.
void check_compatible(const ProjectionBackend& backend, const DemandModel& demand);

struct ProjectionResult {
  std::vector<double> lost;  // E[L_{t+j} | x_t], j = 0..tau-1
  double total_lost = 0.0;
  double expected_level = 0.0;  // E[J_{t+tau-1} | x_t]
  double std_error = 0.0;       // standard error of total_lost (Monte Carlo only)
};

/// E[J_{t+tau-1} | x] = I + q[t+1,t+tau-1] - tau*mu + E[L[t,t+tau-1] | x].
double project_expected_level(const PipelineState& state, const DemandModel& demand, const ProjectionBackend& backend);
ProjectionResult project(const PipelineState& state, const DemandModel& demand, const ProjectionBackend& backend);

ProjectionResult lattice_recursion(const PipelineState& state, const DemandModel& demand);
ProjectionResult me_customer_recursion(const PipelineState& state, const DemandModel& demand);
ProjectionResult monte_carlo_projection(const PipelineState& state, const DemandModel& demand, std::size_t paths,
                                        std::uint64_t seed);

/// Distribution of J_{t+tau-1}, the stock left just before an order placed
/// now arrives, in whatever form the backend produces it.
class ArrivalOutlook {
 public:
  double expected_level() const { return expected_level_; }
  /// E[(D - J_{t+tau-1} - q)^+] for the demand D of the arrival period.
  double expected_shortfall(double q) const;
  /// Direct mean of the tracked distribution (not via the balance identity).
  double direct_mean() const;

 private:
  friend ArrivalOutlook arrival_outlook(const PipelineState&, const DemandModel&, const ProjectionBackend&);
  struct Component {
    double phi = 0.0;
    long base = 0;
    std::vector<double> w;
  };
  BackendKind kind_ = BackendKind::Lattice;
  const DemandModel* demand_ = nullptr;
  double expected_level_ = 0.0;
  std::vector<Component> comps_;     // lattice
  std::vector<double> customers_;    // ME: pmf of the customer count, last entry lumped
  std::vector<double> k_shortfall_;  // ME: E[(K - i)^+]
  std::vector<double> samples_;      // MC: J samples
  std::vector<double> next_demand_;  // MC: demand draws of the arrival period
};

ArrivalOutlook arrival_outlook(const PipelineState& state, const DemandModel& demand, const ProjectionBackend& backend);

struct ThroughputSample {
  double projections_per_minute = 0.0;
  std::size_t projections = 0;
  double seconds = 0.0;
};

/// Times `count` projections on random pipelines: on-hand uniform on
/// [0, on_hand_scale] (default 2 mu), outstanding orders uniform on [0, 2 mu].
ThroughputSample measure_throughput(const DemandModel& demand, int tau, const ProjectionBackend& backend,
                                    std::size_t count, std::uint64_t seed, double on_hand_scale = 0.0);

}  // namespace pilinv
