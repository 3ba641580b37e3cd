#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pilinv/rng.hpp"

namespace pilinv {

enum class DemandKind { Poisson, Geometric, Exponential, MixedErlang, Deterministic, Lattice };

std::string to_string(DemandKind kind);

struct MomentTarget {
  double mean = 0.0;
  double cv = 0.0;
};

/// Tables for an integer-valued demand, truncated where the upper tail drops
/// below 1e-12 and renormalized.
struct LatticeTable {
  std::vector<double> pmf;        // P(D = n)
  std::vector<double> cdf;        // P(D <= n)
  std::vector<double> survival;   // P(D > n)
  std::vector<double> shortfall;  // E[(D - n)^+]
  double mean = 0.0;              // mean of the truncated, renormalized table
  double tail_mass = 0.0;         // mass dropped before renormalizing

  std::size_t size() const { return pmf.size(); }
  double pmf_at(long n) const;
  double survival_at(long n) const;
  double shortfall_at(long n) const;
};

/// One-period demand distribution. Immutable after construction.
class DemandModel {
 public:
  static DemandModel poisson(double mean);
  static DemandModel geometric(double mean);
  static DemandModel exponential(double mean);
  /// Sum of K exponential phases with common rate; theta[k] = P(K = k).
  static DemandModel mixed_erlang(double rate, std::vector<double> theta);
  static DemandModel deterministic(double value);
  /// Arbitrary pmf on {0, 1, ...}; used for convolutions without a named family.
  static DemandModel lattice(std::vector<double> pmf, std::string label = "lattice");

  DemandKind kind() const { return kind_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double cv() const;
  bool integer_valued() const { return integer_valued_; }
  /// True for exponential and Mixed-Erlang demand.
  bool phase_type() const { return kind_ == DemandKind::Exponential || kind_ == DemandKind::MixedErlang; }

  /// Kind-specific parameter: Poisson mean, geometric beta, exponential rate,
  /// ME phase rate, deterministic value.
  double parameter() const { return param_; }
  double phase_rate() const;
  const std::vector<double>& phase_pmf() const;
  int max_phases() const { return static_cast<int>(theta_.size()) - 1; }
  double mean_phases() const;

  const LatticeTable& table() const;
  double tail_mass() const { return integer_valued_ ? table_.tail_mass : 0.0; }

  double pmf(long n) const;
  double cdf(double x) const;
  /// Smallest x with cdf(x) >= u.
  double quantile(double u) const;
  /// E[(D - x)^+]
  double expected_shortfall(double x) const;
  /// E[(x - D)^+]
  double expected_excess(double x) const;

  double sample(Rng& rng) const;

  std::string describe() const;

 private:
  friend DemandModel fit_mixed_erlang(const MomentTarget& target);
  DemandModel() = default;
  void build_table(std::vector<double> pmf);

  DemandKind kind_ = DemandKind::Deterministic;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double param_ = 0.0;
  bool integer_valued_ = false;
  std::vector<double> theta_;
  std::vector<double> theta_cdf_;
  LatticeTable table_;
  std::string label_;
};

/// Two-moment Mixed-Erlang fit. cv^2 <= 1 uses an Erlang(k-1,k) mixture,
/// cv^2 > 1 a two-point phase count on {1, k}.
DemandModel fit_mixed_erlang(const MomentTarget& target);

/// Distribution of the sum of `periods` i.i.d. copies of `model`.
DemandModel convolve_lead_time(const DemandModel& model, int periods, std::size_t support_cap = 5'000'000);

/// Parses `poisson:mean=5`, `geometric:mean=5`, `me:mean=100,cv=0.5`,
/// `exp:mean=100`, `det:value=5`.
DemandModel parse_demand(const std::string& spec);

/// Poisson pmf on {0..n} with mean m; returns the mass above n in `upper`.
void poisson_head(double m, int n, std::vector<double>& out, double* upper = nullptr);

}  // namespace pilinv
