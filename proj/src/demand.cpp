#include "pilinv/demand.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "pilinv/errors.hpp"
#include "pilinv/spec_string.hpp"

namespace pilinv {

namespace {

constexpr double kTailCut = 1e-12;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void require_positive_mean(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw ParameterError("demand mean must be positive, got " + fmt(mean));
}

// Cuts a pmf where the remaining upper tail drops below kTailCut.
std::vector<double> cut_tail(std::vector<double> pmf, double total_mass, double* dropped) {
  double cum = 0.0;
  std::size_t keep = pmf.size();
  for (std::size_t n = 0; n < pmf.size(); ++n) {
    cum += pmf[n];
    if (total_mass - cum < kTailCut) {
      keep = n + 1;
      break;
    }
  }
  double kept = std::accumulate(pmf.begin(), pmf.begin() + static_cast<long>(keep), 0.0);
  pmf.resize(keep);
  *dropped = std::max(0.0, total_mass - kept);
  return pmf;
}

}  // namespace

std::string to_string(DemandKind kind) {
  switch (kind) {
    case DemandKind::Poisson: return "poisson";
    case DemandKind::Geometric: return "geometric";
    case DemandKind::Exponential: return "exponential";
    case DemandKind::MixedErlang: return "mixed_erlang";
    case DemandKind::Deterministic: return "deterministic";
    case DemandKind::Lattice: return "lattice";
  }
  return "unknown";
}

void poisson_head(double m, int n, std::vector<double>& out, double* upper) {
  out.assign(static_cast<std::size_t>(std::max(n, 0)) + 1, 0.0);
  if (m <= 0.0) {
    out[0] = 1.0;
    if (upper) *upper = 0.0;
    return;
  }
  if (m < 600.0) {
    double p = std::exp(-m);
    out[0] = p;
    for (int k = 1; k <= n; ++k) {
      p *= m / k;
      out[static_cast<std::size_t>(k)] = p;
    }
  } else {
    int k0 = std::min(n, static_cast<int>(std::floor(m)));
    double p0 = std::exp(k0 * std::log(m) - m - std::lgamma(k0 + 1.0));
    out[static_cast<std::size_t>(k0)] = p0;
    double p = p0;
    for (int k = k0; k > 0; --k) {
      p *= k / m;
      out[static_cast<std::size_t>(k - 1)] = p;
      if (p == 0.0) break;
    }
    p = p0;
    for (int k = k0 + 1; k <= n; ++k) {
      p *= m / k;
      out[static_cast<std::size_t>(k)] = p;
    }
  }
  if (upper) {
    double s = 0.0;
    for (double v : out) s += v;
    *upper = std::max(0.0, 1.0 - s);
  }
}

double LatticeTable::pmf_at(long n) const {
  if (n < 0 || n >= static_cast<long>(pmf.size())) return 0.0;
  return pmf[static_cast<std::size_t>(n)];
}

double LatticeTable::survival_at(long n) const {
  if (n < 0) return 1.0;
  if (n >= static_cast<long>(survival.size())) return 0.0;
  return survival[static_cast<std::size_t>(n)];
}

double LatticeTable::shortfall_at(long n) const {
  if (n < 0) return mean - static_cast<double>(n);
  if (n >= static_cast<long>(shortfall.size())) return 0.0;
  return shortfall[static_cast<std::size_t>(n)];
}

void DemandModel::build_table(std::vector<double> pmf) {
  double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  if (!(total > 0.0)) throw ParameterError("lattice pmf has no mass");
  for (double& v : pmf) v /= total;
  LatticeTable t;
  t.pmf = std::move(pmf);
  std::size_t n = t.pmf.size();
  t.cdf.resize(n);
  t.survival.resize(n);
  t.shortfall.resize(n);
  double c = 0.0;
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    c += t.pmf[k];
    t.cdf[k] = std::min(1.0, c);
    m += static_cast<double>(k) * t.pmf[k];
  }
  t.cdf[n - 1] = 1.0;
  // survival from the top keeps small tails accurate
  double s = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    t.survival[k] = s;
    s += t.pmf[k];
  }
  t.mean = m;
  // E[(D-k)^+] = sum_{j>=k} P(D > j)
  double acc = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    acc += t.survival[k];
    t.shortfall[k] = acc;
  }
  table_ = std::move(t);
}

DemandModel DemandModel::poisson(double mean) {
  require_positive_mean(mean);
  DemandModel d;
  d.kind_ = DemandKind::Poisson;
  d.mean_ = mean;
  d.variance_ = mean;
  d.param_ = mean;
  d.integer_valued_ = true;
  int n = static_cast<int>(std::ceil(mean + 40.0 * std::sqrt(mean) + 60.0));
  std::vector<double> head;
  poisson_head(mean, n, head);
  double dropped = 0.0;
  head = cut_tail(std::move(head), 1.0, &dropped);
  d.build_table(std::move(head));
  d.table_.tail_mass = dropped;
  d.label_ = "poisson:mean=" + fmt(mean);
  return d;
}

DemandModel DemandModel::geometric(double mean) {
  require_positive_mean(mean);
  DemandModel d;
  d.kind_ = DemandKind::Geometric;
  double beta = mean / (1.0 + mean);
  d.mean_ = mean;
  d.variance_ = beta / ((1.0 - beta) * (1.0 - beta));
  d.param_ = beta;
  d.integer_valued_ = true;
  // P(D > n) = beta^(n+1)
  std::size_t n = static_cast<std::size_t>(std::ceil(std::log(kTailCut) / std::log(beta)));
  std::vector<double> pmf(n);
  double p = 1.0 - beta;
  for (std::size_t k = 0; k < n; ++k) {
    pmf[k] = p;
    p *= beta;
  }
  double dropped = std::pow(beta, static_cast<double>(n));
  d.build_table(std::move(pmf));
  d.table_.tail_mass = dropped;
  d.label_ = "geometric:mean=" + fmt(mean);
  return d;
}

DemandModel DemandModel::exponential(double mean) {
  require_positive_mean(mean);
  DemandModel d;
  d.kind_ = DemandKind::Exponential;
  d.mean_ = mean;
  d.variance_ = mean * mean;
  d.param_ = 1.0 / mean;
  d.theta_ = {0.0, 1.0};
  d.theta_cdf_ = {0.0, 1.0};
  d.label_ = "exp:mean=" + fmt(mean);
  return d;
}

DemandModel DemandModel::mixed_erlang(double rate, std::vector<double> theta) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ParameterError("phase rate must be positive");
  while (!theta.empty() && theta.back() == 0.0) theta.pop_back();
  if (theta.empty()) throw ParameterError("phase-count pmf is empty");
  double total = 0.0;
  for (double v : theta) {
    if (!(v >= 0.0)) throw ParameterError("phase-count pmf has a negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ParameterError("phase-count pmf sums to " + fmt(total));
  for (double& v : theta) v /= total;
  double ek = 0.0, ek2 = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    ek += static_cast<double>(k) * theta[k];
    ek2 += static_cast<double>(k * k) * theta[k];
  }
  if (!(ek > 0.0)) throw ParameterError("phase-count pmf has zero mean");
  DemandModel d;
  d.kind_ = DemandKind::MixedErlang;
  d.param_ = rate;
  d.mean_ = ek / rate;
  double vark = std::max(0.0, ek2 - ek * ek);
  d.variance_ = (ek + vark) / (rate * rate);
  d.theta_cdf_.resize(theta.size());
  double c = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    c += theta[k];
    d.theta_cdf_[k] = c;
  }
  d.theta_cdf_.back() = 1.0;
  d.theta_ = std::move(theta);
  d.label_ = "me:rate=" + fmt(rate) + ",kmax=" + std::to_string(d.theta_.size() - 1);
  return d;
}

DemandModel DemandModel::deterministic(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw ParameterError("deterministic demand must be nonnegative");
  DemandModel d;
  d.kind_ = DemandKind::Deterministic;
  d.mean_ = value;
  d.variance_ = 0.0;
  d.param_ = value;
  d.integer_valued_ = std::floor(value) == value;
  if (d.integer_valued_) {
    std::vector<double> pmf(static_cast<std::size_t>(value) + 1, 0.0);
    pmf.back() = 1.0;
    d.build_table(std::move(pmf));
  }
  d.label_ = "det:value=" + fmt(value);
  return d;
}

DemandModel DemandModel::lattice(std::vector<double> pmf, std::string label) {
  double total = 0.0;
  for (double v : pmf) {
    if (!(v >= 0.0)) throw ParameterError("lattice pmf has a negative entry");
    total += v;
  }
  if (total > 1.0 + 1e-9) throw ParameterError("lattice pmf sums to " + fmt(total));
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  DemandModel d;
  d.kind_ = DemandKind::Lattice;
  d.integer_valued_ = true;
  d.build_table(std::move(pmf));
  d.table_.tail_mass = std::max(0.0, 1.0 - total);
  d.mean_ = d.table_.mean;
  double m2 = 0.0;
  for (std::size_t k = 0; k < d.table_.size(); ++k) m2 += static_cast<double>(k * k) * d.table_.pmf[k];
  d.variance_ = std::max(0.0, m2 - d.mean_ * d.mean_);
  d.label_ = std::move(label);
  if (!(d.mean_ > 0.0)) throw ParameterError("lattice demand must have positive mean");
  return d;
}

double DemandModel::cv() const { return std::sqrt(variance_) / mean_; }

double DemandModel::phase_rate() const {
  if (!phase_type()) throw ConfigurationError("phase rate requested for non phase-type demand " + describe());
  return param_;
}

const std::vector<double>& DemandModel::phase_pmf() const {
  if (!phase_type()) throw ConfigurationError("phase pmf requested for non phase-type demand " + describe());
  return theta_;
}

double DemandModel::mean_phases() const { return mean_ * phase_rate(); }

const LatticeTable& DemandModel::table() const {
  if (!integer_valued_) throw ConfigurationError("lattice table requested for continuous demand " + describe());
  return table_;
}

double DemandModel::pmf(long n) const {
  if (!integer_valued_) throw ConfigurationError("pmf requested for continuous demand " + describe());
  return table_.pmf_at(n);
}

double DemandModel::cdf(double x) const {
  if (integer_valued_) {
    if (x < 0.0) return 0.0;
    double f = std::floor(x);
    if (f >= static_cast<double>(table_.size())) return 1.0;
    return table_.cdf[static_cast<std::size_t>(f)];
  }
  if (kind_ == DemandKind::Deterministic) return x >= param_ ? 1.0 : 0.0;
  if (x < 0.0) return 0.0;
  if (kind_ == DemandKind::Exponential) return 1.0 - std::exp(-x * param_);
  int kmax = max_phases();
  std::vector<double> head;
  poisson_head(param_ * x, kmax, head);
  double c = theta_[0];
  double below = 0.0;  // P(Pois < k)
  for (int k = 1; k <= kmax; ++k) {
    below += head[static_cast<std::size_t>(k - 1)];
    c += theta_[static_cast<std::size_t>(k)] * std::max(0.0, 1.0 - below);
  }
  return std::min(1.0, c);
}

double DemandModel::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw ContractViolation("quantile level must lie in (0,1)");
  if (integer_valued_) {
    auto it = std::lower_bound(table_.cdf.begin(), table_.cdf.end(), u);
    if (it == table_.cdf.end()) return static_cast<double>(table_.size() - 1);
    return static_cast<double>(it - table_.cdf.begin());
  }
  if (kind_ == DemandKind::Deterministic) return param_;
  if (kind_ == DemandKind::Exponential) return -std::log1p(-u) / param_;
  if (cdf(0.0) >= u) return 0.0;
  double lo = 0.0, hi = mean_;
  while (cdf(hi) < u) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= u) hi = mid; else lo = mid;
  }
  return hi;
}

double DemandModel::expected_shortfall(double x) const {
  if (x <= 0.0) return mean_ - x;
  if (integer_valued_) {
    double f = std::floor(x);
    long n = static_cast<long>(f);
    return std::max(0.0, table_.shortfall_at(n) - (x - f) * table_.survival_at(n));
  }
  if (kind_ == DemandKind::Deterministic) return std::max(0.0, param_ - x);
  if (kind_ == DemandKind::Exponential) return std::exp(-x * param_) / param_;
  int kmax = max_phases();
  std::vector<double> head;
  poisson_head(param_ * x, kmax, head);
  double s = 0.0;
  double cum_prev = head[0];  // P(Pois <= k-1)
  for (int k = 1; k <= kmax; ++k) {
    double cum = std::min(1.0, cum_prev + head[static_cast<std::size_t>(k)]);
    double th = theta_[static_cast<std::size_t>(k)];
    if (th > 0.0) s += th * (k / param_ * cum - x * cum_prev);
    cum_prev = cum;
  }
  return std::max(0.0, s);
}

double DemandModel::expected_excess(double x) const { return x - mean_ + expected_shortfall(x); }

double DemandModel::sample(Rng& rng) const {
  switch (kind_) {
    case DemandKind::Exponential:
      return -std::log(rng.uniform()) / param_;
    case DemandKind::MixedErlang: {
      double u = rng.uniform();
      auto k = static_cast<int>(std::lower_bound(theta_cdf_.begin(), theta_cdf_.end(), u) - theta_cdf_.begin());
      if (k >= static_cast<int>(theta_cdf_.size())) k = static_cast<int>(theta_cdf_.size()) - 1;
      double logsum = 0.0;
      double prod = 1.0;
      for (int i = 0; i < k; ++i) {
        prod *= rng.uniform();
        if (prod < 1e-280) {
          logsum += std::log(prod);
          prod = 1.0;
        }
      }
      return -(logsum + std::log(prod)) / param_;
    }
    case DemandKind::Deterministic:
      if (!integer_valued_) return param_;
      [[fallthrough]];
    default: {
      double u = rng.uniform();
      auto it = std::lower_bound(table_.cdf.begin(), table_.cdf.end(), u);
      if (it == table_.cdf.end()) --it;
      return static_cast<double>(it - table_.cdf.begin());
    }
  }
}

std::string DemandModel::describe() const { return label_; }

DemandModel fit_mixed_erlang(const MomentTarget& target) {
  require_positive_mean(target.mean);
  if (!(target.cv > 0.0) || !std::isfinite(target.cv)) throw ParameterError("cv must be positive");
  double c2 = target.cv * target.cv;
  std::vector<double> theta;
  double ek = 0.0;
  if (c2 <= 1.0) {
    int k = static_cast<int>(std::ceil(1.0 / c2 - 1e-12));
    k = std::max(k, 1);
    double arg = std::max(0.0, k * (1.0 + c2) - static_cast<double>(k) * k * c2);
    double q = (k * c2 - std::sqrt(arg)) / (1.0 + c2);
    q = std::clamp(q, 0.0, 1.0);
    theta.assign(static_cast<std::size_t>(k) + 1, 0.0);
    theta[static_cast<std::size_t>(k - 1)] += q;
    theta[static_cast<std::size_t>(k)] += 1.0 - q;
    ek = k - q;
  } else {
    const double c = 1.0 + c2;
    int chosen = -1;
    double weight = 0.0;
    for (int k = 2; k < 1'000'000; ++k) {
      double a = k - 1.0;
      double b = k * (k + 1.0) - 2.0;
      double qa = c * a * a, qb = 2.0 * c * a - b, qc = c - 2.0;
      double disc = qb * qb - 4.0 * qa * qc;
      if (disc < 0.0) continue;
      double sq = std::sqrt(disc);
      // stable pair of roots
      double t = -0.5 * (qb + std::copysign(sq, qb));
      double r1 = t / qa;
      double r2 = t != 0.0 ? qc / t : r1;
      double lo = std::min(r1, r2), hi = std::max(r1, r2);
      double root = lo >= 0.0 ? lo : hi;
      if (root >= 0.0 && root <= 1.0) {
        chosen = k;
        weight = root;
        break;
      }
    }
    if (chosen < 0) throw ParameterError("no two-point phase fit for cv " + fmt(target.cv));
    theta.assign(static_cast<std::size_t>(chosen) + 1, 0.0);
    theta[1] = 1.0 - weight;
    theta[static_cast<std::size_t>(chosen)] += weight;
    ek = 1.0 + weight * (chosen - 1.0);
  }
  double rate = ek / target.mean;
  DemandModel d = DemandModel::mixed_erlang(rate, std::move(theta));
  d.label_ = "me:mean=" + fmt(target.mean) + ",cv=" + fmt(target.cv);
  return d;
}

namespace {

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b, std::size_t cap) {
  std::size_t n = a.size() + b.size() - 1;
  if (n > cap) {
    throw TruncationError("convolution support " + std::to_string(n) + " exceeds cap " + std::to_string(cap), 0.0);
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

DemandModel convolve_lead_time(const DemandModel& model, int periods, std::size_t support_cap) {
  if (periods < 1) throw ContractViolation("convolution needs at least one period");
  if (periods == 1) return model;
  const double n = periods;
  switch (model.kind()) {
    case DemandKind::Poisson:
      return DemandModel::poisson(model.mean() * n);
    case DemandKind::Deterministic:
      return DemandModel::deterministic(model.parameter() * n);
    case DemandKind::Exponential: {
      std::vector<double> theta(static_cast<std::size_t>(periods) + 1, 0.0);
      theta.back() = 1.0;
      return DemandModel::mixed_erlang(model.phase_rate(), std::move(theta));
    }
    case DemandKind::MixedErlang: {
      std::vector<double> acc = {1.0};
      const auto& theta = model.phase_pmf();
      for (int i = 0; i < periods; ++i) acc = convolve(acc, theta, support_cap);
      return DemandModel::mixed_erlang(model.phase_rate(), std::move(acc));
    }
    case DemandKind::Geometric: {
      // negative binomial: C(k+n-1,k) (1-beta)^n beta^k
      double beta = model.parameter();
      std::vector<double> pmf;
      double p = std::pow(1.0 - beta, n);
      double cum = 0.0;
      for (std::size_t k = 0;; ++k) {
        if (k >= support_cap) throw TruncationError("negative binomial support exceeds cap", 1.0 - cum);
        pmf.push_back(p);
        cum += p;
        if (1.0 - cum < kTailCut && static_cast<double>(k) > n * model.mean()) break;
        p *= beta * (static_cast<double>(k) + n) / (static_cast<double>(k) + 1.0);
      }
      DemandModel d = DemandModel::lattice(std::move(pmf), "negbin:n=" + std::to_string(periods) + ",beta=" + fmt(beta));
      return d;
    }
    case DemandKind::Lattice: {
      std::vector<double> acc = {1.0};
      for (int i = 0; i < periods; ++i) acc = convolve(acc, model.table().pmf, support_cap);
      double dropped = 0.0;
      acc = cut_tail(std::move(acc), 1.0, &dropped);
      return DemandModel::lattice(std::move(acc), model.describe() + "*" + std::to_string(periods));
    }
  }
  throw ConfigurationError("unsupported demand kind for convolution");
}

DemandModel parse_demand(const std::string& spec) {
  KeyValueSpec kv = parse_key_values(spec);
  if (kv.name == "poisson") return DemandModel::poisson(kv.number("mean"));
  if (kv.name == "geometric" || kv.name == "geom") return DemandModel::geometric(kv.number("mean"));
  if (kv.name == "exp" || kv.name == "exponential") return DemandModel::exponential(kv.number("mean"));
  if (kv.name == "me") return fit_mixed_erlang({kv.number("mean"), kv.number("cv")});
  if (kv.name == "det" || kv.name == "deterministic") return DemandModel::deterministic(kv.number("value"));
  throw ParameterError("unknown demand kind '" + kv.name + "'");
}

}  // namespace pilinv
