#include "pilinv/projection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pilinv/errors.hpp"
#include "pilinv/rng.hpp"
#include "pilinv/spec_string.hpp"

namespace pilinv {

namespace {

constexpr double kPhiSnap = 1e-12;
constexpr double kPoissonCut = 1e-15;
constexpr double kMaxDropped = 1e-8;

struct Comp {
  double phi = 0.0;
  long base = 0;
  std::vector<double> w;
};

// Splits s into integer part and a fraction in [0,1), snapping near-integers.
long split_offset(double s, double& frac) {
  double f = std::floor(s);
  frac = s - f;
  if (frac > 1.0 - kPhiSnap) {
    frac = 0.0;
    f += 1.0;
  } else if (frac < kPhiSnap) {
    frac = 0.0;
  }
  return static_cast<long>(f);
}

void merge_components(std::vector<Comp>& comps) {
  if (comps.size() < 2) return;
  std::sort(comps.begin(), comps.end(), [](const Comp& a, const Comp& b) { return a.phi < b.phi; });
  std::vector<Comp> out;
  out.reserve(comps.size());
  for (auto& c : comps) {
    if (!out.empty() && std::abs(out.back().phi - c.phi) < kPhiSnap) {
      Comp& m = out.back();
      long lo = std::min(m.base, c.base);
      long hi = std::max(m.base + static_cast<long>(m.w.size()), c.base + static_cast<long>(c.w.size()));
      std::vector<double> w(static_cast<std::size_t>(hi - lo), 0.0);
      for (std::size_t i = 0; i < m.w.size(); ++i) w[static_cast<std::size_t>(m.base - lo) + i] += m.w[i];
      for (std::size_t i = 0; i < c.w.size(); ++i) w[static_cast<std::size_t>(c.base - lo) + i] += c.w[i];
      m.base = lo;
      m.w = std::move(w);
    } else {
      out.push_back(std::move(c));
    }
  }
  comps = std::move(out);
}

// Propagates the on-hand distribution through the lead time. Leaves the
// distribution of J_{t+tau-1} in comps.
void lattice_run(const PipelineState& state, const DemandModel& demand, std::vector<double>& lost,
                 std::vector<Comp>& comps) {
  const LatticeTable& t = demand.table();
  const int tau = state.lead_time();
  const long P = static_cast<long>(t.size());
  lost.assign(static_cast<std::size_t>(tau), 0.0);
  comps.clear();
  {
    Comp c;
    c.base = split_offset(state.on_hand, c.phi);
    c.w = {1.0};
    comps.push_back(std::move(c));
  }
  std::vector<Comp> next;
  for (int j = 0; j < tau; ++j) {
    double el = 0.0;
    double zero = 0.0;
    next.clear();
    for (const Comp& c : comps) {
      const long N = static_cast<long>(c.w.size());
      const long lo = std::max(0L, c.base - (P - 1));
      const long top = c.base + N - 1;
      Comp nc;
      nc.phi = c.phi;
      nc.base = lo;
      nc.w.assign(static_cast<std::size_t>(top - lo + 1), 0.0);
      for (long i = 0; i < N; ++i) {
        const double wi = c.w[static_cast<std::size_t>(i)];
        if (wi == 0.0) continue;
        const long n = c.base + i;
        const double tn = t.survival_at(n);
        el += wi * (t.shortfall_at(n) - c.phi * tn);
        zero += wi * tn;
        const long dmax = std::min(n, P - 1);
        double* dst = nc.w.data() + (n - lo);
        const double* p = t.pmf.data();
        for (long d = 0; d <= dmax; ++d) dst[-d] += wi * p[d];
      }
      next.push_back(std::move(nc));
    }
    if (zero > 0.0) {
      Comp z;
      z.phi = 0.0;
      z.base = 0;
      z.w = {zero};
      next.push_back(std::move(z));
    }
    lost[static_cast<std::size_t>(j)] = std::max(0.0, el);
    if (j < tau - 1) {
      const double q = state.outstanding[static_cast<std::size_t>(j)];
      for (Comp& c : next) {
        double frac = 0.0;
        long carry = split_offset(c.phi + q, frac);
        c.phi = frac;
        c.base += carry;
      }
    }
    merge_components(next);
    std::swap(comps, next);
  }
}

double balance_level(const PipelineState& state, double mean, double total_lost) {
  double v = state.position() - state.lead_time() * mean + total_lost;
  return v > 0.0 ? v : 0.0;
}

// E[(K - i)^+] for i = 0..kmax.
std::vector<double> phase_shortfall(const std::vector<double>& theta) {
  const int kmax = static_cast<int>(theta.size()) - 1;
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
  for (int i = 0; i <= kmax; ++i) {
    double s = 0.0;
    for (int k = i + 1; k <= kmax; ++k) s += (k - i) * theta[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

// Poisson pmf of mean m on {0..limit-1}, cut early once the upper tail is
// negligible. Returns the mass removed by the early cut.
double poisson_cut(double m, long limit, std::vector<double>& out) {
  if (limit <= 0) {
    out.clear();
    return 1.0;
  }
  poisson_head(m, static_cast<int>(limit - 1), out);
  double cum = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    cum += out[i];
    if (static_cast<double>(i) > m && 1.0 - cum < kPoissonCut) {
      out.resize(i + 1);
      return std::max(0.0, 1.0 - cum);
    }
  }
  return 0.0;
}

// Customer-count recursion. extra = 1 keeps the final distribution exact
// below kmax so one more period can be evaluated.
void me_run(const PipelineState& state, const DemandModel& demand, int extra, std::vector<double>& lost,
            std::vector<double>& final_pmf, const std::vector<double>& ktail) {
  const double lambda = demand.phase_rate();
  const auto& theta = demand.phase_pmf();
  const long kmax = static_cast<long>(theta.size()) - 1;
  const int tau = state.lead_time();
  lost.assign(static_cast<std::size_t>(tau), 0.0);

  long cap = (tau + extra) * kmax;
  std::vector<double> cur;
  double dropped = 0.0;
  {
    std::vector<double> head;
    poisson_head(lambda * state.on_hand, static_cast<int>(std::max(cap - 1, 0L)), head);
    cur.assign(static_cast<std::size_t>(cap) + 1, 0.0);
    double s = 0.0;
    for (long i = 0; i < cap; ++i) {
      cur[static_cast<std::size_t>(i)] = head[static_cast<std::size_t>(i)];
      s += head[static_cast<std::size_t>(i)];
    }
    cur[static_cast<std::size_t>(cap)] = std::max(0.0, 1.0 - s);
  }
  std::vector<double> nxt, qpmf;
  for (int j = 0; j < tau; ++j) {
    double el = 0.0;
    for (long i = 0; i < std::min(kmax, cap); ++i) el += cur[static_cast<std::size_t>(i)] * ktail[static_cast<std::size_t>(i)];
    lost[static_cast<std::size_t>(j)] = el / lambda;
    if (j == tau - 1 && extra == 0) break;
    const long ncap = cap - kmax;
    nxt.assign(static_cast<std::size_t>(ncap) + 1, 0.0);
    for (long i = 0; i < cap; ++i) {
      const double pi = cur[static_cast<std::size_t>(i)];
      if (pi == 0.0) continue;
      for (long k = 0; k <= kmax; ++k) {
        const double th = theta[static_cast<std::size_t>(k)];
        if (th == 0.0) continue;
        long m = i - k;
        if (m < 0) m = 0;
        if (m >= ncap) m = ncap;
        nxt[static_cast<std::size_t>(m)] += pi * th;
      }
    }
    nxt[static_cast<std::size_t>(ncap)] += cur[static_cast<std::size_t>(cap)];
    cap = ncap;
    if (j < tau - 1) {
      const double q = state.outstanding[static_cast<std::size_t>(j)];
      if (q > 0.0) {
        dropped += poisson_cut(lambda * q, cap, qpmf);
        cur.assign(static_cast<std::size_t>(cap) + 1, 0.0);
        const long qn = static_cast<long>(qpmf.size());
        double below = 0.0;
        for (long a = 0; a < cap; ++a) {
          const double pa = nxt[static_cast<std::size_t>(a)];
          if (pa == 0.0) continue;
          const long lim = std::min(qn, cap - a);
          for (long b = 0; b < lim; ++b) cur[static_cast<std::size_t>(a + b)] += pa * qpmf[static_cast<std::size_t>(b)];
        }
        for (long m = 0; m < cap; ++m) below += cur[static_cast<std::size_t>(m)];
        cur[static_cast<std::size_t>(cap)] = std::max(0.0, 1.0 - below);
      } else {
        std::swap(cur, nxt);
      }
    } else {
      std::swap(cur, nxt);
    }
  }
  if (dropped > kMaxDropped) throw TruncationError("customer-count recursion dropped too much mass", dropped);
  final_pmf = cur;
}

}  // namespace

ProjectionBackend ProjectionBackend::parse(const std::string& text) {
  KeyValueSpec kv = parse_key_values(text);
  if (kv.name == "lattice") return lattice();
  if (kv.name == "me") return me_customer();
  if (kv.name == "mc") {
    double paths = kv.number_or("paths", 100000);
    if (!(paths >= 1.0)) throw ParameterError("mc backend needs at least one path");
    return monte_carlo(static_cast<std::size_t>(paths), static_cast<std::uint64_t>(kv.number_or("seed", 20240601)));
  }
  throw ParameterError("unknown projection backend '" + kv.name + "'");
}

std::string ProjectionBackend::describe() const {
  switch (kind) {
    case BackendKind::Lattice: return "lattice";
    case BackendKind::MECustomer: return "me";
    case BackendKind::MonteCarlo: return "mc:paths=" + std::to_string(paths) + ",seed=" + std::to_string(seed);
  }
  return "?";
}

ProjectionBackend default_backend(const DemandModel& demand) {
  if (demand.integer_valued()) return ProjectionBackend::lattice();
  if (demand.phase_type()) return ProjectionBackend::me_customer();
  return ProjectionBackend::monte_carlo();
}

void check_compatible(const ProjectionBackend& backend, const DemandModel& demand) {
  if (backend.kind == BackendKind::Lattice && !demand.integer_valued())
    throw ConfigurationError("lattice projection needs integer-valued demand, got " + demand.describe());
  if (backend.kind == BackendKind::MECustomer && !demand.phase_type())
    throw ConfigurationError("customer-count projection needs Mixed-Erlang demand, got " + demand.describe());
  if (backend.kind == BackendKind::MonteCarlo && backend.paths == 0)
    throw ConfigurationError("Monte Carlo projection needs a positive path count");
}

ProjectionResult lattice_recursion(const PipelineState& state, const DemandModel& demand) {
  state.validate();
  if (!demand.integer_valued()) throw ConfigurationError("lattice projection needs integer-valued demand");
  thread_local std::vector<Comp> comps;
  ProjectionResult r;
  lattice_run(state, demand, r.lost, comps);
  for (double v : r.lost) r.total_lost += v;
  r.expected_level = balance_level(state, demand.table().mean, r.total_lost);
  return r;
}

ProjectionResult me_customer_recursion(const PipelineState& state, const DemandModel& demand) {
  state.validate();
  if (!demand.phase_type()) throw ConfigurationError("customer-count projection needs Mixed-Erlang demand");
  thread_local std::vector<double> final_pmf;
  ProjectionResult r;
  me_run(state, demand, 0, r.lost, final_pmf, phase_shortfall(demand.phase_pmf()));
  for (double v : r.lost) r.total_lost += v;
  r.expected_level = balance_level(state, demand.mean(), r.total_lost);
  return r;
}

ProjectionResult monte_carlo_projection(const PipelineState& state, const DemandModel& demand, std::size_t paths,
                                        std::uint64_t seed) {
  state.validate();
  if (paths == 0) throw ConfigurationError("Monte Carlo projection needs a positive path count");
  const int tau = state.lead_time();
  ProjectionResult r;
  r.lost.assign(static_cast<std::size_t>(tau), 0.0);
  const std::uint64_t key = StreamKey{seed, 0x70726f6aULL, 0}.hash();
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t path = 0; path < paths; ++path) {
    Rng rng = period_rng(key, path);
    double inv = state.on_hand;
    double tot = 0.0;
    for (int j = 0; j < tau; ++j) {
      double d = demand.sample(rng);
      double left = inv - d;
      double l = left < 0.0 ? -left : 0.0;
      r.lost[static_cast<std::size_t>(j)] += l;
      tot += l;
      inv = left > 0.0 ? left : 0.0;
      if (j < tau - 1) inv += state.outstanding[static_cast<std::size_t>(j)];
    }
    s1 += tot;
    s2 += tot * tot;
  }
  const double n = static_cast<double>(paths);
  for (double& v : r.lost) v /= n;
  r.total_lost = s1 / n;
  double var = paths > 1 ? std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0)) : 0.0;
  r.std_error = std::sqrt(var / n);
  r.expected_level = balance_level(state, demand.mean(), r.total_lost);
  return r;
}

ProjectionResult project(const PipelineState& state, const DemandModel& demand, const ProjectionBackend& backend) {
  check_compatible(backend, demand);
  switch (backend.kind) {
    case BackendKind::Lattice: return lattice_recursion(state, demand);
    case BackendKind::MECustomer: return me_customer_recursion(state, demand);
    case BackendKind::MonteCarlo: return monte_carlo_projection(state, demand, backend.paths, backend.seed);
  }
  throw ConfigurationError("unknown backend");
}

double project_expected_level(const PipelineState& state, const DemandModel& demand, const ProjectionBackend& backend) {
  return project(state, demand, backend).expected_level;
}

ArrivalOutlook arrival_outlook(const PipelineState& state, const DemandModel& demand, const ProjectionBackend& backend) {
  check_compatible(backend, demand);
  state.validate();
  ArrivalOutlook o;
  o.kind_ = backend.kind;
  o.demand_ = &demand;
  std::vector<double> lost;
  switch (backend.kind) {
    case BackendKind::Lattice: {
      std::vector<Comp> comps;
      lattice_run(state, demand, lost, comps);
      double tot = 0.0;
      for (double v : lost) tot += v;
      o.expected_level_ = balance_level(state, demand.table().mean, tot);
      for (auto& c : comps) o.comps_.push_back({c.phi, c.base, std::move(c.w)});
      break;
    }
    case BackendKind::MECustomer: {
      o.k_shortfall_ = phase_shortfall(demand.phase_pmf());
      me_run(state, demand, 1, lost, o.customers_, o.k_shortfall_);
      double tot = 0.0;
      for (double v : lost) tot += v;
      o.expected_level_ = balance_level(state, demand.mean(), tot);
      break;
    }
    case BackendKind::MonteCarlo: {
      const int tau = state.lead_time();
      const std::uint64_t key = StreamKey{backend.seed, 0x6f75746cULL, 0}.hash();
      o.samples_.resize(backend.paths);
      o.next_demand_.resize(backend.paths);
      double tot = 0.0;
      for (std::size_t path = 0; path < backend.paths; ++path) {
        Rng rng = period_rng(key, path);
        double inv = state.on_hand;
        for (int j = 0; j < tau; ++j) {
          double left = inv - demand.sample(rng);
          inv = left > 0.0 ? left : 0.0;
          if (j < tau - 1) inv += state.outstanding[static_cast<std::size_t>(j)];
        }
        o.samples_[path] = inv;
        o.next_demand_[path] = demand.sample(rng);
        tot += inv;
      }
      o.expected_level_ = tot / static_cast<double>(backend.paths);
      break;
    }
  }
  return o;
}

double ArrivalOutlook::expected_shortfall(double q) const {
  switch (kind_) {
    case BackendKind::Lattice: {
      const LatticeTable& t = demand_->table();
      double s = 0.0;
      for (const auto& c : comps_) {
        double f = 0.0;
        long carry = split_offset(c.phi + q, f);
        for (std::size_t i = 0; i < c.w.size(); ++i) {
          if (c.w[i] == 0.0) continue;
          long n = c.base + static_cast<long>(i) + carry;
          s += c.w[i] * (t.shortfall_at(n) - f * t.survival_at(n));
        }
      }
      return std::max(0.0, s);
    }
    case BackendKind::MECustomer: {
      const double lambda = demand_->phase_rate();
      const long kmax = static_cast<long>(k_shortfall_.size()) - 1;
      std::vector<double> qpmf;
      poisson_head(lambda * q, static_cast<int>(std::max(kmax - 1, 0L)), qpmf);
      double s = 0.0;
      for (long m = 0; m < kmax; ++m) {
        double pm = 0.0;
        for (long a = 0; a <= m && a < static_cast<long>(customers_.size()) - 1; ++a)
          pm += customers_[static_cast<std::size_t>(a)] * qpmf[static_cast<std::size_t>(m - a)];
        s += pm * k_shortfall_[static_cast<std::size_t>(m)];
      }
      return s / lambda;
    }
    case BackendKind::MonteCarlo: {
      double s = 0.0;
      for (std::size_t i = 0; i < samples_.size(); ++i) {
        double v = next_demand_[i] - samples_[i] - q;
        if (v > 0.0) s += v;
      }
      return s / static_cast<double>(samples_.size());
    }
  }
  return 0.0;
}

double ArrivalOutlook::direct_mean() const {
  switch (kind_) {
    case BackendKind::Lattice: {
      double s = 0.0;
      for (const auto& c : comps_)
        for (std::size_t i = 0; i < c.w.size(); ++i) s += c.w[i] * (static_cast<double>(c.base + static_cast<long>(i)) + c.phi);
      return s;
    }
    case BackendKind::MonteCarlo: {
      double s = 0.0;
      for (double v : samples_) s += v;
      return s / static_cast<double>(samples_.size());
    }
    case BackendKind::MECustomer:
      return expected_level_;
  }
  return expected_level_;
}

ThroughputSample measure_throughput(const DemandModel& demand, int tau, const ProjectionBackend& backend,
                                    std::size_t count, std::uint64_t seed, double on_hand_scale) {
  check_compatible(backend, demand);
  if (!(on_hand_scale > 0.0)) on_hand_scale = 2.0 * demand.mean();
  if (tau < 1) throw ParameterError("lead time must be at least 1");
  Rng rng(StreamKey{seed, 0x74687275ULL, 0}.hash());
  std::vector<PipelineState> states(std::min<std::size_t>(count, 1024), PipelineState::zero(tau));
  for (auto& s : states) {
    s.on_hand = on_hand_scale * rng.uniform();
    for (double& q : s.outstanding) q = 2.0 * demand.mean() * rng.uniform();
  }
  volatile double sink = 0.0;
  auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < count; ++i) sink = sink + project_expected_level(states[i % states.size()], demand, backend);
  auto stop = std::chrono::steady_clock::now();
  ThroughputSample out;
  out.projections = count;
  out.seconds = std::chrono::duration<double>(stop - start).count();
  out.projections_per_minute = out.seconds > 0.0 ? 60.0 * static_cast<double>(count) / out.seconds : 0.0;
  return out;
}

}  // namespace pilinv
