#include "pilinv/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "pilinv/errors.hpp"
#include "pilinv/rng.hpp"

namespace pilinv {

namespace {

struct Accum {
  double cost = 0.0, lost = 0.0, end_inv = 0.0, start_inv = 0.0, demand = 0.0, order = 0.0;
};

// Runs one replication of one or two policies on a shared demand stream.
class ReplicationRunner {
 public:
  ReplicationRunner(std::vector<const Policy*> policies, const DemandModel& demand, int tau, const CostParams& cost,
                    std::uint64_t key, long warmup)
      : policies_(std::move(policies)), demand_(demand), cost_(cost), key_(key), warmup_(warmup), tau_(tau),
        states_(policies_.size(), PipelineState::zero(tau)), acc_(policies_.size()),
        gaps_(static_cast<std::size_t>(tau), 0.0) {}

  void run_until(long t_end) {
    const std::size_t n = policies_.size();
    double orders[2] = {0.0, 0.0};
    for (; t_ < t_end; ++t_) {
      for (std::size_t i = 0; i < n; ++i) orders[i] = policies_[i]->decide(states_[i]);
      Rng rng = period_rng(key_, static_cast<std::uint64_t>(t_));
      const double d = demand_.sample(rng);
      const bool counted = t_ >= warmup_;
      for (std::size_t i = 0; i < n; ++i) {
        const double start = states_[i].on_hand;
        PeriodCost pc = advance(states_[i], orders[i], d, cost_);
        if (counted) {
          Accum& a = acc_[i];
          a.cost += pc.cost;
          a.lost += pc.lost;
          a.end_inv += pc.end_inventory;
          a.start_inv += start;
          a.demand += d;
          a.order += orders[i];
        }
      }
      if (n == 2) {
        // the order placed tau periods ago arrives in this period
        const std::size_t slot = static_cast<std::size_t>(t_ % tau_);
        if (counted) sq_gap_ += gaps_[slot];
        const double g = orders[0] - orders[1];
        gaps_[slot] = g * g;
      }
    }
  }

  long counted() const { return std::max(0L, t_ - warmup_); }

  ReplicationStats stats(std::size_t i) const {
    ReplicationStats s;
    const double n = static_cast<double>(counted());
    const Accum& a = acc_[i];
    s.periods = counted();
    if (n > 0) {
      s.cost = a.cost / n;
      s.lost = a.lost / n;
      s.end_inventory = a.end_inv / n;
      s.start_inventory = a.start_inv / n;
      s.demand = a.demand / n;
      s.order = a.order / n;
    }
    return s;
  }

  double sq_gap() const { return counted() > 0 ? sq_gap_ / static_cast<double>(counted()) : 0.0; }

 private:
  std::vector<const Policy*> policies_;
  const DemandModel& demand_;
  CostParams cost_;
  std::uint64_t key_;
  long warmup_;
  long tau_;
  long t_ = 0;
  std::vector<PipelineState> states_;
  std::vector<Accum> acc_;
  std::vector<double> gaps_;
  double sq_gap_ = 0.0;
};

void validate(const DemandModel& demand, int tau, const CostParams& cost, const SimConfig& cfg) {
  (void)demand;
  if (tau < 1) throw ParameterError("lead time must be at least 1");
  cost.validate();
  if (cfg.replications < 2) throw ParameterError("at least two replications are needed for a confidence interval");
  if (cfg.periods < 1) throw ParameterError("periods must be positive");
  if (cfg.warmup < 0) throw ParameterError("warm-up must be nonnegative");
}

CostEstimate summarize(const std::vector<ReplicationStats>& reps, const SimConfig& cfg) {
  CostEstimate e;
  std::vector<double> cost, lost;
  for (const auto& r : reps) {
    cost.push_back(r.cost);
    lost.push_back(r.lost);
    e.mean_inventory += r.end_inventory;
    e.mean_start_inventory += r.start_inventory;
    e.mean_demand += r.demand;
    e.mean_order += r.order;
  }
  const double n = static_cast<double>(reps.size());
  e.mean_inventory /= n;
  e.mean_start_inventory /= n;
  e.mean_demand /= n;
  e.mean_order /= n;
  MeanCI c = mean_ci(cost, cfg.confidence);
  MeanCI l = mean_ci(lost, cfg.confidence);
  e.mean = c.mean;
  e.std_error = c.std_error;
  e.ci_halfwidth = c.halfwidth;
  e.lost_rate = l.mean;
  e.lost_std_error = l.std_error;
  e.periods = reps.empty() ? 0 : reps.front().periods;
  e.replications = static_cast<int>(reps.size());
  e.seed = cfg.seed;
  e.reps = reps;
  return e;
}

bool target_met(const CostEstimate& e, double target) {
  if (!(target > 0.0)) return true;
  return e.ci_halfwidth <= target * std::abs(e.mean);
}

}  // namespace

MeanCI mean_ci(const std::vector<double>& values, double confidence) {
  MeanCI out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  double s = 0.0;
  for (double v : values) s += v;
  out.mean = s / static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  double var = ss / static_cast<double>(n - 1);
  out.std_error = std::sqrt(var / static_cast<double>(n));
  boost::math::students_t dist(static_cast<double>(n - 1));
  double tq = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
  out.halfwidth = tq * out.std_error;
  return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads) {
  if (threads == 0) {
    const char* env = std::getenv("PILINV_THREADS");
    const int n_env = env ? std::atoi(env) : 0;
    threads = n_env > 0 ? static_cast<unsigned>(n_env) : std::max(1u, std::thread::hardware_concurrency());
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double demand_draw(const DemandModel& demand, std::uint64_t seed, std::uint64_t stream, std::uint64_t replication,
                   long period) {
  Rng rng = period_rng(StreamKey{seed, stream, replication}, static_cast<std::uint64_t>(period));
  return demand.sample(rng);
}

CostEstimate estimate_cost(const Policy& policy, const DemandModel& demand, int tau, const CostParams& cost,
                           const SimConfig& cfg) {
  validate(demand, tau, cost, cfg);
  const long warmup = std::max<long>(cfg.warmup, tau);
  const std::size_t R = static_cast<std::size_t>(cfg.replications);
  std::vector<ReplicationRunner> runners;
  runners.reserve(R);
  for (std::size_t i = 0; i < R; ++i)
    runners.emplace_back(std::vector<const Policy*>{&policy}, demand, tau, cost,
                         StreamKey{cfg.seed, cfg.stream, i}.hash(), warmup);
  long periods = cfg.periods;
  CostEstimate e;
  for (;;) {
    parallel_for(R, [&](std::size_t i) { runners[i].run_until(warmup + periods); });
    std::vector<ReplicationStats> reps(R);
    for (std::size_t i = 0; i < R; ++i) reps[i] = runners[i].stats(0);
    e = summarize(reps, cfg);
    if (target_met(e, cfg.ci_target)) break;
    if (periods >= cfg.max_periods) {
      e.target_missed = true;
      break;
    }
    periods = std::min(periods * 2, std::max(cfg.max_periods, cfg.periods));
  }
  return e;
}

PairedEstimate estimate_difference_crn(const Policy& a, const Policy& b, const DemandModel& demand, int tau,
                                       const CostParams& cost, const SimConfig& cfg) {
  validate(demand, tau, cost, cfg);
  const long warmup = std::max<long>(cfg.warmup, tau);
  const std::size_t R = static_cast<std::size_t>(cfg.replications);
  std::vector<ReplicationRunner> runners;
  runners.reserve(R);
  for (std::size_t i = 0; i < R; ++i)
    runners.emplace_back(std::vector<const Policy*>{&a, &b}, demand, tau, cost, StreamKey{cfg.seed, cfg.stream, i}.hash(),
                         warmup);
  long periods = cfg.periods;
  PairedEstimate out;
  for (;;) {
    parallel_for(R, [&](std::size_t i) { runners[i].run_until(warmup + periods); });
    std::vector<ReplicationStats> ra(R), rb(R);
    out.diff_reps.assign(R, 0.0);
    out.sq_gap_reps.assign(R, 0.0);
    for (std::size_t i = 0; i < R; ++i) {
      ra[i] = runners[i].stats(0);
      rb[i] = runners[i].stats(1);
      out.diff_reps[i] = ra[i].cost - rb[i].cost;
      out.sq_gap_reps[i] = runners[i].sq_gap();
    }
    out.a = summarize(ra, cfg);
    out.b = summarize(rb, cfg);
    MeanCI d = mean_ci(out.diff_reps, cfg.confidence);
    MeanCI g = mean_ci(out.sq_gap_reps, cfg.confidence);
    out.diff_mean = d.mean;
    out.diff_std_error = d.std_error;
    out.diff_ci_halfwidth = d.halfwidth;
    out.sq_gap_mean = g.mean;
    out.sq_gap_std_error = g.std_error;
    if (target_met(out.a, cfg.ci_target) && target_met(out.b, cfg.ci_target)) break;
    if (periods >= cfg.max_periods) {
      out.a.target_missed = out.b.target_missed = true;
      break;
    }
    periods = std::min(periods * 2, std::max(cfg.max_periods, cfg.periods));
  }
  return out;
}

Trajectory simulate_path(const Policy& policy, const DemandModel& demand, int tau, const CostParams& cost,
                         std::uint64_t seed, std::uint64_t stream, std::uint64_t replication, long periods) {
  if (tau < 1) throw ParameterError("lead time must be at least 1");
  Trajectory tr;
  PipelineState x = PipelineState::zero(tau);
  const std::uint64_t key = StreamKey{seed, stream, replication}.hash();
  for (long t = 0; t < periods; ++t) {
    const double q = policy.decide(x);
    Rng rng = period_rng(key, static_cast<std::uint64_t>(t));
    const double d = demand.sample(rng);
    tr.start_inventory.push_back(x.on_hand);
    PeriodCost pc = advance(x, q, d, cost);
    tr.demand.push_back(d);
    tr.orders.push_back(q);
    tr.lost.push_back(pc.lost);
    tr.end_inventory.push_back(pc.end_inventory);
    tr.cost.push_back(pc.cost);
  }
  return tr;
}

}  // namespace pilinv
