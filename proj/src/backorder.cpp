#include "pilinv/backorder.hpp"

#include <algorithm>
#include <cmath>

#include "pilinv/errors.hpp"
#include "pilinv/policy.hpp"
#include "pilinv/rng.hpp"

namespace pilinv {

namespace {

// Net-inventory pipeline of the back-order system.
struct BackorderSystem {
  double net = 0.0;
  std::vector<double> pipe;

  explicit BackorderSystem(int tau) : pipe(static_cast<std::size_t>(tau - 1), 0.0) {}

  double position() const {
    double s = net;
    for (double q : pipe) s += q;
    return s;
  }

  // Returns (J, B) for this period after placing `order`.
  std::pair<double, double> advance(double order, double d) {
    const double left = net - d;
    const double j = left > 0.0 ? left : 0.0;
    const double b = left < 0.0 ? -left : 0.0;
    if (pipe.empty()) {
      net = left + order;
    } else {
      net = left + pipe.front();
      std::move(pipe.begin() + 1, pipe.end(), pipe.begin());
      pipe.back() = order;
    }
    return {j, b};
  }
};

}  // namespace

BackorderSolution solve_backorder(const DemandModel& demand, int tau, const CostParams& cost) {
  if (tau < 1) throw ParameterError("lead time must be at least 1");
  cost.validate();
  DemandModel x = convolve_lead_time(demand, tau + 1);
  const double ratio = cost.p / (cost.p + cost.h);
  double S = x.quantile(ratio);
  double C = cost.h * x.expected_excess(S) + cost.p * x.expected_shortfall(S);
  return BackorderSolution{S, C, std::move(x)};
}

double backorder_equivalent_level(const BackorderSolution& sol, const DemandModel& demand, int tau) {
  return std::max(0.0, sol.S_star - tau * demand.mean());
}

BackorderEstimate simulate_backorder_base_stock(double S, const DemandModel& demand, int tau, const CostParams& cost,
                                                const SimConfig& cfg) {
  if (tau < 1) throw ParameterError("lead time must be at least 1");
  cost.validate();
  const long warmup = std::max<long>(cfg.warmup, tau);
  const std::size_t R = static_cast<std::size_t>(cfg.replications);
  std::vector<double> rc(R), rb(R), rn(R);
  parallel_for(R, [&](std::size_t i) {
    const std::uint64_t key = StreamKey{cfg.seed, cfg.stream, i}.hash();
    BackorderSystem sys(tau);
    double sc = 0.0, sb = 0.0, sn = 0.0;
    for (long t = 0; t < warmup + cfg.periods; ++t) {
      double order = std::max(0.0, S - sys.position());
      Rng rng = period_rng(key, static_cast<std::uint64_t>(t));
      const double d = demand.sample(rng);
      const double start = sys.net;
      auto [j, b] = sys.advance(order, d);
      if (t >= warmup) {
        sc += cost.h * j + cost.p * b;
        sb += b;
        sn += start;
      }
    }
    const double n = static_cast<double>(cfg.periods);
    rc[i] = sc / n;
    rb[i] = sb / n;
    rn[i] = sn / n;
  });
  BackorderEstimate e;
  MeanCI c = mean_ci(rc, cfg.confidence);
  MeanCI b = mean_ci(rb, cfg.confidence);
  MeanCI n = mean_ci(rn, cfg.confidence);
  e.cost = c.mean;
  e.ci_halfwidth = c.halfwidth;
  e.std_error = c.std_error;
  e.backorder_rate = b.mean;
  e.mean_net_inventory = n.mean;
  e.net_inventory_ci = n.halfwidth;
  e.periods = cfg.periods;
  e.replications = cfg.replications;
  return e;
}

CoupledComparison coupled_lost_vs_backorder(double U, const DemandModel& demand, int tau, const CostParams& cost,
                                            const ProjectionBackend& backend, std::uint64_t seed, int window,
                                            long paths) {
  if (tau < 1) throw ParameterError("lead time must be at least 1");
  if (window < 1 || paths < 2) throw ParameterError("coupled comparison needs a window and at least two paths");
  cost.validate();
  Policy pil = Policy::pil(U, demand, backend);
  const double S = U + tau * demand.mean();
  const std::size_t W = static_cast<std::size_t>(window);
  struct Sums {
    std::vector<double> l, b, cl, cb;
  };
  auto fresh = [&] {
    return Sums{std::vector<double>(W), std::vector<double>(W), std::vector<double>(W), std::vector<double>(W)};
  };
  std::vector<Sums> per_path(static_cast<std::size_t>(paths), Sums{});
  std::vector<int> same(static_cast<std::size_t>(paths), 1);
  parallel_for(static_cast<std::size_t>(paths), [&](std::size_t p) {
    Sums s = fresh();
    const std::uint64_t key = StreamKey{seed, 0x636f75706c65ULL, p}.hash();
    PipelineState x = PipelineState::zero(tau);
    BackorderSystem bsys(tau);
    for (long t = 0; t < tau + window; ++t) {
      const double ql = pil.decide(x);
      const double qb = std::max(0.0, S - bsys.position());
      Rng rl = period_rng(key, static_cast<std::uint64_t>(t));
      Rng rb = period_rng(key, static_cast<std::uint64_t>(t));
      const double dl = demand.sample(rl);
      const double db = demand.sample(rb);
      if (dl != db) same[p] = 0;
      PeriodCost pc = advance(x, ql, dl, cost);
      auto [jb, bb] = bsys.advance(qb, db);
      if (t >= tau) {
        const std::size_t k = static_cast<std::size_t>(t - tau);
        const double cbk = cost.h * jb + cost.p * bb;
        s.l[k] = pc.lost;
        s.b[k] = bb;
        s.cl[k] = pc.cost;
        s.cb[k] = cbk;
      }
    }
    per_path[p] = std::move(s);
  });
  CoupledComparison out;
  out.first_period = tau;
  out.paths = paths;
  out.identical_demand = std::all_of(same.begin(), same.end(), [](int v) { return v == 1; });
  for (auto* v : {&out.lost, &out.backorders, &out.cost_lost, &out.cost_back, &out.diff, &out.diff_std_error,
                  &out.cost_diff, &out.cost_diff_std_error})
    v->assign(W, 0.0);
  const double n = static_cast<double>(paths);
  for (std::size_t k = 0; k < W; ++k) {
    double sd = 0.0, sd2 = 0.0, scd = 0.0, scd2 = 0.0;
    for (const auto& s : per_path) {
      out.lost[k] += s.l[k];
      out.backorders[k] += s.b[k];
      out.cost_lost[k] += s.cl[k];
      out.cost_back[k] += s.cb[k];
      const double d = s.b[k] - s.l[k];
      const double cd = s.cb[k] - s.cl[k];
      sd += d;
      sd2 += d * d;
      scd += cd;
      scd2 += cd * cd;
    }
    out.lost[k] /= n;
    out.backorders[k] /= n;
    out.cost_lost[k] /= n;
    out.cost_back[k] /= n;
    out.diff[k] = sd / n;
    out.cost_diff[k] = scd / n;
    out.diff_std_error[k] = std::sqrt(std::max(0.0, (sd2 - sd * sd / n) / (n - 1.0)) / n);
    out.cost_diff_std_error[k] = std::sqrt(std::max(0.0, (scd2 - scd * scd / n) / (n - 1.0)) / n);
  }
  return out;
}

}  // namespace pilinv
