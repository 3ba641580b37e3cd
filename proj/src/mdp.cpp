#include "pilinv/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pilinv/errors.hpp"

namespace pilinv {

namespace {

struct Outcome {
  long j;
  double prob;
};

struct Lattice {
  int tau = 1;
  int cap = 0;
  long C = 0;
  long stride0 = 1;  // C^(tau-1)
  std::vector<long> valid;     // encoded indices with position <= cap
  std::vector<int> on_hand;    // per valid state
  std::vector<int> room;       // cap - position
  std::vector<long> next_base; // encoded next state without the J and action terms
  std::vector<long> slot;      // encoded index -> position in valid, or -1
  std::vector<std::vector<Outcome>> j_dist;  // by on-hand
  std::vector<double> stage_cost;            // by on-hand
  double truncated = 0.0;
};

Lattice build_lattice(const DemandModel& demand, int tau, const CostParams& cost, const MDPConfig& cfg) {
  if (!demand.integer_valued()) throw ConfigurationError("exact MDP needs integer-valued demand, got " + demand.describe());
  if (tau < 1) throw ParameterError("lead time must be at least 1");
  cost.validate();
  Lattice L;
  L.tau = tau;
  L.cap = cfg.cap > 0 ? cfg.cap : static_cast<int>(std::ceil(6.0 * demand.mean() * (tau + 1)));
  L.C = L.cap + 1;
  double box = std::pow(static_cast<double>(L.C), tau);
  if (box > static_cast<double>(cfg.max_states))
    throw ResourceError("state box " + std::to_string(box) + " exceeds the configured limit; lower the cap");
  L.stride0 = 1;
  for (int k = 1; k < tau; ++k) L.stride0 *= L.C;
  const long nbox = L.stride0 * L.C;

  // demand pmf truncated at the configured tail, renormalized
  const LatticeTable& t = demand.table();
  std::vector<double> pd;
  double cum = 0.0;
  for (std::size_t d = 0; d < t.size(); ++d) {
    pd.push_back(t.pmf[d]);
    cum += t.pmf[d];
    if (1.0 - cum < cfg.demand_tail) break;
  }
  double kept = 0.0;
  for (double v : pd) kept += v;
  L.truncated = std::max(0.0, 1.0 - kept) + t.tail_mass;
  for (double& v : pd) v /= kept;
  const long dmax = static_cast<long>(pd.size()) - 1;

  L.j_dist.resize(static_cast<std::size_t>(L.C));
  L.stage_cost.resize(static_cast<std::size_t>(L.C));
  for (long I = 0; I <= L.cap; ++I) {
    std::vector<Outcome> out;
    double zero = 0.0;
    double hold = 0.0, lose = 0.0;
    for (long d = 0; d <= dmax; ++d) {
      const double p = pd[static_cast<std::size_t>(d)];
      if (d < I) out.push_back({I - d, p});
      else zero += p;
      hold += p * static_cast<double>(std::max(I - d, 0L));
      lose += p * static_cast<double>(std::max(d - I, 0L));
    }
    if (zero > 0.0) out.push_back({0, zero});
    L.j_dist[static_cast<std::size_t>(I)] = std::move(out);
    L.stage_cost[static_cast<std::size_t>(I)] = cost.h * hold + cost.p * lose;
  }

  L.slot.assign(static_cast<std::size_t>(nbox), -1);
  std::vector<int> coord(static_cast<std::size_t>(tau));
  for (long idx = 0; idx < nbox; ++idx) {
    long r = idx;
    int pos = 0;
    for (int k = tau - 1; k >= 0; --k) {
      coord[static_cast<std::size_t>(k)] = static_cast<int>(r % L.C);
      r /= L.C;
      pos += coord[static_cast<std::size_t>(k)];
    }
    if (pos > L.cap) continue;
    L.slot[static_cast<std::size_t>(idx)] = static_cast<long>(L.valid.size());
    L.valid.push_back(idx);
    L.on_hand.push_back(coord[0]);
    L.room.push_back(L.cap - pos);
    // next = (J + q1, q2, ..., q_{tau-1}, a)
    long nb = 0;
    if (tau >= 2) {
      nb = coord[1] * L.stride0;
      long s = L.stride0 / L.C;
      for (int k = 2; k < tau; ++k) {
        nb += coord[static_cast<std::size_t>(k)] * s;
        s /= L.C;
      }
    }
    L.next_base.push_back(nb);
  }
  return L;
}

// Expected next value for every feasible action of valid state v.
void action_values(const Lattice& L, const std::vector<double>& V, std::size_t v, std::vector<double>& acc) {
  const int amax = L.room[v];
  acc.assign(static_cast<std::size_t>(amax) + 1, 0.0);
  const long nb = L.next_base[v];
  for (const Outcome& o : L.j_dist[static_cast<std::size_t>(L.on_hand[v])]) {
    const double* row = V.data() + nb + o.j * L.stride0;
    for (int a = 0; a <= amax; ++a) acc[static_cast<std::size_t>(a)] += o.prob * row[a];
  }
}

double action_value(const Lattice& L, const std::vector<double>& V, std::size_t v, int a) {
  double s = 0.0;
  const long nb = L.next_base[v];
  for (const Outcome& o : L.j_dist[static_cast<std::size_t>(L.on_hand[v])]) s += o.prob * V[static_cast<std::size_t>(nb + o.j * L.stride0 + a)];
  return s;
}

// Stationary mass of states where the chosen action equals the cap room.
double boundary_audit(const Lattice& L, const std::vector<int>& act) {
  const std::size_t nbox = L.slot.size();
  std::vector<double> pi(nbox, 0.0), nxt(nbox, 0.0);
  pi[static_cast<std::size_t>(L.valid[0])] = 1.0;
  for (int it = 0; it < 20000; ++it) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t v = 0; v < L.valid.size(); ++v) {
      const double m = pi[static_cast<std::size_t>(L.valid[v])];
      if (m == 0.0) continue;
      const long base = L.next_base[v] + act[static_cast<std::size_t>(L.valid[v])];
      for (const Outcome& o : L.j_dist[static_cast<std::size_t>(L.on_hand[v])])
        nxt[static_cast<std::size_t>(base + o.j * L.stride0)] += m * o.prob;
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < nbox; ++i) diff += std::abs(nxt[i] - pi[i]);
    std::swap(pi, nxt);
    if (diff < 1e-12) break;
  }
  double mass = 0.0;
  for (std::size_t v = 0; v < L.valid.size(); ++v) {
    const long idx = L.valid[v];
    if (act[static_cast<std::size_t>(idx)] == L.room[v]) mass += pi[static_cast<std::size_t>(idx)];
  }
  return mass;
}

MDPResult iterate(const Lattice& L, const MDPConfig& cfg, const std::function<int(std::size_t)>* fixed) {
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) throw ParameterError("damping must lie in (0, 1]");
  const std::size_t nbox = L.slot.size();
  std::vector<double> V(nbox, 0.0), TV(nbox, 0.0);
  std::vector<int> act(nbox, -1);
  std::vector<double> acc;
  std::vector<int> fixed_action;
  if (fixed) {
    fixed_action.resize(L.valid.size());
    for (std::size_t v = 0; v < L.valid.size(); ++v) fixed_action[v] = std::clamp((*fixed)(v), 0, L.room[v]);
  }
  MDPResult r;
  r.cap = L.cap;
  r.lead_time = L.tau;
  r.states = L.valid.size();
  r.truncated_mass = L.truncated;
  const std::size_t ref = static_cast<std::size_t>(L.valid[0]);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t v = 0; v < L.valid.size(); ++v) {
      const std::size_t idx = static_cast<std::size_t>(L.valid[v]);
      double best;
      int arg;
      if (fixed) {
        arg = fixed_action[v];
        best = action_value(L, V, v, arg);
      } else {
        action_values(L, V, v, acc);
        arg = 0;
        best = acc[0];
        for (std::size_t a = 1; a < acc.size(); ++a)
          if (acc[a] < best) best = acc[a], arg = static_cast<int>(a);
      }
      TV[idx] = L.stage_cost[static_cast<std::size_t>(L.on_hand[v])] + best;
      act[idx] = arg;
      const double d = TV[idx] - V[idx];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    r.span = hi - lo;
    r.gain = 0.5 * (hi + lo);
    r.iterations = it;
    r.span_history.push_back(r.span);
    const double offset = TV[ref];
    for (std::size_t v = 0; v < L.valid.size(); ++v) {
      const std::size_t idx = static_cast<std::size_t>(L.valid[v]);
      V[idx] = (1.0 - cfg.damping) * V[idx] + cfg.damping * (TV[idx] - offset);
    }
    if (r.span < cfg.tolerance) {
      r.converged = true;
      break;
    }
  }
  r.actions = act;
  if (cfg.audit) r.boundary_mass = boundary_audit(L, act);
  return r;
}

}  // namespace

long MDPResult::index(const PipelineState& state) const {
  if (state.lead_time() != lead_time) return -1;
  const long C = cap + 1;
  long idx = 0;
  double pos = 0.0;
  auto coord = [&](double v) -> long {
    if (v < 0.0 || std::floor(v) != v || v > cap) return -1;
    return static_cast<long>(v);
  };
  long c0 = coord(state.on_hand);
  if (c0 < 0) return -1;
  idx = c0;
  pos = state.on_hand;
  for (double q : state.outstanding) {
    long c = coord(q);
    if (c < 0) return -1;
    idx = idx * C + c;
    pos += q;
  }
  if (pos > cap) return -1;
  return idx;
}

int MDPResult::action(const PipelineState& state) const {
  long idx = index(state);
  if (idx < 0 || static_cast<std::size_t>(idx) >= actions.size() || actions[static_cast<std::size_t>(idx)] < 0)
    throw ContractViolation("state is outside the solved lattice");
  return actions[static_cast<std::size_t>(idx)];
}

std::string MDPResult::policy_csv() const {
  std::ostringstream os;
  os << "I";
  for (int k = 1; k < lead_time; ++k) os << ",q" << k;
  os << ",action\n";
  const long C = cap + 1;
  for (std::size_t idx = 0; idx < actions.size(); ++idx) {
    if (actions[idx] < 0) continue;
    std::vector<long> c(static_cast<std::size_t>(lead_time));
    long r = static_cast<long>(idx);
    for (int k = lead_time - 1; k >= 0; --k) {
      c[static_cast<std::size_t>(k)] = r % C;
      r /= C;
    }
    for (int k = 0; k < lead_time; ++k) os << c[static_cast<std::size_t>(k)] << ",";
    os << actions[idx] << "\n";
  }
  return os.str();
}

MDPResult solve_average_cost(const DemandModel& demand, int tau, const CostParams& cost, const MDPConfig& cfg) {
  Lattice L = build_lattice(demand, tau, cost, cfg);
  return iterate(L, cfg, nullptr);
}

MDPResult evaluate_policy_exact(const std::function<int(const PipelineState&)>& policy, const DemandModel& demand,
                                int tau, const CostParams& cost, const MDPConfig& cfg) {
  Lattice L = build_lattice(demand, tau, cost, cfg);
  std::function<int(std::size_t)> by_slot = [&](std::size_t v) {
    long r = L.valid[v];
    PipelineState s = PipelineState::zero(tau);
    std::vector<long> c(static_cast<std::size_t>(tau));
    for (int k = tau - 1; k >= 0; --k) {
      c[static_cast<std::size_t>(k)] = r % L.C;
      r /= L.C;
    }
    s.on_hand = static_cast<double>(c[0]);
    for (int k = 1; k < tau; ++k) s.outstanding[static_cast<std::size_t>(k - 1)] = static_cast<double>(c[static_cast<std::size_t>(k)]);
    return policy(s);
  };
  return iterate(L, cfg, &by_slot);
}

}  // namespace pilinv
