// Acceptance checks. Each criterion prints its detail lines and then exactly
// one "PASS <name>" or "FAIL <name>" line. Exit status is nonzero on failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pilinv/backorder.hpp"
#include "pilinv/demand.hpp"
#include "pilinv/mdp.hpp"
#include "pilinv/optimize.hpp"
#include "pilinv/policy.hpp"
#include "pilinv/projection.hpp"
#include "pilinv/simulation.hpp"
#include "pilinv/testbed.hpp"
#include "pilinv/theory.hpp"

using namespace pilinv;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
};

std::uint64_t g_seed = 20240917;
std::string g_out;

std::string out_dir(const std::string& name) {
  const std::filesystem::path base =
      g_out.empty() ? std::filesystem::temp_directory_path() / "pilinv_acceptance" : std::filesystem::path(g_out);
  return (base / name).string();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Table 1 of the Zipkin test-bed, indexed [demand][p index][tau - 1].
const std::vector<double> kPs = {4, 9, 19, 39};
const std::map<std::string, std::vector<std::vector<std::vector<double>>>> kTable = {
    {"optimal",
     {{{4.04, 4.40, 4.60, 4.73}, {5.44, 6.09, 6.53, 6.84}, {6.68, 7.66, 8.36, 8.89}, {7.84, 9.11, 10.04, 10.79}},
      {{9.82, 10.24, 10.47, 10.61}, {14.51, 15.50, 16.14, 16.58}, {19.22, 20.89, 22.06, 22.95},
       {23.87, 26.21, 27.96, 29.36}}}},
    {"pil",
     {{{4.04, 4.40, 4.62, 4.74}, {5.45, 6.12, 6.58, 6.90}, {6.68, 7.68, 8.42, 8.95}, {7.84, 9.12, 10.09, 10.91}},
      {{9.84, 10.28, 10.51, 10.64}, {14.55, 15.60, 16.27, 16.73}, {19.28, 21.03, 22.73, 23.85},
       {23.94, 26.37, 28.18, 29.72}}}},
    {"myopic",
     {{{4.11, 4.56, 4.84, 5.06}, {5.45, 6.22, 6.80, 7.20}, {6.69, 7.77, 8.56, 9.18}, {7.88, 9.16, 10.17, 11.04}},
      {{9.95, 10.57, 10.99, 11.31}, {14.64, 15.93, 16.86, 17.61}, {19.37, 21.30, 22.79, 24.02},
       {23.97, 26.55, 28.61, 30.31}}}},
    {"bs",
     {{{4.16, 4.64, 4.98, 5.20}, {5.55, 6.32, 6.86, 7.27}, {6.73, 7.84, 8.60, 9.23}, {7.86, 9.19, 10.22, 11.06}},
      {{10.04, 10.70, 11.13, 11.44}, {14.73, 15.99, 16.87, 17.54}, {19.40, 21.31, 22.73, 23.85},
       {24.00, 26.55, 28.51, 30.12}}}},
    {"cbs",
     {{{4.06, 4.41, 4.63, 4.80}, {5.48, 6.12, 6.62, 6.91}, {6.69, 7.72, 8.40, 8.95}, {7.84, 9.14, 10.08, 10.88}},
      {{9.87, 10.32, 10.51, 10.70}, {14.58, 15.63, 16.27, 16.73}, {19.32, 21.06, 22.27, 23.28},
       {24.00, 26.30, 28.28, 29.76}}}},
    {"cop",
     {{{5.27, 5.27, 5.27, 5.27}, {10.27, 10.27, 10.27, 10.27}, {15.78, 15.78, 15.78, 15.78},
       {18.21, 18.21, 18.21, 18.21}},
      {{11.00, 11.00, 11.00, 11.00}, {18.19, 18.19, 18.19, 18.19}, {28.60, 28.60, 28.60, 28.60},
       {36.73, 36.73, 36.73, 36.73}}}},
};

double table_value(const std::string& policy, const Instance& inst) {
  const int d = inst.demand_spec.rfind("poisson", 0) == 0 ? 0 : 1;
  const int pi = static_cast<int>(std::find(kPs.begin(), kPs.end(), inst.cost.p) - kPs.begin());
  return kTable.at(policy)[d][pi][inst.tau - 1];
}

std::string label(const Instance& i) {
  return fmt("%s tau=%d p=%g", i.demand_spec.c_str(), i.tau, i.cost.p);
}

Outcome zipkin_optimal() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  int checked = 0, ok = 0;
  for (const auto& inst : zipkin_instances()) {
    const bool poisson = inst.demand_spec.rfind("poisson", 0) == 0;
    if (inst.tau > (poisson ? 2 : 1)) continue;
    MDPResult m = solve_average_cost(inst.demand(), inst.tau, inst.cost);
    const double want = table_value("optimal", inst);
    const bool good = std::abs(m.gain - want) <= 0.02 && m.converged;
    ++checked;
    ok += good;
    std::printf("  %-4s %-30s gain=%.4f table=%.2f boundary_mass=%.2e iterations=%d\n", good ? "ok" : "BAD",
                label(inst).c_str(), m.gain, want, m.boundary_mass, m.iterations);
    o.pass = o.pass && good;
  }
  const double secs = seconds_since(t0);
  o.summary = fmt("%d/%d gains within 0.02; %.1f s (target 600 s)", ok, checked, secs);
  o.pass = o.pass && secs < 600.0;
  return o;
}

Outcome zipkin_heuristic() {
  const auto t0 = std::chrono::steady_clock::now();
  TestbedOptions opts;
  opts.seed = g_seed;
  opts.ci_target = 0.005;
  opts.policies = {"pil", "bs", "myopic", "cop", "cbs"};
  opts.out_dir = out_dir("zipkin");
  TestbedReport rep = run_testbed("zipkin", opts);
  const double secs = seconds_since(t0);

  Outcome o;
  std::map<std::string, std::pair<int, int>> tally;  // policy -> (ok, total)
  std::map<std::string, const ResultRow*> pil, bs;
  for (const auto& r : rep.rows) {
    const double want = table_value(r.policy, r.instance);
    const double tol = std::max(0.01 * want, r.ci_halfwidth);
    const bool good = r.status == "ok" && std::abs(r.cost - want) <= tol;
    auto& t = tally[r.policy];
    t.first += good;
    ++t.second;
    o.pass = o.pass && good;
    std::printf("  %-4s %-30s %-6s cost=%.4f ci=%.4f table=%.2f gap=%+.2f%%%s\n", good ? "ok" : "BAD",
                label(r.instance).c_str(), r.policy.c_str(), r.cost, r.ci_halfwidth, want,
                100.0 * (r.cost - want) / want, r.status == "ok" ? "" : (" " + r.status + ": " + r.note).c_str());
    const std::string key = label(r.instance);
    if (r.policy == "pil") pil[key] = &r;
    if (r.policy == "bs") bs[key] = &r;
  }
  int dominance = 0;
  for (const auto& [key, p] : pil) {
    const ResultRow* b = bs.at(key);
    const bool good = p->cost <= b->cost + 3.0 * std::hypot(p->ci_halfwidth, b->ci_halfwidth);
    dominance += good;
    if (!good) std::printf("  BAD  %-30s pil %.4f above base-stock %.4f\n", key.c_str(), p->cost, b->cost);
    o.pass = o.pass && good;
  }
  std::string counts;
  for (const auto& [pol, t] : tally) counts += fmt("%s %d/%d, ", pol.c_str(), t.first, t.second);
  o.summary = counts + fmt("pil<=bs %d/%zu; %.0f s (target 1800 s)", dominance, pil.size(), secs);
  o.pass = o.pass && secs < 1800.0;
  return o;
}

Outcome theory() {
  Outcome o;
  // (a) bias fixed point
  std::mt19937_64 gen(g_seed);
  std::uniform_real_distribution<double> mu_d(1.0, 200.0), frac(0.0, 0.95), h_d(0.2, 5.0), p_d(0.5, 100.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double mu = mu_d(gen);
    BiasFunction bf = BiasFunction::make(mu, frac(gen) * mu, CostParams{h_d(gen), p_d(gen)});
    worst = std::max(worst, verify_bias_fixed_point(bf));
  }
  const bool a = worst < 1e-6;
  std::printf("  %-4s (a) max fixed-point residual over 20 parameterizations: %.3e\n", a ? "ok" : "BAD", worst);

  // (b) closed-form constant-order gain
  std::uniform_real_distribution<double> frac_b(0.1, 0.95), p_b(1.0, 50.0), h_b(0.5, 2.0), mu_b(5.0, 200.0);
  SimConfig cfg;
  cfg.seed = g_seed;
  cfg.stream = 303;
  cfg.replications = 30;
  cfg.periods = 40000;
  cfg.warmup = 5000;
  cfg.ci_target = 0.0;
  int b_ok = 0;
  for (int i = 0; i < 20; ++i) {
    const double mu = mu_b(gen), r = frac_b(gen) * mu;
    const CostParams c{h_b(gen), p_b(gen)};
    DemandModel d = DemandModel::exponential(mu);
    CostEstimate e = estimate_cost(Policy::constant(r, mu), d, 1 + i % 4, c, cfg);
    const double g = BiasFunction::make(mu, r, c).gain();
    const bool good = std::abs(e.mean - g) <= 3.0 * e.std_error;
    b_ok += good;
    std::printf("  %-4s (b) mu=%.2f r/mu=%.3f h=%.3f p=%.2f sim=%.4f closed=%.4f z=%.2f\n", good ? "ok" : "BAD", mu,
                r / mu, c.h, c.p, e.mean, g, (e.mean - g) / e.std_error);
  }
  const bool b = b_ok == 20;

  // (c) dominance chain and (d) quadratic divergence
  OptimizeConfig ocfg = OptimizeConfig::defaults(g_seed);
  int c_ok = 0, d_ok = 0, rows = 0;
  for (int tau : {1, 2, 4, 8}) {
    for (double p : {4.0, 9.0, 19.0}) {
      DominanceRow r = verify_dominance(DemandModel::exponential(100.0), tau, CostParams{1.0, p}, ocfg);
      ++rows;
      c_ok += r.chain_ok && r.closed_form_ok;
      d_ok += r.quadratic_ok;
      std::printf(
          "  %-4s (c) tau=%d p=%g U*=%.2f U(r*)=%.2f C(U*)=%.3f C(U(r*))=%.3f C(r*)=%.3f g=%.3f  d1=%.4f(%.4f) "
          "d2=%.4f(%.4f)\n",
          r.chain_ok && r.closed_form_ok ? "ok" : "BAD", tau, p, r.U_star, r.U_r, r.cost_pil_opt, r.cost_pil_r,
          r.cost_cop, r.gain_closed, r.d_opt, r.d_opt_se, r.d_cop, r.d_cop_se);
      std::printf("  %-4s (d) tau=%d p=%g a1*gap=%.4f residual=%.4f se=%.4f\n", r.quadratic_ok ? "ok" : "BAD", tau, p,
                  r.quad_rhs, r.quad_residual, r.quad_residual_se);
    }
  }
  const bool c = c_ok == rows, d = d_ok == rows;
  o.pass = a && b && c && d;
  o.summary = fmt("(a) residual %.1e, (b) %d/20, (c) %d/%d, (d) %d/%d", worst, b_ok, c_ok, rows, d_ok, rows);
  return o;
}

Outcome backorder() {
  Outcome o;
  std::vector<Instance> insts = zipkin_instances();
  std::mt19937_64 gen(g_seed + 1);
  std::uniform_real_distribution<double> cv_d(0.3, 2.0);
  std::uniform_int_distribution<int> tau_d(1, 6);
  const std::vector<double> ps = {1, 4, 9, 19, 49, 99};
  std::uniform_int_distribution<std::size_t> p_d(0, ps.size() - 1);
  for (int i = 0; i < 20; ++i) {
    const double cv = std::round(cv_d(gen) * 100.0) / 100.0;
    insts.push_back(Instance{"random", "me:mean=100,cv=" + fmt("%g", cv), cv, tau_d(gen), CostParams{1.0, ps[p_d(gen)]}});
  }
  SimConfig cfg;
  cfg.seed = g_seed;
  cfg.stream = 404;
  cfg.replications = 30;
  cfg.periods = 20000;
  cfg.ci_target = 0.0;
  int ok = 0, coupled_ok = 0, coupled_n = 0;
  for (std::size_t k = 0; k < insts.size(); ++k) {
    const Instance& inst = insts[k];
    const DemandModel d = inst.demand();
    BackorderSolution s = solve_backorder(d, inst.tau, inst.cost);
    const double U = backorder_equivalent_level(s, d, inst.tau);
    CostEstimate e = estimate_cost(Policy::pil(U, d), d, inst.tau, inst.cost, cfg);
    const bool good = e.mean <= s.C_star + 3.0 * e.ci_halfwidth;
    ok += good;

    CoupledComparison cc = coupled_lost_vs_backorder(U, d, inst.tau, inst.cost, default_backend(d), g_seed + k, 30, 4000);
    int bad_t = 0;
    for (std::size_t t = 0; t < cc.diff.size(); ++t) bad_t += cc.diff[t] < -3.0 * cc.diff_std_error[t];
    const bool cgood = bad_t == 0 && cc.identical_demand;
    ++coupled_n;
    coupled_ok += cgood;
    std::printf("  %-4s %-34s U=%.2f C(PIL)=%.4f ci=%.4f C_B*=%.4f  coupled %s (%d bad periods)\n",
                good && cgood ? "ok" : "BAD", label(inst).c_str(), U, e.mean, e.ci_halfwidth, s.C_star,
                cgood ? "ok" : "BAD", bad_t);
    o.pass = o.pass && good && cgood;
  }
  o.summary = fmt("cost dominance %d/%zu, coupled E[L_t]<=E[B_t] %d/%d", ok, insts.size(), coupled_ok, coupled_n);
  return o;
}

Outcome monotonicity() {
  Outcome o;
  const std::vector<DemandModel> models = {DemandModel::poisson(5.0), DemandModel::geometric(5.0),
                                           fit_mixed_erlang({5.0, 0.5})};
  const std::vector<double> levels = {0.0, 2.5, 5.0, 8.0, 12.0};
  const CostParams cost{1.0, 9.0};
  const int tau = 3;
  long violations = 0, comparisons = 0;
  for (const auto& d : models) {
    long dv = 0;
    for (int path = 0; path < 100; ++path) {
      std::vector<Trajectory> tr;
      for (double U : levels) tr.push_back(simulate_path(Policy::pil(U, d), d, tau, cost, g_seed, 505, path, 500));
      for (std::size_t k = 1; k < levels.size(); ++k) {
        double qa = 0.0, qb = 0.0, la = 0.0, lb = 0.0;
        for (std::size_t t = 0; t < tr[k].orders.size(); ++t) {
          qa += tr[k - 1].orders[t];
          qb += tr[k].orders[t];
          la += tr[k - 1].lost[t];
          lb += tr[k].lost[t];
          comparisons += 2;
          dv += (qa > qb + 1e-9) + (la < lb - 1e-9) + (tr[k].demand[t] != tr[k - 1].demand[t]);
        }
      }
    }
    std::printf("  %-4s %-40s %ld violations\n", dv == 0 ? "ok" : "BAD", d.describe().c_str(), dv);
    violations += dv;
  }
  o.pass = violations == 0;
  o.summary = fmt("%ld pathwise violations in %ld comparisons", violations, comparisons);
  return o;
}

Outcome grid() {
  Outcome o;
  struct Case {
    std::string spec;
    int tau;
    double p;
  };
  const std::vector<Case> cases = {{"exp:mean=100", 1, 1},          {"exp:mean=100", 1, 4},
                                   {"exp:mean=100", 1, 9},          {"exp:mean=100", 1, 19},
                                   {"me:mean=100,cv=0.5", 2, 1},    {"me:mean=100,cv=0.5", 2, 9},
                                   {"me:mean=100,cv=0.5", 2, 19},   {"me:mean=100,cv=1.5", 2, 1},
                                   {"me:mean=100,cv=1.5", 2, 4},    {"me:mean=100,cv=1.5", 2, 9}};
  OptimizeConfig cfg = OptimizeConfig::defaults(g_seed);
  cfg.final.ci_target = 0.0;
  int cost_ok = 0, size_ok = 0, n = 0;
  for (const auto& c : cases) {
    const DemandModel d = parse_demand(c.spec);
    const CostParams cost{1.0, c.p};
    const ProjectionBackend be = default_backend(d);
    auto objective = simulation_objective(PolicyFamily::PIL, d, c.tau, cost, cfg.search, be);
    SearchSpec fine = default_bracket(PolicyFamily::PIL, d, c.tau, cost);
    fine.tol = 1e-3 * d.mean();
    ScalarOptimum gold = optimize_scalar(fine, objective);
    for (double eps : {0.05, 0.1, 0.25}) {
      GuaranteedGrid g = build_grid(eps, d, cost);
      GridOptimum go = grid_search(g, objective);
      PairedEstimate pe = estimate_difference_crn(Policy::pil(go.param, d, be), Policy::pil(gold.param, d, be), d,
                                                  c.tau, cost, cfg.final);
      const bool cgood = pe.a.mean <= (1.0 + eps) * pe.b.mean + 3.0 * pe.diff_ci_halfwidth;
      const bool sgood = g.within_bound();
      ++n;
      cost_ok += cgood;
      size_ok += sgood;
      std::printf(
          "  %-4s %-22s tau=%d p=%-3g eps=%.2f U_grid=%.2f U_gold=%.2f C_grid=%.4f C_gold=%.4f |U|=%zu bound=%.2f "
          "(n=%ld n'=%ld, n+n'+2=%ld)%s\n",
          cgood && sgood ? "ok" : "BAD", c.spec.c_str(), c.tau, c.p, eps, go.param, gold.param, pe.a.mean, pe.b.mean,
          g.points.size(), g.cardinality_bound, g.n_arith, g.n_geom, g.n_arith + g.n_geom + 2,
          sgood ? "" : " size above bound");
      o.pass = o.pass && cgood && sgood;
    }
  }
  o.summary = fmt("cost guarantee %d/%d, cardinality bound %d/%d", cost_ok, n, size_ok, n);
  return o;
}

Outcome projection() {
  Outcome o;
  struct Family {
    DemandModel d;
    ProjectionBackend exact;
  };
  const std::vector<Family> fams = {{DemandModel::poisson(5.0), ProjectionBackend::lattice()},
                                    {DemandModel::geometric(5.0), ProjectionBackend::lattice()},
                                    {fit_mixed_erlang({100.0, 0.5}), ProjectionBackend::me_customer()},
                                    {DemandModel::exponential(100.0), ProjectionBackend::me_customer()}};
  std::mt19937_64 gen(g_seed);
  int total_bad = 0;
  for (const auto& f : fams) {
    std::uniform_int_distribution<int> lead(1, 6);
    std::uniform_real_distribution<double> u(0.0, 2.0 * f.d.mean());
    int bad = 0;
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      PipelineState x{u(gen), std::vector<double>(lead(gen) - 1)};
      for (double& q : x.outstanding) q = u(gen);
      ProjectionResult a = project(x, f.d, f.exact);
      ProjectionResult b = monte_carlo_projection(x, f.d, 200000, g_seed + s);
      const double z = b.std_error > 0.0 ? std::abs(a.total_lost - b.total_lost) / b.std_error
                                         : (std::abs(a.total_lost - b.total_lost) > 1e-9 ? INFINITY : 0.0);
      worst = std::max(worst, z);
      bad += z > 4.0;
    }
    std::printf("  %-4s %-40s %s vs mc: %d/100 beyond 4 SE, max z=%.2f\n", bad == 0 ? "ok" : "BAD",
                f.d.describe().c_str(), f.exact.describe().c_str(), bad, worst);
    total_bad += bad;
  }
  ThroughputReport tp = throughput_probe({0.4, 0.6, 0.8, 1.0, 1.2, 1.4}, {1, 2, 3, 4, 5, 6}, {1, 4, 9, 19, 49, 99},
                                         2000, g_seed);
  const bool tgood = tp.min >= 1e5;
  std::printf("  %-4s ME throughput per minute: min %.3g, avg %.3g, max %.3g\n", tgood ? "ok" : "BAD", tp.min, tp.avg,
              tp.max);
  o.pass = total_bad == 0 && tgood;
  o.summary = fmt("%d states beyond 4 SE; min throughput %.3g/min", total_bad, tp.min);
  return o;
}

Outcome leadtime() {
  const auto t0 = std::chrono::steady_clock::now();
  TestbedOptions opts;
  opts.seed = g_seed;
  opts.taus = {1, 5, 10, 20};
  opts.policies = {"bs", "pil", "cop"};
  opts.out_dir = out_dir("leadtime");
  TestbedReport rep = run_testbed("leadtime", opts);
  Outcome o;
  std::map<std::string, std::map<std::string, const ResultRow*>> by;
  for (const auto& r : rep.rows) by[label(r.instance)][r.policy] = &r;
  int ok = 0, n = 0;
  for (const auto& [key, m] : by) {
    const ResultRow *pil = m.at("pil"), *bs = m.at("bs"), *cop = m.at("cop");
    const ResultRow* best = bs->cost <= cop->cost ? bs : cop;
    const bool good = pil->status == "ok" && pil->cost <= best->cost + 3.0 * std::hypot(pil->ci_halfwidth, best->ci_halfwidth);
    ++n;
    ok += good;
    o.pass = o.pass && good;
    std::printf("  %-4s %-34s pil=%.3f bs=%.3f cop=%.3f\n", good ? "ok" : "BAD", key.c_str(), pil->cost, bs->cost,
                cop->cost);
  }
  // base-stock ahead at tau = 1, constant order ahead at tau = 20, both at p = 4
  bool crossover = true;
  for (double cv : {0.5, 1.5}) {
    auto get = [&](int tau, const char* pol) {
      return by.at(label(Instance{"leadtime", "me:mean=100,cv=" + fmt("%g", cv), cv, tau, CostParams{1.0, 4.0}}))
          .at(pol)
          ->cost;
    };
    const bool early = get(1, "bs") < get(1, "cop");
    const bool late = get(20, "cop") < get(20, "bs");
    std::printf("  %-4s cv=%g p=4 crossover: tau=1 bs %.2f vs cop %.2f, tau=20 bs %.2f vs cop %.2f\n",
                early && late ? "ok" : "BAD", cv, get(1, "bs"), get(1, "cop"), get(20, "bs"), get(20, "cop"));
    crossover = crossover && early && late;
  }
  o.pass = o.pass && crossover;
  o.summary = fmt("pil<=min(bs,cop) %d/%d, crossover %s; %.0f s", ok, n, crossover ? "reproduced" : "missing",
                  seconds_since(t0));
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"zipkin_optimal", zipkin_optimal}, {"zipkin_heuristic", zipkin_heuristic}, {"theory", theory},
    {"backorder", backorder},           {"monotonicity", monotonicity},         {"grid", grid},
    {"projection", projection},         {"leadtime", leadtime}};

}  // namespace

int main(int argc, char** argv) {
  std::string which = "all";
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) which = argv[++i];
    else if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) g_seed = std::stoull(argv[++i]);
    else if (!std::strcmp(argv[i], "--out") && i + 1 < argc) g_out = argv[++i];
    else {
      std::fprintf(stderr, "usage: acceptance [--criterion NAME|all] [--seed N] [--out DIR]\n");
      return 2;
    }
  }
  bool any = false, all_pass = true;
  for (const auto& [name, fn] : kCriteria) {
    if (which != "all" && which != name) continue;
    any = true;
    std::printf("== %s\n", name.c_str());
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
    }
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.summary.c_str(), seconds_since(t0));
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  if (!any) {
    std::fprintf(stderr, "unknown criterion '%s'\n", which.c_str());
    return 2;
  }
  return all_pass ? 0 : 1;
}
