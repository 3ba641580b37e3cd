#include "pilinv/testbed.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pilinv/backorder.hpp"
#include "pilinv/csv.hpp"
#include "pilinv/errors.hpp"
#include "pilinv/simulation.hpp"

namespace pilinv {

namespace {

const std::vector<double> kLargeCvs = {0.4, 0.6, 0.8, 1.0, 1.2, 1.4};
const std::vector<double> kLargePs = {1, 4, 9, 19, 49, 99};
const std::vector<double> kLeadtimeCvs = {0.5, 1.5};
const std::vector<double> kLeadtimePs = {4, 9, 19};

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int i = a; i <= b; ++i) v.push_back(i);
  return v;
}

std::string me_spec(double cv) { return "me:mean=100,cv=" + csv_number(cv); }

std::vector<Instance> me_grid(const std::string& name, const std::vector<double>& cvs, const std::vector<int>& taus,
                              const std::vector<double>& ps) {
  std::vector<Instance> out;
  for (double cv : cvs)
    for (int tau : taus)
      for (double p : ps) out.push_back(Instance{name, me_spec(cv), cv, tau, CostParams{1.0, p}});
  return out;
}

nlohmann::json sim_json(const SimConfig& c) {
  return {{"seed", c.seed},         {"stream", c.stream},         {"replications", c.replications},
          {"periods", c.periods},   {"warmup", c.warmup},         {"ci_target", c.ci_target},
          {"max_periods", c.max_periods}, {"confidence", c.confidence}};
}

std::string instance_key(const Instance& i) {
  return i.testbed + "|" + i.demand_spec + "|" + std::to_string(i.tau) + "|" + csv_number(i.cost.h) + "|" +
         csv_number(i.cost.p);
}

}  // namespace

std::vector<Instance> zipkin_instances() {
  std::vector<Instance> out;
  for (const char* d : {"poisson:mean=5", "geometric:mean=5"}) {
    const double cv = std::string(d).rfind("poisson", 0) == 0 ? std::sqrt(5.0) / 5.0 : std::sqrt(30.0) / 5.0;
    for (int tau = 1; tau <= 4; ++tau)
      for (double p : {4.0, 9.0, 19.0, 39.0}) out.push_back(Instance{"zipkin", d, cv, tau, CostParams{1.0, p}});
  }
  return out;
}

std::vector<Instance> large_instances(const std::vector<double>& cvs, const std::vector<int>& taus,
                                      const std::vector<double>& ps) {
  return me_grid("large", cvs.empty() ? kLargeCvs : cvs, taus.empty() ? range(1, 6) : taus,
                 ps.empty() ? kLargePs : ps);
}

std::vector<Instance> leadtime_instances(const std::vector<double>& cvs, const std::vector<int>& taus,
                                         const std::vector<double>& ps) {
  return me_grid("leadtime", cvs.empty() ? kLeadtimeCvs : cvs, taus.empty() ? range(1, 20) : taus,
                 ps.empty() ? kLeadtimePs : ps);
}

std::vector<std::string> default_policies(const std::string& testbed) {
  if (testbed == "zipkin") return {"optimal", "pil", "myopic", "bs", "cbs", "cop"};
  if (testbed == "large") return {"pil", "bs", "cop", "cbs"};
  if (testbed == "leadtime") return {"bs", "pil", "cop"};
  throw ParameterError("unknown testbed '" + testbed + "'");
}

OptimizeConfig TestbedOptions::optimize_config() const {
  OptimizeConfig c = OptimizeConfig::defaults(seed);
  c.final.ci_target = ci_target;
  if (search) c.search = *search;
  if (final) c.final = *final;
  if (backend) {
    c.backend = *backend;
    c.backend_set = true;
  }
  return c;
}

std::vector<std::string> result_header() {
  return {"testbed", "demand", "cv",       "tau",          "h",         "p",          "policy",  "param1",
          "param2",  "cost",   "ci_halfwidth", "std_error", "lost_rate", "periods", "replications", "seed",
          "flagged", "status", "note"};
}

std::vector<std::string> result_fields(const ResultRow& r) {
  const Instance& i = r.instance;
  auto num = [](double v) { return std::isnan(v) ? std::string() : csv_number(v); };
  return {i.testbed,          i.demand_spec,           csv_number(i.cv),      std::to_string(i.tau),
          csv_number(i.cost.h), csv_number(i.cost.p),  r.policy,              num(r.param1),
          num(r.param2),      num(r.cost),             num(r.ci_halfwidth),   num(r.std_error),
          num(r.lost_rate),   std::to_string(r.periods), std::to_string(r.replications), std::to_string(r.seed),
          r.flagged ? "1" : "0", r.status,             r.note};
}

ResultRow run_policy(const Instance& inst, const std::string& policy, const TestbedOptions& opts) {
  ResultRow row;
  row.instance = inst;
  row.policy = policy;
  row.seed = opts.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const DemandModel demand = inst.demand();
    if (policy == "optimal") {
      const int limit = opts.extended ? std::max(opts.exact_max_tau, 4) : opts.exact_max_tau;
      if (!demand.integer_valued()) {
        row.status = "skipped";
        row.note = "exact solve needs integer demand";
      } else if (inst.tau > limit) {
        row.status = "skipped";
        row.note = "lead time beyond exact limit";
      } else {
        MDPResult m = solve_average_cost(demand, inst.tau, inst.cost, opts.mdp);
        row.cost = m.gain;
        row.ci_halfwidth = 0.0;
        row.std_error = 0.0;
        row.param1 = m.cap;
        row.flagged = !m.converged || m.boundary_mass > 1e-6;
        std::ostringstream note;
        note << "iterations=" << m.iterations << " span=" << m.span << " boundary_mass=" << m.boundary_mass;
        row.note = note.str();
      }
    } else {
      const PolicyFamily family = parse_family(policy);
      const OptimizeConfig cfg = opts.optimize_config();
      SearchSpec bracket;
      const SearchSpec* use = nullptr;
      if (family == PolicyFamily::PIL) {
        // around the level whose back-order twin is newsvendor optimal
        BackorderSolution b = solve_backorder(demand, inst.tau, inst.cost);
        const double ub = backorder_equivalent_level(b, demand, inst.tau);
        bracket = default_bracket(family, demand, inst.tau, inst.cost);
        bracket.hi = 2.0 * ub + 2.0 * demand.mean();
        use = &bracket;
      }
      PolicyOptimum o = optimize_policy(family, demand, inst.tau, inst.cost, cfg, use);
      if (family != PolicyFamily::Myopic) row.param1 = o.param;
      if (family == PolicyFamily::CappedBaseStock) row.param2 = o.param2;
      row.cost = o.estimate.mean;
      row.ci_halfwidth = o.estimate.ci_halfwidth;
      row.std_error = o.estimate.std_error;
      row.lost_rate = o.estimate.lost_rate;
      row.periods = o.estimate.periods;
      row.replications = o.estimate.replications;
      row.flagged = o.flagged || o.estimate.target_missed;
      row.note = o.note;
      if (o.estimate.target_missed) row.note += row.note.empty() ? "ci target missed" : "; ci target missed";
    }
  } catch (const std::exception& e) {
    row.status = "error";
    row.note = e.what();
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<GapRow> gap_summary(const std::vector<ResultRow>& rows) {
  std::map<std::string, double> pil;
  for (const auto& r : rows)
    if (r.policy == "pil" && r.status == "ok") pil[instance_key(r.instance)] = r.cost;
  // (factor, level, policy) -> gaps, kept in first-seen order
  std::vector<GapRow> out;
  std::map<std::string, std::size_t> slot;
  std::vector<std::vector<double>> values;
  auto add = [&](const std::string& factor, const std::string& level, const std::string& policy, double gap) {
    const std::string key = factor + "|" + level + "|" + policy;
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, out.size()).first;
      out.push_back(GapRow{factor, level, policy});
      values.emplace_back();
    }
    values[it->second].push_back(gap);
  };
  for (const char* factor : {"cv", "tau", "p", "total"}) {
    for (const auto& r : rows) {
      if (r.policy == "pil" || r.policy == "optimal" || r.status != "ok") continue;
      auto it = pil.find(instance_key(r.instance));
      if (it == pil.end() || !(it->second > 0.0)) continue;
      const double gap = 100.0 * (r.cost - it->second) / it->second;
      const std::string f = factor;
      std::string level = "all";
      if (f == "cv") level = csv_number(r.instance.cv);
      else if (f == "tau") level = std::to_string(r.instance.tau);
      else if (f == "p") level = csv_number(r.instance.cost.p);
      add(f, level, r.policy, gap);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& v = values[i];
    out[i].min_gap = *std::min_element(v.begin(), v.end());
    out[i].max_gap = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += x;
    out[i].avg_gap = s / static_cast<double>(v.size());
    out[i].count = static_cast<int>(v.size());
  }
  // numeric order of levels within a factor keeps the table readable
  std::stable_sort(out.begin(), out.end(), [](const GapRow& a, const GapRow& b) {
    static const std::map<std::string, int> order = {{"cv", 0}, {"tau", 1}, {"p", 2}, {"total", 3}};
    if (a.factor != b.factor) return order.at(a.factor) < order.at(b.factor);
    if (a.level != b.level && a.factor != "total") return std::stod(a.level) < std::stod(b.level);
    return false;
  });
  return out;
}

std::vector<std::string> write_leadtime_files(const std::vector<ResultRow>& rows, const std::string& dir) {
  // (cv, p) -> tau -> policy -> cost
  std::map<std::pair<double, double>, std::map<int, std::map<std::string, double>>> grid;
  for (const auto& r : rows)
    if (r.status == "ok") grid[{r.instance.cv, r.instance.cost.p}][r.instance.tau][r.policy] = r.cost;
  std::vector<std::string> files;
  for (const auto& [key, by_tau] : grid) {
    CsvWriter w({"tau", "CBS", "CPIL", "COP"});
    for (const auto& [tau, costs] : by_tau) {
      auto get = [&](const char* p) {
        auto it = costs.find(p);
        return it == costs.end() ? std::string() : csv_number(it->second);
      };
      w.row({std::to_string(tau), get("bs"), get("pil"), get("cop")});
    }
    const std::string path =
        (std::filesystem::path(dir) / ("leadtime_cv" + csv_number(key.first) + "_p" + csv_number(key.second) + ".csv"))
            .string();
    w.save(path);
    files.push_back(path);
  }
  return files;
}

TestbedReport run_testbed(const std::string& name, const TestbedOptions& opts) {
  std::vector<Instance> instances;
  if (name == "zipkin") {
    instances = zipkin_instances();
    auto keep = [&](const Instance& i) {
      bool tau_ok = opts.taus.empty() || std::count(opts.taus.begin(), opts.taus.end(), i.tau) > 0;
      bool p_ok = opts.ps.empty() || std::count(opts.ps.begin(), opts.ps.end(), i.cost.p) > 0;
      return tau_ok && p_ok;
    };
    instances.erase(std::remove_if(instances.begin(), instances.end(), [&](const Instance& i) { return !keep(i); }),
                    instances.end());
  } else if (name == "large") {
    instances = large_instances(opts.cvs, opts.taus, opts.ps);
  } else if (name == "leadtime") {
    instances = leadtime_instances(opts.cvs, opts.taus, opts.ps);
  } else {
    throw ParameterError("unknown testbed '" + name + "'");
  }
  const std::vector<std::string> policies = opts.policies.empty() ? default_policies(name) : opts.policies;

  TestbedReport rep;
  rep.name = name;
  // instances in order; each simulation already uses every core
  for (const auto& inst : instances)
    for (const auto& pol : policies) rep.rows.push_back(run_policy(inst, pol, opts));
  rep.gaps = gap_summary(rep.rows);
  if (!opts.write_files) return rep;

  const std::filesystem::path dir(opts.out_dir);
  std::filesystem::create_directories(dir);
  CsvWriter results(result_header());
  CsvWriter timing({"testbed", "demand", "tau", "p", "policy", "wall_seconds"});
  for (const auto& r : rep.rows) {
    results.row(result_fields(r));
    timing.row({r.instance.testbed, r.instance.demand_spec, std::to_string(r.instance.tau),
                csv_number(r.instance.cost.p), r.policy, csv_number(r.wall_seconds, 3)});
  }
  const std::string results_path = (dir / (name + "_results.csv")).string();
  const std::string timing_path = (dir / (name + "_timing.csv")).string();
  results.save(results_path);
  timing.save(timing_path);
  rep.files = {results_path, timing_path};

  CsvWriter summary({"factor", "level", "policy", "min_gap", "max_gap", "avg_gap"});
  for (const auto& g : rep.gaps)
    summary.row({g.factor, g.level, g.policy, csv_number(g.min_gap, 2), csv_number(g.max_gap, 2),
                 csv_number(g.avg_gap, 2)});
  const std::string summary_path = (dir / (name + "_summary.csv")).string();
  summary.save(summary_path);
  rep.files.push_back(summary_path);

  if (name == "leadtime")
    for (const auto& f : write_leadtime_files(rep.rows, dir.string())) rep.files.push_back(f);

  const OptimizeConfig oc = opts.optimize_config();
  nlohmann::json cfg = {
      {"testbed", name},
      {"seed", opts.seed},
      {"out_dir", opts.out_dir},
      {"projection", opts.backend ? opts.backend->describe() : std::string("default")},
      {"ci_target", opts.ci_target},
      {"extended", opts.extended},
      {"exact_max_tau", opts.extended ? std::max(opts.exact_max_tau, 4) : opts.exact_max_tau},
      {"policies", policies},
      {"search", sim_json(oc.search)},
      {"final", sim_json(oc.final)},
      {"mdp",
       {{"cap", opts.mdp.cap},
        {"demand_tail", opts.mdp.demand_tail},
        {"tolerance", opts.mdp.tolerance},
        {"max_iterations", opts.mdp.max_iterations},
        {"damping", opts.mdp.damping}}},
  };
  nlohmann::json inst = nlohmann::json::array();
  for (const auto& i : instances)
    inst.push_back({{"demand", i.demand_spec}, {"cv", i.cv}, {"tau", i.tau}, {"h", i.cost.h}, {"p", i.cost.p}});
  cfg["instances"] = inst;
  const std::string cfg_path = (dir / (name + "_config.json")).string();
  std::ofstream(cfg_path) << cfg.dump(2) << "\n";
  rep.files.push_back(cfg_path);
  return rep;
}

ThroughputReport throughput_probe(const std::vector<double>& cvs, const std::vector<int>& taus,
                                  const std::vector<double>& ps, std::size_t count, std::uint64_t seed) {
  ThroughputReport rep;
  double sum = 0.0;
  rep.min = INFINITY;
  rep.max = 0.0;
  for (double cv : cvs)
    for (int tau : taus)
      for (double p : ps) {
        const DemandModel d = fit_mixed_erlang({100.0, cv});
        const CostParams cost{1.0, p};
        const double ub = backorder_equivalent_level(solve_backorder(d, tau, cost), d, tau);
        ThroughputSample s =
            measure_throughput(d, tau, ProjectionBackend::me_customer(), count, seed, 2.0 * std::max(ub, d.mean()));
        ThroughputRow row{cv, tau, p, d.max_phases(), s.projections_per_minute};
        rep.rows.push_back(row);
        sum += row.projections_per_minute;
        rep.min = std::min(rep.min, row.projections_per_minute);
        rep.max = std::max(rep.max, row.projections_per_minute);
      }
  rep.avg = rep.rows.empty() ? 0.0 : sum / static_cast<double>(rep.rows.size());
  if (rep.rows.empty()) rep.min = 0.0;
  return rep;
}

}  // namespace pilinv
