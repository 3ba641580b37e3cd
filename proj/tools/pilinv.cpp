// pilinv: command line harness for the lost-sales policy library.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "pilinv/backorder.hpp"
#include "pilinv/csv.hpp"
#include "pilinv/demand.hpp"
#include "pilinv/errors.hpp"
#include "pilinv/mdp.hpp"
#include "pilinv/optimize.hpp"
#include "pilinv/policy.hpp"
#include "pilinv/projection.hpp"
#include "pilinv/simulation.hpp"
#include "pilinv/testbed.hpp"
#include "pilinv/theory.hpp"

using namespace pilinv;

namespace {

struct Common {
  std::string demand = "poisson:mean=5";
  int tau = 1;
  double h = 1.0;
  double p = 9.0;
  std::uint64_t seed = 1;
  std::string projection;
  double ci_target = 0.01;
  std::string out = "results";
};

void add_instance(CLI::App* app, Common& c) {
  app->add_option("--demand", c.demand, "Demand spec, e.g. poisson:mean=5, me:mean=100,cv=0.5")->capture_default_str();
  app->add_option("--tau", c.tau, "Lead time (>= 1)")->capture_default_str();
  app->add_option("--h", c.h, "Holding cost per item per period")->capture_default_str();
  app->add_option("--p", c.p, "Penalty per lost sale")->capture_default_str();
}

void add_run(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app->add_option("--projection", c.projection, "lattice | me | mc:paths=N");
  app->add_option("--ci-target", c.ci_target, "Relative 95% half-width target")->capture_default_str();
}

ProjectionBackend backend_for(const Common& c, const DemandModel& d) {
  return c.projection.empty() ? default_backend(d) : ProjectionBackend::parse(c.projection);
}

OptimizeConfig optimize_config(const Common& c, const DemandModel& d) {
  OptimizeConfig oc = OptimizeConfig::defaults(c.seed);
  oc.final.ci_target = c.ci_target;
  oc.backend = backend_for(c, d);
  oc.backend_set = true;
  return oc;
}

std::vector<std::string> instance_fields(const Common& c) {
  return {c.demand, std::to_string(c.tau), csv_number(c.h), csv_number(c.p)};
}

void print_row(const std::vector<std::string>& header, const std::vector<std::string>& fields, bool with_header) {
  CsvWriter w(header);
  w.row(fields);
  std::string s = w.str();
  if (!with_header) s = s.substr(s.find("\r\n") + 2);
  std::cout << s;
}

// ---- verify suites ----

struct Check {
  std::string suite, name;
  bool passed;
  std::string detail;
};

std::vector<Check> suite_bias(std::uint64_t seed) {
  std::vector<Check> out;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double mu = 1.0 + 199.0 * u(gen);
    const double r = mu * (0.05 + 0.9 * u(gen));
    const CostParams cost{0.5 + 2.0 * u(gen), 1.0 + 50.0 * u(gen)};
    const BiasFunction bf = BiasFunction::make(mu, r, cost);
    const double res = verify_bias_fixed_point(bf);
    std::ostringstream d;
    d << "mu=" << mu << " r=" << r << " h=" << cost.h << " p=" << cost.p << " residual=" << res;
    out.push_back({"bias", "fixed_point_" + std::to_string(i), res < 1e-6, d.str()});
  }
  return out;
}

std::vector<Check> suite_improvement(std::uint64_t seed) {
  std::vector<Check> out;
  const DemandModel d = DemandModel::exponential(100.0);
  for (int tau : {1, 2, 4}) {
    const CostParams cost{1.0, 9.0};
    const double r = optimal_constant_rate(100.0, cost);
    ImprovementReport rep = verify_pil_improvement(r, d, tau, cost, seed, 100, 4000);
    std::ostringstream s;
    s << "max_order_error=" << rep.max_order_error << " max_mean_z=" << rep.max_mean_z;
    out.push_back({"improvement", "tau_" + std::to_string(tau), rep.passed, s.str()});
  }
  return out;
}

std::vector<Check> suite_dominance(std::uint64_t seed, bool quick) {
  std::vector<Check> out;
  const DemandModel d = DemandModel::exponential(100.0);
  std::vector<int> taus = quick ? std::vector<int>{1, 2} : std::vector<int>{1, 2, 4, 8};
  std::vector<double> ps = quick ? std::vector<double>{4.0} : std::vector<double>{4.0, 9.0, 19.0};
  OptimizeConfig oc = OptimizeConfig::defaults(seed);
  for (double p : ps)
    for (int tau : taus) {
      DominanceRow row = verify_dominance(d, tau, CostParams{1.0, p}, oc);
      std::ostringstream s;
      s << std::setprecision(6) << "C(U*)=" << row.cost_pil_opt << " C(U(r*))=" << row.cost_pil_r
        << " C(r*)=" << row.cost_cop << " g=" << row.gain_closed << " quad_residual=" << row.quad_residual
        << " se=" << row.quad_residual_se;
      const std::string tag = "tau_" + std::to_string(tau) + "_p_" + csv_number(p);
      out.push_back({"dominance", "chain_" + tag, row.chain_ok, s.str()});
      out.push_back({"dominance", "closed_form_" + tag, row.closed_form_ok, s.str()});
      out.push_back({"dominance", "quadratic_" + tag, row.quadratic_ok, s.str()});
    }
  return out;
}

std::vector<Check> suite_identity(std::uint64_t seed) {
  std::vector<Check> out;
  for (const char* spec : {"poisson:mean=5", "me:mean=100,cv=0.5"}) {
    const DemandModel d = parse_demand(spec);
    const CostParams cost{1.0, 9.0};
    const int tau = 2;
    const double U = backorder_equivalent_level(solve_backorder(d, tau, cost), d, tau);
    SimConfig cfg;
    cfg.seed = seed;
    cfg.ci_target = 0.0;
    CostEstimate e = estimate_cost(Policy::pil(U, d), d, tau, cost, cfg);
    IdentityCheck ic = verify_cost_identity(e, U, d.mean(), cost);
    std::ostringstream s;
    s << "residual=" << ic.residual << " se=" << ic.std_error;
    out.push_back({"identity", spec, ic.passed, s.str()});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projected inventory level policies for lost-sales inventory systems"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Common c;

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Simulate one policy and print a CSV row");
  std::string policy_text;
  bool header = false;
  long periods = 0;
  int reps = 0;
  ev->add_option("--policy", policy_text, "bs:S=.., cop:r=.., pil:U=.., myopic, cbs:S=..,r=..")->required();
  add_instance(ev, c);
  add_run(ev, c);
  ev->add_option("--periods", periods, "Counted periods per replication before extension");
  ev->add_option("--replications", reps, "Replications");
  ev->add_flag("--header", header, "Print the CSV header first");

  // optimize
  auto* opt = app.add_subcommand("optimize", "Optimize one policy family");
  std::string family = "pil";
  double grid_eps = 0.0;
  opt->add_option("--family", family, "bs | cop | pil | cbs | myopic")->capture_default_str();
  opt->add_option("--grid-eps", grid_eps, "Use the guaranteed grid with this epsilon (pil only)");
  add_instance(opt, c);
  add_run(opt, c);
  opt->add_flag("--header", header, "Print the CSV header first");

  // mdp
  auto* md = app.add_subcommand("mdp", "Exact average-cost solve on the integer lattice");
  MDPConfig mcfg;
  std::string policy_out;
  md->add_option("--cap", mcfg.cap, "Inventory position cap (0 = 6 mu (tau+1))");
  md->add_option("--tolerance", mcfg.tolerance, "Span tolerance")->capture_default_str();
  md->add_option("--policy-out", policy_out, "Write the policy table as CSV");
  add_instance(md, c);

  // backorder
  auto* bo = app.add_subcommand("backorder", "Newsvendor optimum of the back-order twin");
  add_instance(bo, c);

  // verify
  auto* ve = app.add_subcommand("verify", "Run the verification suites");
  std::string suite = "all";
  bool quick = false;
  ve->add_option("--suite", suite, "bias | improvement | dominance | identity | all")->capture_default_str();
  ve->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  ve->add_option("--out", c.out, "Directory for verify.csv")->capture_default_str();
  ve->add_flag("--quick", quick, "Smaller dominance grid");

  // throughput
  auto* th = app.add_subcommand("throughput", "ME projection throughput across the large grid");
  std::vector<double> cvs, ps;
  std::vector<int> taus;
  std::size_t count = 20000;
  th->add_option("--cv", cvs, "cv grid");
  th->add_option("--tau", taus, "lead-time grid");
  th->add_option("--p", ps, "penalty grid");
  th->add_option("--count", count, "Projections per cell")->capture_default_str();
  th->add_option("--seed", c.seed, "Seed")->capture_default_str();

  // testbed
  auto* tb = app.add_subcommand("testbed", "Run a full testbed and write CSV files");
  std::string bed;
  bool extended = false;
  std::vector<std::string> policies;
  tb->add_option("name", bed, "zipkin | large | leadtime")->required()->check(CLI::IsMember({"zipkin", "large", "leadtime"}));
  tb->add_option("--out", c.out, "Output directory")->capture_default_str();
  tb->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  tb->add_option("--projection", c.projection, "lattice | me | mc:paths=N");
  tb->add_option("--ci-target", c.ci_target, "Relative 95% half-width target")->capture_default_str();
  tb->add_flag("--extended", extended, "Exact rows up to lead time 4 (slow)");
  tb->add_option("--cv", cvs, "cv grid override");
  tb->add_option("--tau", taus, "lead-time grid override");
  tb->add_option("--p", ps, "penalty grid override");
  tb->add_option("--policies", policies, "Policies to run (optimal, pil, myopic, bs, cbs, cop)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ev) {
      const DemandModel d = parse_demand(c.demand);
      const CostParams cost{c.h, c.p};
      cost.validate();
      Policy pol = parse_policy(policy_text, d, cost, backend_for(c, d));
      SimConfig cfg;
      cfg.seed = c.seed;
      cfg.ci_target = c.ci_target;
      if (periods > 0) cfg.periods = periods;
      if (reps > 0) cfg.replications = reps;
      CostEstimate e = estimate_cost(pol, d, c.tau, cost, cfg);
      auto fields = instance_fields(c);
      for (const auto& f : std::vector<std::string>{to_string(pol.family()), pol.describe(), csv_number(e.mean),
                                                     csv_number(e.ci_halfwidth), std::to_string(e.periods),
                                                     std::to_string(c.seed)})
        fields.push_back(f);
      print_row({"demand", "tau", "h", "p", "policy", "params", "cost", "ci_halfwidth", "periods", "seed"}, fields,
                header);
      return 0;
    }
    if (*opt) {
      const DemandModel d = parse_demand(c.demand);
      const CostParams cost{c.h, c.p};
      cost.validate();
      const OptimizeConfig oc = optimize_config(c, d);
      const PolicyFamily fam = parse_family(family);
      std::vector<std::string> head = {"demand", "tau", "h", "p", "family", "param", "param2", "cost",
                                       "ci_halfwidth", "periods", "seed", "evaluations", "flagged", "note"};
      auto fields = instance_fields(c);
      if (grid_eps > 0.0) {
        if (fam != PolicyFamily::PIL) throw ParameterError("--grid-eps applies to the pil family");
        GuaranteedGrid g = build_grid(grid_eps, d, cost);
        auto f = simulation_objective(fam, d, c.tau, cost, oc.search, oc.backend);
        GridOptimum go = grid_search(g, f);
        CostEstimate e = estimate_cost(Policy::pil(go.param, d, oc.backend), d, c.tau, cost, oc.final);
        std::ostringstream note;
        note << "grid points=" << g.points.size() << " bound=" << g.cardinality_bound;
        for (const auto& x : std::vector<std::string>{"pil", csv_number(go.param), "", csv_number(e.mean),
                                                       csv_number(e.ci_halfwidth), std::to_string(e.periods),
                                                       std::to_string(c.seed), std::to_string(go.evaluations),
                                                       g.within_bound() ? "0" : "1", note.str()})
          fields.push_back(x);
      } else {
        PolicyOptimum o = optimize_policy(fam, d, c.tau, cost, oc);
        const bool has1 = fam != PolicyFamily::Myopic;
        for (const auto& x : std::vector<std::string>{
                 to_string(fam), has1 ? csv_number(o.param) : "",
                 fam == PolicyFamily::CappedBaseStock ? csv_number(o.param2) : "", csv_number(o.estimate.mean),
                 csv_number(o.estimate.ci_halfwidth), std::to_string(o.estimate.periods), std::to_string(c.seed),
                 std::to_string(o.evaluations), o.flagged ? "1" : "0", o.note})
          fields.push_back(x);
      }
      print_row(head, fields, header);
      return 0;
    }
    if (*md) {
      const DemandModel d = parse_demand(c.demand);
      MDPResult r = solve_average_cost(d, c.tau, CostParams{c.h, c.p}, mcfg);
      std::cout << std::setprecision(8) << "gain " << r.gain << "\niterations " << r.iterations << "\nspan " << r.span
                << "\nconverged " << (r.converged ? "yes" : "no") << "\ncap " << r.cap << "\nstates " << r.states
                << "\nboundary_mass " << r.boundary_mass << "\ntruncated_mass " << r.truncated_mass << "\n";
      if (r.boundary_mass > 1e-6) std::cerr << "warning: cap restricts the policy with mass " << r.boundary_mass << "\n";
      if (!policy_out.empty()) {
        std::filesystem::path pth(policy_out);
        if (pth.has_parent_path()) std::filesystem::create_directories(pth.parent_path());
        std::ofstream(policy_out) << r.policy_csv();
      }
      return r.converged ? 0 : 1;
    }
    if (*bo) {
      const DemandModel d = parse_demand(c.demand);
      BackorderSolution s = solve_backorder(d, c.tau, CostParams{c.h, c.p});
      std::cout << std::setprecision(8) << "S_star " << s.S_star << "\nC_star " << s.C_star << "\nU_equivalent "
                << backorder_equivalent_level(s, d, c.tau) << "\n";
      return 0;
    }
    if (*ve) {
      std::vector<Check> checks;
      auto want = [&](const char* s) { return suite == "all" || suite == s; };
      if (!(want("bias") || want("improvement") || want("dominance") || want("identity")))
        throw ParameterError("unknown suite '" + suite + "'");
      if (want("bias")) for (auto& x : suite_bias(c.seed)) checks.push_back(x);
      if (want("improvement")) for (auto& x : suite_improvement(c.seed)) checks.push_back(x);
      if (want("identity")) for (auto& x : suite_identity(c.seed)) checks.push_back(x);
      if (want("dominance")) for (auto& x : suite_dominance(c.seed, quick)) checks.push_back(x);
      CsvWriter w({"suite", "check", "result", "detail"});
      bool all = true;
      for (const auto& k : checks) {
        std::cout << std::left << std::setw(12) << k.suite << std::setw(28) << k.name << (k.passed ? "PASS  " : "FAIL  ")
                  << k.detail << "\n";
        w.row({k.suite, k.name, k.passed ? "pass" : "fail", k.detail});
        all = all && k.passed;
      }
      const std::string path = (std::filesystem::path(c.out) / "verify.csv").string();
      w.save(path);
      std::cout << (all ? "all checks passed" : "some checks failed") << "; table written to " << path << "\n";
      return all ? 0 : 1;
    }
    if (*th) {
      if (cvs.empty()) cvs = {0.4, 0.6, 0.8, 1.0, 1.2, 1.4};
      if (taus.empty()) taus = {1, 2, 3, 4, 5, 6};
      if (ps.empty()) ps = {1, 4, 9, 19, 49, 99};
      ThroughputReport r = throughput_probe(cvs, taus, ps, count, c.seed);
      CsvWriter w({"cv", "tau", "p", "k_max", "projections_per_minute"});
      for (const auto& row : r.rows)
        w.row({csv_number(row.cv), std::to_string(row.tau), csv_number(row.p), std::to_string(row.max_phases),
               csv_number(row.projections_per_minute, 0)});
      std::cout << w.str() << "min " << r.min << "\nmax " << r.max << "\navg " << r.avg << "\n";
      return r.min > 0.0 && std::isfinite(r.max) ? 0 : 1;
    }
    if (*tb) {
      TestbedOptions o;
      o.seed = c.seed;
      o.out_dir = c.out;
      o.ci_target = c.ci_target;
      o.extended = extended;
      if (extended) std::cerr << "note: exact rows up to lead time 4 can take hours\n";
      if (!c.projection.empty()) o.backend = ProjectionBackend::parse(c.projection);
      o.cvs = cvs;
      o.taus = taus;
      o.ps = ps;
      o.policies = policies;
      TestbedReport r = run_testbed(bed, o);
      int errors = 0;
      for (const auto& row : r.rows) errors += row.status == "error";
      for (const auto& f : r.files) std::cout << "wrote " << f << "\n";
      if (errors) std::cerr << errors << " rows failed; see the status column\n";
      return errors ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
