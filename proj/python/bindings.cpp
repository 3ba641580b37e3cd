#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pilinv/backorder.hpp"
#include "pilinv/demand.hpp"
#include "pilinv/errors.hpp"
#include "pilinv/mdp.hpp"
#include "pilinv/optimize.hpp"
#include "pilinv/policy.hpp"
#include "pilinv/projection.hpp"
#include "pilinv/simulation.hpp"
#include "pilinv/system.hpp"
#include "pilinv/testbed.hpp"
#include "pilinv/theory.hpp"

namespace py = pybind11;
using namespace pilinv;

namespace {

ProjectionBackend backend_for(const DemandModel& d, const std::string& text) {
  return text.empty() ? default_backend(d) : ProjectionBackend::parse(text);
}

py::dict estimate_dict(const CostEstimate& e) {
  py::dict out;
  out["mean"] = e.mean;
  out["ci_halfwidth"] = e.ci_halfwidth;
  out["std_error"] = e.std_error;
  out["lost_rate"] = e.lost_rate;
  out["mean_inventory"] = e.mean_inventory;
  out["periods"] = e.periods;
  out["replications"] = e.replications;
  out["target_missed"] = e.target_missed;
  std::vector<double> reps;
  for (const auto& r : e.reps) reps.push_back(r.cost);
  out["replication_costs"] = reps;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lost-sales inventory control with projected inventory level policies";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  py::class_<DemandModel>(m, "DemandModel")
      .def_static("poisson", &DemandModel::poisson, py::arg("mean"))
      .def_static("geometric", &DemandModel::geometric, py::arg("mean"))
      .def_static("exponential", &DemandModel::exponential, py::arg("mean"))
      .def_static("deterministic", &DemandModel::deterministic, py::arg("value"))
      .def_property_readonly("mean", &DemandModel::mean)
      .def_property_readonly("variance", &DemandModel::variance)
      .def_property_readonly("cv", &DemandModel::cv)
      .def_property_readonly("integer_valued", &DemandModel::integer_valued)
      .def("pmf", &DemandModel::pmf)
      .def("cdf", &DemandModel::cdf)
      .def("quantile", &DemandModel::quantile)
      .def("expected_shortfall", &DemandModel::expected_shortfall)
      .def("expected_excess", &DemandModel::expected_excess)
      .def("__repr__", &DemandModel::describe);

  m.def("parse_demand", &parse_demand, py::arg("spec"));
  m.def(
      "fit_mixed_erlang", [](double mean, double cv) { return fit_mixed_erlang({mean, cv}); }, py::arg("mean"),
      py::arg("cv"));

  py::class_<CostParams>(m, "CostParams")
      .def(py::init([](double h, double p) {
             CostParams c{h, p};
             c.validate();
             return c;
           }),
           py::arg("h") = 1.0, py::arg("p") = 1.0)
      .def_readwrite("h", &CostParams::h)
      .def_readwrite("p", &CostParams::p);

  py::class_<PipelineState>(m, "PipelineState")
      .def(py::init<double, std::vector<double>>(), py::arg("on_hand"), py::arg("outstanding") = std::vector<double>{})
      .def_static("zero", &PipelineState::zero, py::arg("tau"))
      .def_readwrite("on_hand", &PipelineState::on_hand)
      .def_readwrite("outstanding", &PipelineState::outstanding)
      .def_property_readonly("lead_time", &PipelineState::lead_time)
      .def_property_readonly("position", &PipelineState::position);

  m.def(
      "step",
      [](const PipelineState& x, double order, double demand, const CostParams& cost) {
        PeriodOutcome o = step(x, order, demand, cost);
        return py::make_tuple(o.next_state, o.end_inventory, o.lost, o.cost);
      },
      py::arg("state"), py::arg("order"), py::arg("demand"), py::arg("cost"),
      "Returns (next_state, end_inventory, lost, cost).");

  m.def(
      "project",
      [](const PipelineState& x, const DemandModel& d, const std::string& backend) {
        ProjectionResult r = project(x, d, backend_for(d, backend));
        py::dict out;
        out["lost"] = r.lost;
        out["total_lost"] = r.total_lost;
        out["expected_level"] = r.expected_level;
        out["std_error"] = r.std_error;
        return out;
      },
      py::arg("state"), py::arg("demand"), py::arg("backend") = "");
  m.def(
      "project_expected_level",
      [](const PipelineState& x, const DemandModel& d, const std::string& backend) {
        return project_expected_level(x, d, backend_for(d, backend));
      },
      py::arg("state"), py::arg("demand"), py::arg("backend") = "");

  py::class_<Policy>(m, "Policy")
      .def("decide", &Policy::decide)
      .def_property_readonly("level", &Policy::level)
      .def_property_readonly("cap", &Policy::cap)
      .def("__repr__", &Policy::describe);
  m.def(
      "parse_policy",
      [](const std::string& text, const DemandModel& d, const CostParams& cost, const std::string& backend) {
        return parse_policy(text, d, cost, backend_for(d, backend));
      },
      py::arg("text"), py::arg("demand"), py::arg("cost") = CostParams{}, py::arg("backend") = "");

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("stream", &SimConfig::stream)
      .def_readwrite("replications", &SimConfig::replications)
      .def_readwrite("periods", &SimConfig::periods)
      .def_readwrite("warmup", &SimConfig::warmup)
      .def_readwrite("ci_target", &SimConfig::ci_target)
      .def_readwrite("max_periods", &SimConfig::max_periods)
      .def_readwrite("confidence", &SimConfig::confidence);

  m.def(
      "estimate_cost",
      [](const Policy& pol, const DemandModel& d, int tau, const CostParams& cost, const SimConfig& cfg) {
        CostEstimate e;
        {
          py::gil_scoped_release release;
          e = estimate_cost(pol, d, tau, cost, cfg);
        }
        return estimate_dict(e);
      },
      py::arg("policy"), py::arg("demand"), py::arg("tau"), py::arg("cost"), py::arg("config") = SimConfig{});
  m.def(
      "estimate_difference",
      [](const Policy& a, const Policy& b, const DemandModel& d, int tau, const CostParams& cost,
         const SimConfig& cfg) {
        PairedEstimate e;
        {
          py::gil_scoped_release release;
          e = estimate_difference_crn(a, b, d, tau, cost, cfg);
        }
        py::dict out;
        out["a"] = estimate_dict(e.a);
        out["b"] = estimate_dict(e.b);
        out["diff_mean"] = e.diff_mean;
        out["diff_ci_halfwidth"] = e.diff_ci_halfwidth;
        out["sq_gap_mean"] = e.sq_gap_mean;
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("demand"), py::arg("tau"), py::arg("cost"), py::arg("config") = SimConfig{});

  m.def(
      "solve_average_cost",
      [](const DemandModel& d, int tau, const CostParams& cost, int cap) {
        MDPConfig cfg;
        cfg.cap = cap;
        MDPResult r;
        {
          py::gil_scoped_release release;
          r = solve_average_cost(d, tau, cost, cfg);
        }
        py::dict out;
        out["gain"] = r.gain;
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        out["cap"] = r.cap;
        out["boundary_mass"] = r.boundary_mass;
        return out;
      },
      py::arg("demand"), py::arg("tau"), py::arg("cost"), py::arg("cap") = 0);

  m.def(
      "solve_backorder",
      [](const DemandModel& d, int tau, const CostParams& cost) {
        BackorderSolution s = solve_backorder(d, tau, cost);
        return py::make_tuple(s.S_star, s.C_star);
      },
      py::arg("demand"), py::arg("tau"), py::arg("cost"), "Returns (S*, C*) of the back-order twin.");

  m.def(
      "optimize_policy",
      [](const std::string& family, const DemandModel& d, int tau, const CostParams& cost, std::uint64_t seed,
         double ci_target) {
        OptimizeConfig cfg = OptimizeConfig::defaults(seed);
        cfg.final.ci_target = ci_target;
        PolicyOptimum o;
        {
          py::gil_scoped_release release;
          o = optimize_policy(parse_family(family), d, tau, cost, cfg);
        }
        py::dict out;
        out["param"] = o.param;
        out["param2"] = o.param2;
        out["search_cost"] = o.search_cost;
        out["evaluations"] = o.evaluations;
        out["flagged"] = o.flagged;
        out["estimate"] = estimate_dict(o.estimate);
        return out;
      },
      py::arg("family"), py::arg("demand"), py::arg("tau"), py::arg("cost"), py::arg("seed") = 1,
      py::arg("ci_target") = 0.01);

  m.def("alpha_D", &alpha_D, py::arg("demand"), py::arg("cost"));
  m.def(
      "build_grid",
      [](double eps, const DemandModel& d, const CostParams& cost) {
        GuaranteedGrid g = build_grid(eps, d, cost);
        py::dict out;
        out["points"] = g.points;
        out["alpha"] = g.alpha;
        out["n_arith"] = g.n_arith;
        out["n_geom"] = g.n_geom;
        out["cardinality_bound"] = g.cardinality_bound;
        return out;
      },
      py::arg("epsilon"), py::arg("demand"), py::arg("cost"));

  m.def(
      "bias_eval",
      [](double mu, double r, const CostParams& cost, double x) {
        return bias_eval(BiasFunction::make(mu, r, cost), x);
      },
      py::arg("mu"), py::arg("r"), py::arg("cost"), py::arg("x"));
  m.def(
      "bias_rhs",
      [](double mu, double r, const CostParams& cost, double x) {
        return bias_rhs(BiasFunction::make(mu, r, cost), x);
      },
      py::arg("mu"), py::arg("r"), py::arg("cost"), py::arg("x"));
  m.def(
      "verify_bias_fixed_point",
      [](double mu, double r, const CostParams& cost, int points) {
        return verify_bias_fixed_point(BiasFunction::make(mu, r, cost), points);
      },
      py::arg("mu"), py::arg("r"), py::arg("cost"), py::arg("points") = 50);
  m.def("optimal_constant_rate", &optimal_constant_rate, py::arg("mu"), py::arg("cost"));

  m.def(
      "run_testbed",
      [](const std::string& name, const std::string& out_dir, std::uint64_t seed, std::vector<double> cvs,
         std::vector<int> taus, std::vector<double> ps, std::vector<std::string> policies, double ci_target) {
        TestbedOptions opts;
        opts.seed = seed;
        opts.out_dir = out_dir;
        opts.cvs = std::move(cvs);
        opts.taus = std::move(taus);
        opts.ps = std::move(ps);
        opts.policies = std::move(policies);
        opts.ci_target = ci_target;
        TestbedReport rep;
        {
          py::gil_scoped_release release;
          rep = run_testbed(name, opts);
        }
        return rep.files;
      },
      py::arg("name"), py::arg("out_dir"), py::arg("seed") = 1, py::arg("cvs") = std::vector<double>{},
      py::arg("taus") = std::vector<int>{}, py::arg("ps") = std::vector<double>{},
      py::arg("policies") = std::vector<std::string>{}, py::arg("ci_target") = 0.01,
      "Runs a testbed and returns the written file paths.");
}
