#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "froglab/errors.hpp"
#include "froglab/frogsim.hpp"
#include "froglab/gf_operator.hpp"
#include "froglab/params.hpp"
#include "froglab/polynomials.hpp"
#include "froglab/verify.hpp"

namespace py = pybind11;
using namespace froglab;

namespace {

struct Poly {
  const MultiPoly* poly;
  std::string name;
};

Poly make_poly(PolyFamily f, int k) { return {&build_poly(f, k), poly_name(f, k)}; }

SimConfig sim_config(const std::string& model, int d, double p, int depth, std::uint64_t reps, std::uint64_t seed,
                     unsigned threads, std::uint64_t step_horizon, bool fm_no_sleepers) {
  SimConfig c;
  c.params = ModelParams::make(d, p);
  c.model = parse_model(model);
  c.depth = depth;
  c.reps = reps;
  c.seed = seed;
  c.threads = threads;
  c.step_horizon = step_horizon;
  c.fm_no_sleepers = fm_no_sleepers;
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_froglab, m) {
  m.attr("__version__") = FROGLAB_VERSION;

  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
  py::register_exception<ResourceLimit>(m, "ResourceLimit", PyExc_RuntimeError);
  py::register_exception<InsufficientEvents>(m, "InsufficientEvents", PyExc_RuntimeError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init(&ModelParams::make), py::arg("d"), py::arg("p"), py::arg("force") = false)
      .def_readonly("d", &ModelParams::d)
      .def_readonly("p", &ModelParams::p)
      .def_property_readonly("pstar", &ModelParams::pstar)
      .def_property_readonly("rho", &ModelParams::rho)
      .def_property_readonly("alpha", &ModelParams::alpha)
      .def("__repr__", [](const ModelParams& mp) {
        return "ModelParams(d=" + std::to_string(mp.d) + ", p=" + std::to_string(mp.p) + ")";
      });

  m.def("pstar", py::overload_cast<int, double>(&pstar), py::arg("d"), py::arg("p"));
  m.def("rho", &rho, py::arg("p"));
  m.def("alpha", &alpha, py::arg("d"), py::arg("p"));
  m.def("q_star", &q_star);
  m.def(
      "c_map",
      [](int d, double p, int k) {
        const AffineMap c = c_map(d, p, k);
        return py::make_tuple(c.slope, c.intercept);
      },
      py::arg("d"), py::arg("p"), py::arg("k"), "(slope, intercept) of c^(k)");
  m.def(
      "critical_drift",
      [](int d) {
        const Rational r = critical_drift(d);
        return py::make_tuple(r.num(), r.den());
      },
      py::arg("d"), "(numerator, denominator) of (d-1)/(2d-1)");

  py::class_<Poly>(m, "Polynomial")
      .def_property_readonly("name", [](const Poly& p) { return p.name; })
      .def_property_readonly("nvars", [](const Poly& p) { return p.poly->nvars(); })
      .def_property_readonly("degree", [](const Poly& p) { return p.poly->total_degree(); })
      .def_property_readonly("terms",
                             [](const Poly& p) {
                               py::list out;
                               for (const auto& t : p.poly->terms())
                                 out.append(py::make_tuple(t.coeff, std::vector<int>(t.exponents.begin(),
                                                                                     t.exponents.end())));
                               return out;
                             })
      .def("__call__", [](const Poly& p, const std::vector<double>& z) { return eval_poly(*p.poly, z); })
      .def("__str__", [](const Poly& p) { return p.poly->to_text(); })
      .def("__repr__", [](const Poly& p) { return p.name + " = " + p.poly->to_text(); });
  m.def("build_P", [](int k) { return make_poly(PolyFamily::kP, k); }, py::arg("k"));
  m.def("build_Q", [](int k) { return make_poly(PolyFamily::kQ, k); }, py::arg("k"));

  m.def(
      "apply_operator",
      [](int d, double p, const std::function<double(double)>& h, double x) {
        return apply_A(ModelParams::make(d, p), h, x);
      },
      py::arg("d"), py::arg("p"), py::arg("h"), py::arg("x"), "(A_{d,p} h)(x) for a callable h on [0,1]");
  m.def(
      "iterate_operator",
      [](int d, double p, int n, std::size_t grid_size, double h0) {
        const auto tr = iterate_A(ModelParams::make(d, p), GridFunction::constant(grid_size, h0), n);
        std::vector<std::vector<double>> values;
        for (const auto& f : tr.functions) values.emplace_back(f.values().begin(), f.values().end());
        const auto grid = tr.functions.front().grid();
        return py::dict(py::arg("grid") = std::vector<double>(grid.begin(), grid.end()), py::arg("values") = values,
                        py::arg("sup") = tr.sup_values, py::arg("repair") = tr.repair_magnitudes);
      },
      py::arg("d"), py::arg("p"), py::arg("n"), py::arg("grid_size") = 1024, py::arg("h0") = 1.0);

  m.def(
      "simulate",
      [](const std::string& model, int d, double p, int depth, std::uint64_t reps, std::uint64_t seed,
         unsigned threads, std::uint64_t step_horizon, bool fm_no_sleepers) {
        const auto cfg = sim_config(model, d, p, depth, reps, seed, threads, step_horizon, fm_no_sleepers);
        std::vector<VisitRecord> recs;
        {
          py::gil_scoped_release release;
          recs = run_replicates(cfg);
        }
        std::vector<std::uint64_t> visits, activated, killed;
        std::vector<bool> d1;
        for (const auto& r : recs) {
          visits.push_back(r.root_visits);
          activated.push_back(r.activated_count());
          killed.push_back(r.frogs_killed);
          d1.push_back(r.d1());
        }
        return py::dict(py::arg("root_visits") = visits, py::arg("activated") = activated,
                        py::arg("frogs_killed") = killed, py::arg("d1") = d1);
      },
      py::arg("model"), py::arg("d"), py::arg("p"), py::arg("depth"), py::arg("reps"), py::arg("seed") = 0,
      py::arg("threads") = 0, py::arg("step_horizon") = 1'000'000, py::arg("fm_no_sleepers") = false);
  m.def(
      "estimate_pgf",
      [](const std::string& model, int d, double p, int depth, std::uint64_t reps, const std::vector<double>& xs,
         std::uint64_t seed, double delta) {
        const auto cfg = sim_config(model, d, p, depth, reps, seed, 0, 1'000'000, false);
        std::vector<EstimateWithCI> est;
        {
          py::gil_scoped_release release;
          est = estimate_pgf(cfg, xs, delta);
        }
        std::vector<std::pair<double, double>> out;
        for (const auto& e : est) out.emplace_back(e.mean, e.halfwidth);
        return out;
      },
      py::arg("model"), py::arg("d"), py::arg("p"), py::arg("depth"), py::arg("reps"), py::arg("xs"),
      py::arg("seed") = 0, py::arg("delta") = 1e-3, "[(estimate, halfwidth)] per x");

  m.def(
      "run_suite",
      [](const std::string& name, int d, double p, std::uint64_t reps, int depth, int start_depth, int j_size,
         std::vector<double> xs, std::uint64_t seed, unsigned threads, double delta) {
        VerifyConfig c;
        c.d = d;
        c.p = p;
        c.reps = reps;
        c.depth = depth;
        c.start_depth = start_depth;
        c.j_size = j_size;
        c.xs = std::move(xs);
        c.seed = seed;
        c.threads = threads;
        c.delta = delta;
        std::vector<CheckReport> reps_out;
        {
          py::gil_scoped_release release;
          reps_out = run_suite(name, c);
        }
        std::vector<std::string> out;
        for (const auto& r : reps_out) out.push_back(r.to_json().dump());
        return out;
      },
      py::arg("name"), py::arg("d") = 3, py::arg("p") = 1.0 / 3.0, py::arg("reps") = 100000, py::arg("depth") = 10,
      py::arg("start_depth") = 4, py::arg("j_size") = 0, py::arg("xs") = std::vector<double>{0, .25, .5, .75},
      py::arg("seed") = 0, py::arg("threads") = 0, py::arg("delta") = 1e-3);

  m.def(
      "check",
      [](const std::string& name, int d, int n, std::size_t grid_size, int n_max) {
        if (name == "vanishing") {
          VanishingOptions v;
          v.n_max = n_max;
          v.grid_size = grid_size;
          return check_vanishing(v).to_json().dump();
        }
        if (name != "ad-le-a2") throw InvalidParameter("unknown check '" + name + "'");
        const auto tr = iterate_A(ModelParams::make(2, 1.0 / 3.0), GridFunction::constant(grid_size, 1.0), n);
        const auto& g = tr.functions.back();
        return check_Ad_le_A2(d, g, g.grid(), 0.0).to_json().dump();
      },
      py::arg("name"), py::arg("d") = 3, py::arg("n") = 10, py::arg("grid_size") = 1024, py::arg("n_max") = 500);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
