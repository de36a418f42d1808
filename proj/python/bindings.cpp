#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "liquidate/experiments.hpp"
#include "liquidate/signal_lsmc.hpp"

namespace py = pybind11;
using namespace liq;

namespace {

KernelSpec kernel_from(const std::string& name, const py::kwargs& kw) {
  auto get = [&](const char* key, double dflt) { return kw.contains(key) ? kw[key].cast<double>() : dflt; };
  KernelSpec k;
  if (name == "exponential") k = Exponential{get("beta", 1.0), get("scale", 1.0)};
  else if (name == "truncated_power_law") k = TruncatedPowerLaw{get("c0", 1.0), get("beta", 0.5)};
  else if (name == "power_law") k = PowerLaw{get("alpha", 0.25)};
  else if (name == "constant") k = Constant{get("c", 0.0)};
  else throw py::value_error("unknown kernel '" + name + "'");
  validate(k);
  return k;
}

py::dict summary_dict(const ExperimentConfig& cfg, const ExperimentResult& res) {
  py::module_ json = py::module_::import("json");
  return json.attr("loads")(summary_json(cfg, res).dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Propagator-model optimal liquidation: simulation, estimation, control and regret experiments";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Grid>(m, "Grid")
      .def(py::init(&make_grid), py::arg("T"), py::arg("n"))
      .def_readonly("T", &Grid::T)
      .def_readonly("n", &Grid::n)
      .def_readonly("h", &Grid::h)
      .def("nodes", &Grid::nodes)
      .def("__repr__", [](const Grid& g) { return "Grid(T=" + std::to_string(g.T) + ", n=" + std::to_string(g.n) + ")"; });

  m.def(
      "cell_averages",
      [](const std::string& kernel, const Grid& g, const py::kwargs& kw) {
        return cell_averaged_values(kernel_from(kernel, kw), g).values;
      },
      py::arg("kernel"), py::arg("grid"), "Exact cell averages of a named kernel on the grid.");

  m.def(
      "min_convolution_eig", [](const Grid& g, const Vec& G) { return min_convolution_eig(DiscreteFn(g, G)); },
      py::arg("grid"), py::arg("G"));

  m.def(
      "is_admissible",
      [](const Grid& g, double lambda, const Vec& G, double L, double eps) {
        return is_admissible(Theta{lambda, DiscreteFn(g, G)}, AdmissibleSet{L, eps});
      },
      py::arg("grid"), py::arg("lam"), py::arg("G"), py::arg("L") = 10.0, py::arg("eps") = 0.01);

  m.def(
      "singular_values",
      [](const Grid& g, const Vec& ue) { return svd_kernel(galerkin_conv_operator(DiscreteFn(g, ue))).sigma; },
      py::arg("grid"), py::arg("ue"), "Singular values of the convolution with a piecewise-constant strategy.");

  m.def(
      "schedule",
      [](int N, const Grid& g, bool singular, double alpha, double eta, double C, double C_pi) {
        EstimatorConfig cfg{singular ? KernelType::Singular : KernelType::Regular, alpha, eta, C, C_pi};
        const Schedule s = schedule(N, cfg, g);
        return py::make_tuple(s.tau, s.mesh, s.cells);
      },
      py::arg("N"), py::arg("grid"), py::arg("singular") = false, py::arg("alpha") = 0.25, py::arg("eta") = 0.1,
      py::arg("C") = 1.0, py::arg("C_pi") = 1.0, "Returns (tau, mesh, cells).");

  m.def(
      "lsmc_hyperparams",
      [](int M, double vartheta) {
        const LsmcConfig c = lsmc_hyperparams(M, vartheta);
        return py::make_tuple(c.N, c.K, c.R);
      },
      py::arg("M"), py::arg("vartheta"), "Returns (N, K, R).");

  m.def("exploration_indices", &exploration_indices, py::arg("m0"), py::arg("kappa"), py::arg("m"));
  m.def("initial_explorations", &initial_explorations, py::arg("eta"), py::arg("C") = 1.0);

  m.def(
      "greedy_rollout",
      [](const Grid& g, double lambda, const Vec& G, double phi, double rho, double q, const Vec& I, double beta) {
        if (I.size() != g.n + 1) throw py::value_error("I must have n + 1 entries");
        const Theta th{lambda, DiscreteFn(g, G)};
        const auto ca = std::make_shared<ControlAssembly>(th, CostParams{phi, rho, q});
        SignalPath sig{I, Vec::Zero(g.n + 1)};
        for (int i = 0; i < g.n; ++i) sig.A[i + 1] = sig.A[i] + g.h * I[i];
        return rollout_control(greedy_control(ca, std::make_shared<OuCondExp>(beta)), sig, g);
      },
      py::arg("grid"), py::arg("lam"), py::arg("G"), py::arg("phi"), py::arg("rho"), py::arg("q"), py::arg("I"),
      py::arg("beta") = 1.0, "Greedy control along a given signal path, with OU conditional means.");

  m.def(
      "run_experiment",
      [](const std::string& experiment, const std::string& config_text, py::object seed, py::object replications,
         py::object out_dir) {
        ExperimentConfig cfg = parse_config(config_text, experiment);
        if (!seed.is_none()) cfg.seed = seed.cast<std::uint64_t>();
        if (!replications.is_none()) cfg.replications = replications.cast<int>();
        resolve(cfg);
        ExperimentResult res;
        {
          py::gil_scoped_release release;
          res = run_experiment(cfg);
        }
        if (!out_dir.is_none()) emit(cfg, res, out_dir.cast<std::string>());
        py::dict files;
        for (const auto& [name, text] : res.files) files[py::str(name)] = py::str(text);
        return py::make_tuple(summary_dict(cfg, res), files);
      },
      py::arg("experiment"), py::arg("config") = "", py::arg("seed") = py::none(),
      py::arg("replications") = py::none(), py::arg("out_dir") = py::none(),
      "Runs one experiment; returns (summary, {relative path: csv text}).");

  m.attr("__version__") = kLibraryVersion;
}
