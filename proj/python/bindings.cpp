#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phasesketch/analysis.hpp"
#include "phasesketch/exact_oracle.hpp"
#include "phasesketch/model.hpp"
#include "phasesketch/qudit_sim.hpp"
#include "phasesketch/record_store.hpp"
#include "phasesketch/sweep_config.hpp"
#include "phasesketch/vqe_engine.hpp"

namespace py = pybind11;
using namespace phasesketch;

namespace {

HamiltonianParams params_for(const ModelInstance& model, double g) {
  return {model.kind, g};
}

}  // namespace

PYBIND11_MODULE(_phasesketch, m) {
  m.doc() = "Phase-diagram sketching with low-depth variational circuits";

  py::class_<ModelInstance>(m, "Model")
      .def_property_readonly("kind",
                             [](const ModelInstance& self) { return to_string(self.kind); })
      .def_property_readonly("n_sites",
                             [](const ModelInstance& self) { return self.lattice.n_sites; })
      .def_property_readonly("local_dim",
                             [](const ModelInstance& self) { return self.lattice.local_dim; })
      .def_property_readonly("n_subs", &ModelInstance::n_subs)
      .def("__repr__", [](const ModelInstance& self) {
        return "<Model " + to_string(self.kind) + " n_sites=" +
               std::to_string(self.lattice.n_sites) + ">";
      });

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("model_kind", &RunRecord::model_kind)
      .def_readonly("lattice_size", &RunRecord::lattice_size)
      .def_readonly("g", &RunRecord::g)
      .def_readonly("p", &RunRecord::p)
      .def_readonly("seed", &RunRecord::seed)
      .def_property_readonly(
          "init_strategy", [](const RunRecord& self) { return to_string(self.init_strategy); })
      .def_readonly("theta_final", &RunRecord::theta_final)
      .def_readonly("sub_expectations", &RunRecord::sub_expectations)
      .def_readonly("energy", &RunRecord::energy)
      .def_readonly("order_params", &RunRecord::order_params)
      .def_readonly("iterations", &RunRecord::iterations)
      .def_readonly("converged", &RunRecord::converged)
      .def_readonly("best", &RunRecord::best)
      .def_readonly("exact_e0", &RunRecord::exact_e0)
      .def_readonly("exact_fidelity", &RunRecord::exact_fidelity)
      .def("to_json", [](const RunRecord& self) { return record_to_json(self); });

  m.def("build_model",
        [](const std::string& kind, int size) {
          return build_model(model_kind_from_string(kind), size);
        },
        py::arg("kind"), py::arg("size"),
        "Model instance for 'tfim-1d', 'tfim-2d', 'bbc', or 'ssh-2d'.");

  m.def("coefficients",
        [](const ModelInstance& model, double g) { return coefficients(model, params_for(model, g)); },
        py::arg("model"), py::arg("g"));

  m.def("ground_state",
        [](const ModelInstance& model, double g) {
          const auto gs = ground_space(model, params_for(model, g));
          return py::make_tuple(gs.energy, gs.degeneracy, gs.gap);
        },
        py::arg("model"), py::arg("g"),
        "Exact (energy, degeneracy, gap) from the oracle backend.");

  m.def("minimize",
        [](const ModelInstance& model, double g, int p, std::uint64_t seed, int max_iters) {
          MinimizeOptions opts;
          opts.lbfgs.max_iters = max_iters;
          return minimize(model, params_for(model, g), p, random_init(model, p, seed), opts);
        },
        py::arg("model"), py::arg("g"), py::arg("p"), py::arg("seed") = 1,
        py::arg("max_iters") = 200,
        "One VQE descent from a seeded random initialisation.");

  m.def("run_sweep",
        [](const std::string& config_json) { return run_sweep(parse_sweep_config(config_json)); },
        py::arg("config_json"),
        "Full three-stage sweep from a JSON config string; returns all records.");

  m.def("exp_fit",
        [](const std::vector<int>& p_values, const std::vector<double>& energies) {
          const auto fit = exp_fit(p_values, energies);
          return py::make_tuple(fit.a, fit.gamma, fit.e0_fit, fit.residual);
        },
        py::arg("p_values"), py::arg("energies"),
        "(a, gamma, e0_fit, residual) of E(p) = a exp(-gamma p) + e0.");
}
