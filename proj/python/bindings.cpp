#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qrabi/cli.hpp"
#include "qrabi/error.hpp"
#include "qrabi/metrology.hpp"
#include "qrabi/ptps.hpp"
#include "qrabi/semiclassical.hpp"
#include "qrabi/spectrum.hpp"
#include "qrabi/wavefunction.hpp"

namespace py = pybind11;
using namespace qrabi;

namespace {

ModelParams make_params(double omega, double qubit_splitting, double g2, double chi, double a4) {
  return ModelParams{omega, qubit_splitting, g2, chi, a4};
}

ConvergencePolicy make_policy(std::size_t initial_cutoff, std::size_t max_cutoff, bool vectors) {
  return ConvergencePolicy{initial_cutoff, max_cutoff, vectors};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-photon quantum Rabi model with a quartic term";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<InstabilityError>(m, "InstabilityError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());
  py::register_exception<DegeneracyError>(m, "DegeneracyError", base.ptr());
  py::register_exception<PeakAtEndpointError>(m, "PeakAtEndpointError", base.ptr());

  py::enum_<Spin>(m, "Spin").value("Up", Spin::Up).value("Down", Spin::Down);
  py::enum_<Parameter>(m, "Parameter")
      .value("G2", Parameter::G2)
      .value("ModeFrequency", Parameter::ModeFrequency)
      .value("QubitSplitting", Parameter::QubitSplitting)
      .value("A4", Parameter::A4);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init(&make_params), py::arg("omega") = 1.0, py::arg("qubit_splitting") = 1.0,
           py::arg("g2") = 0.0, py::arg("chi") = 1.0, py::arg("a4") = 0.0)
      .def_readwrite("omega", &ModelParams::omega)
      .def_readwrite("qubit_splitting", &ModelParams::qubit_splitting)
      .def_readwrite("g2", &ModelParams::g2)
      .def_readwrite("chi", &ModelParams::chi)
      .def_readwrite("a4", &ModelParams::a4)
      .def_property_readonly("g_t", &ModelParams::g_t)
      .def_property_readonly("alpha4", &ModelParams::alpha4)
      .def_property_readonly("coupling_ratio", &ModelParams::coupling_ratio)
      .def("validate", &ModelParams::validate)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(omega=" + std::to_string(p.omega) + ", qubit_splitting=" +
               std::to_string(p.qubit_splitting) + ", g2=" + std::to_string(p.g2) +
               ", chi=" + std::to_string(p.chi) + ", a4=" + std::to_string(p.a4) + ")";
      });

  py::class_<FockSpinBasis>(m, "FockSpinBasis")
      .def(py::init<std::size_t>(), py::arg("cutoff"))
      .def_property_readonly("cutoff", &FockSpinBasis::cutoff)
      .def_property_readonly("dim", &FockSpinBasis::dim)
      .def_static("index", &FockSpinBasis::index)
      .def("vacuum", &FockSpinBasis::vacuum)
      .def("fock_state", &FockSpinBasis::fock_state);

  m.def("hamiltonian", [](const ModelParams& p, std::size_t cutoff) {
    return build_hamiltonian(p, FockSpinBasis(cutoff)).dense();
  }, py::arg("params"), py::arg("cutoff"), "Dense Hamiltonian matrix in the (n, spin) basis.");
  m.def("effective_potential", &effective_potential, py::arg("params"), py::arg("spin"), py::arg("x"));
  m.def("parity_expectation", &parity_expectation, py::arg("state"), py::arg("basis"));

  py::class_<ConvergencePolicy>(m, "ConvergencePolicy")
      .def(py::init(&make_policy), py::arg("initial_cutoff") = 64, py::arg("max_cutoff") = 4096,
           py::arg("want_vectors") = true)
      .def_readwrite("initial_cutoff", &ConvergencePolicy::initial_cutoff)
      .def_readwrite("max_cutoff", &ConvergencePolicy::max_cutoff)
      .def_readwrite("want_vectors", &ConvergencePolicy::want_vectors);

  py::class_<SpectrumResult>(m, "SpectrumResult")
      .def_readonly("eigenvalues", &SpectrumResult::eigenvalues)
      .def_readonly("eigenvectors", &SpectrumResult::eigenvectors)
      .def_readonly("parities", &SpectrumResult::parities)
      .def_readonly("gap", &SpectrumResult::gap)
      .def_readonly("cutoff_used", &SpectrumResult::cutoff_used)
      .def_readonly("converged", &SpectrumResult::converged)
      .def_readonly("convergence_delta", &SpectrumResult::convergence_delta);

  m.def("solve_spectrum", [](const ModelParams& p, std::size_t cutoff, std::size_t k, bool vectors) {
    return solve_spectrum(build_hamiltonian(p, FockSpinBasis(cutoff)), k, vectors);
  }, py::arg("params"), py::arg("cutoff"), py::arg("k"), py::arg("want_vectors") = true);
  m.def("converged_spectrum", &converged_spectrum, py::arg("params"), py::arg("k"),
        py::arg("tol") = 1e-8, py::arg("policy") = ConvergencePolicy{}, py::arg("track") = 0);

  py::class_<GapPoint>(m, "GapPoint")
      .def_readonly("g2", &GapPoint::g2)
      .def_readonly("delta", &GapPoint::delta)
      .def_readonly("same_parity_gap", &GapPoint::same_parity_gap)
      .def_readonly("ground_parity", &GapPoint::ground_parity)
      .def_readonly("excited_parity", &GapPoint::excited_parity)
      .def_readonly("cutoff", &GapPoint::cutoff)
      .def_readonly("converged", &GapPoint::converged);
  m.def("gap_at", &gap_at, py::arg("params"), py::arg("tol") = 1e-8,
        py::arg("policy") = ConvergencePolicy{}, py::arg("allow_unconverged") = false);
  m.def("gap_curve", [](const ModelParams& p, const std::vector<double>& grid, double tol,
                        const ConvergencePolicy& policy) { return gap_curve(p, grid, tol, policy); },
        py::arg("params"), py::arg("g2_grid"), py::arg("tol") = 1e-8, py::arg("policy") = ConvergencePolicy{});

  py::class_<PositionWavefunction>(m, "PositionWavefunction")
      .def_readonly("x_grid", &PositionWavefunction::x_grid)
      .def_readonly("psi_plus", &PositionWavefunction::psi_plus)
      .def_readonly("psi_minus", &PositionWavefunction::psi_minus)
      .def_readonly("norm_check", &PositionWavefunction::norm_check);
  m.def("default_position_grid", &default_position_grid, py::arg("cutoff"), py::arg("points") = 1024);
  m.def("hermite_functions", &hermite_functions, py::arg("n_max"), py::arg("x"));
  m.def("to_position", [](const Eigen::VectorXd& state, const FockSpinBasis& basis,
                          const std::vector<double>& grid) { return to_position(state, basis, grid); },
        py::arg("state"), py::arg("basis"), py::arg("x_grid"));
  m.def("observable_sigma_x", &observable_sigma_x, py::arg("state"), py::arg("basis"));
  m.def("observable_x2", [](const Eigen::VectorXd& state, const FockSpinBasis& basis) {
    return observable_x2(state, basis).value;
  }, py::arg("state"), py::arg("basis"));

  py::class_<SemiclassicalSolution>(m, "SemiclassicalSolution")
      .def_readonly("x_min", &SemiclassicalSolution::x_min)
      .def_readonly("energy_min", &SemiclassicalSolution::energy_min)
      .def_readonly("energy_origin", &SemiclassicalSolution::energy_origin)
      .def_readonly("sigma_x_at_min", &SemiclassicalSolution::sigma_x_at_min)
      .def_readonly("symmetric_phase", &SemiclassicalSolution::symmetric_phase);
  m.def("lower_branch", &lower_branch, py::arg("params"), py::arg("x"));
  m.def("minimize_branch", &minimize_branch, py::arg("params"));
  m.def("scaled_params", &scaled_params, py::arg("alpha4"), py::arg("ratio"));
  m.def("critical_ratio_exact", &critical_ratio_exact, py::arg("alpha4"));
  m.def("critical_ratio_small", &critical_ratio_small, py::arg("alpha4"));
  m.def("critical_ratio_large", &critical_ratio_large, py::arg("alpha4"));
  m.def("critical_ratio_numeric", &critical_ratio_numeric, py::arg("alpha4"), py::arg("rel_tol") = 1e-12);

  py::class_<QfiOptions>(m, "QfiOptions")
      .def(py::init<>())
      .def_readwrite("parameter", &QfiOptions::lambda)
      .def_readwrite("delta", &QfiOptions::delta)
      .def_readwrite("energy_tol", &QfiOptions::energy_tol)
      .def_readwrite("policy", &QfiOptions::policy)
      .def_readwrite("degeneracy_factor", &QfiOptions::degeneracy_factor);
  py::class_<QfiPoint>(m, "QfiPoint")
      .def_readonly("value", &QfiPoint::lambda)
      .def_readonly("delta", &QfiPoint::delta)
      .def_readonly("fq", &QfiPoint::fq)
      .def_readonly("chi_f", &QfiPoint::chi_f)
      .def_readonly("overlap_term", &QfiPoint::overlap_term)
      .def_readonly("gap", &QfiPoint::gap)
      .def_readonly("same_parity_gap", &QfiPoint::same_parity_gap)
      .def_readonly("cutoff", &QfiPoint::cutoff)
      .def_readonly("one_sided", &QfiPoint::one_sided);
  py::class_<QfiCurve>(m, "QfiCurve")
      .def_readonly("g2_grid", &QfiCurve::g2_grid)
      .def_readonly("fq", &QfiCurve::fq)
      .def_readonly("chi_f", &QfiCurve::chi_f)
      .def_readonly("e_cr", &QfiCurve::e_cr)
      .def_readonly("peak_g2", &QfiCurve::peak_g2)
      .def_readonly("peak_fq", &QfiCurve::peak_fq)
      .def_readonly("delta_lambda", &QfiCurve::delta_lambda)
      .def_readonly("edge_peak", &QfiCurve::edge_peak);
  m.def("qfi_at", &qfi_at, py::arg("params"), py::arg("options") = QfiOptions{});
  m.def("qfi_curve", [](const ModelParams& p, const std::vector<double>& grid, const QfiOptions& o) {
    return qfi_curve(p, grid, o);
  }, py::arg("params"), py::arg("g2_grid"), py::arg("options") = QfiOptions{});

  py::class_<PtpsOptions>(m, "PtpsOptions")
      .def(py::init<>())
      .def_readwrite("tol", &PtpsOptions::tol)
      .def_readwrite("gap_tol", &PtpsOptions::gap_tol)
      .def_readwrite("policy", &PtpsOptions::policy);
  py::class_<PtpsResult>(m, "PtpsResult")
      .def_readonly("time", &PtpsResult::time)
      .def_readonly("time_same_parity", &PtpsResult::time_same_parity)
      .def_readonly("g2c_omega", &PtpsResult::g2c_omega)
      .def_readonly("quadrature_points", &PtpsResult::quadrature_points)
      .def_readonly("estimated_error", &PtpsResult::estimated_error)
      .def_readonly("min_gap", &PtpsResult::min_gap)
      .def_readonly("max_gap", &PtpsResult::max_gap)
      .def_readonly("parity_crossings", &PtpsResult::parity_crossings)
      .def_readonly("unconverged_nodes", &PtpsResult::unconverged_nodes)
      .def_readonly("nodes", &PtpsResult::nodes);
  m.def("ptps", py::overload_cast<const ModelParams&, double, const PtpsOptions&>(&ptps),
        py::arg("params"), py::arg("g2c_omega"), py::arg("options") = PtpsOptions{});
  m.def("ptps_from_gap", &ptps_from_gap, py::arg("gap"), py::arg("tol") = 1e-8);

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "qrabi");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    py::gil_scoped_release release;
    return cli::main(static_cast<int>(argv.size()), argv.data());
  }, py::arg("args"), "Runs the command-line front end and returns its exit code.");
}
