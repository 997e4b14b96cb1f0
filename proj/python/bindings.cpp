// pybind11 bindings for the main operations: coupling evaluation, mechanics
// solutions, decoupling functions, QFI expressions, and the Fock-space oracle.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "omqfi/cli.hpp"
#include "omqfi/coupling.hpp"
#include "omqfi/fcoeffs.hpp"
#include "omqfi/mechanics.hpp"
#include "omqfi/oracle.hpp"
#include "omqfi/qfi.hpp"

namespace py = pybind11;
using namespace omqfi;

namespace {

QfiResult qfi_pipeline_py(const CouplingSpec& spec, double tau, std::complex<double> mu,
                          double r_T) {
    return qfi_pipeline(spec, tau, ProbeState{mu, r_T});
}

double qfi_oracle_py(const CouplingSpec& spec, std::complex<double> mu, double r_T,
                     double tau, int n_cav, int n_mech) {
    const TruncatedSpace space = build_space(n_cav, n_mech);
    OracleConfig cfg;
    cfg.convergence = 1e-7;
    return qfi_oracle(space, spec, ProbeState{mu, r_T}, tau, 0.0, cfg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantum Fisher information bounds for time-dependent nonlinear "
              "optomechanical systems";

    py::enum_<GForm>(m, "GForm")
        .value("Constant", GForm::Constant)
        .value("SineModulated", GForm::SineModulated);
    py::enum_<DriveForm>(m, "DriveForm")
        .value("Zero", DriveForm::Zero)
        .value("Constant", DriveForm::Constant)
        .value("CosModulated", DriveForm::CosModulated);
    py::enum_<Theta>(m, "Theta")
        .value("G0", Theta::G0)
        .value("Epsilon", Theta::Epsilon)
        .value("OmegaG", Theta::OmegaG)
        .value("D1", Theta::D1)
        .value("OmegaD1", Theta::OmegaD1)
        .value("D2", Theta::D2)
        .value("OmegaD2", Theta::OmegaD2);
    py::enum_<Branch>(m, "Branch")
        .value("General", Branch::General)
        .value("Resonant", Branch::Resonant)
        .value("Constant", Branch::Constant)
        .value("Approximate", Branch::Approximate);

    py::class_<CouplingSpec>(m, "CouplingSpec")
        .def(py::init<>())
        .def_readwrite("g_form", &CouplingSpec::g_form)
        .def_readwrite("g0", &CouplingSpec::g0)
        .def_readwrite("epsilon", &CouplingSpec::epsilon)
        .def_readwrite("omega_g", &CouplingSpec::omega_g)
        .def_readwrite("d1_form", &CouplingSpec::d1_form)
        .def_readwrite("d1", &CouplingSpec::d1)
        .def_readwrite("omega_d1", &CouplingSpec::omega_d1)
        .def_readwrite("d2_form", &CouplingSpec::d2_form)
        .def_readwrite("d2", &CouplingSpec::d2)
        .def_readwrite("omega_d2", &CouplingSpec::omega_d2)
        .def_readwrite("theta", &CouplingSpec::theta)
        .def("validate", &CouplingSpec::validate);

    py::class_<ProbeState>(m, "ProbeState")
        .def(py::init([](std::complex<double> mu_c, double r_T) {
                 return ProbeState{mu_c, r_T};
             }),
             py::arg("mu_c"), py::arg("r_T") = 0.0)
        .def_readwrite("mu_c", &ProbeState::mu_c)
        .def_readwrite("r_T", &ProbeState::r_T)
        .def("mu2", &ProbeState::mu2);

    m.def("eval_G", &eval_G);
    m.def("eval_D1", &eval_D1);
    m.def("eval_D2", &eval_D2);
    m.def("r_T_from_temperature", &r_T_from_temperature, py::arg("temperature"),
          py::arg("omega_m"));
    m.def("dimensionful_rescale", &dimensionful_rescale);

    py::class_<MechanicsSolution>(m, "MechanicsSolution")
        .def_readonly("grid", &MechanicsSolution::grid)
        .def_readonly("p11", &MechanicsSolution::p11)
        .def_readonly("p11_dot", &MechanicsSolution::p11_dot)
        .def_readonly("ip22", &MechanicsSolution::ip22)
        .def_readonly("ip22_dot", &MechanicsSolution::ip22_dot)
        .def_readonly("xi", &MechanicsSolution::xi)
        .def_readonly("alpha", &MechanicsSolution::alpha)
        .def_readonly("beta", &MechanicsSolution::beta)
        .def_readonly("j_plus", &MechanicsSolution::j_plus)
        .def_readonly("j_minus", &MechanicsSolution::j_minus)
        .def_readonly("j_b", &MechanicsSolution::j_b)
        .def_readonly("turning_points", &MechanicsSolution::turning_points);

    m.def("solve_mechanics", &solve_mechanics, py::arg("spec"), py::arg("tau_max"),
          py::arg("tol") = 1e-10);
    m.def("rwa_xi", &rwa_xi);

    py::class_<JTriple>(m, "JTriple")
        .def(py::init<>())
        .def_readwrite("plus", &JTriple::plus)
        .def_readwrite("minus", &JTriple::minus)
        .def_readwrite("b", &JTriple::b);
    m.def("extract_J", &extract_J);

    py::class_<FCoefficients>(m, "FCoefficients")
        .def_readonly("f_na", &FCoefficients::f_na)
        .def_readonly("f_na2", &FCoefficients::f_na2)
        .def_readonly("f_bp", &FCoefficients::f_bp)
        .def_readonly("f_bm", &FCoefficients::f_bm)
        .def_readonly("f_nabp", &FCoefficients::f_nabp)
        .def_readonly("f_nabm", &FCoefficients::f_nabm);

    m.def("compute_F",
          [](const CouplingSpec& spec, double tau) { return pipeline_F(spec, tau).f; },
          py::arg("spec"), py::arg("tau"),
          "Quadrature F coefficients at tau (solves the mechanics internally)");

    py::class_<QfiTerms>(m, "QfiTerms")
        .def_readonly("a_block", &QfiTerms::a_block)
        .def_readonly("ab_cross", &QfiTerms::ab_cross)
        .def_readonly("b_block", &QfiTerms::b_block)
        .def_readonly("c_block", &QfiTerms::c_block)
        .def_readonly("fg_block", &QfiTerms::fg_block);
    py::class_<QfiResult>(m, "QfiResult")
        .def_readonly("value", &QfiResult::value)
        .def_readonly("terms", &QfiResult::terms)
        .def_readonly("branch", &QfiResult::branch)
        .def("__float__", [](const QfiResult& r) { return r.value; });

    m.def("qfi_g0_general", &qfi_g0_general);
    m.def("qfi_g0_res", &qfi_g0_res);
    m.def("qfi_g0_res_asymptotic", &qfi_g0_res_asymptotic);
    m.def("qfi_d1_general", &qfi_d1_general);
    m.def("qfi_d1_const", &qfi_d1_const);
    m.def("qfi_d1_res", &qfi_d1_res);
    m.def("qfi_d2_const_app", &qfi_d2_const_app);
    m.def("qfi_d2_res_app", &qfi_d2_res_app);
    m.def("qfi_pipeline", &qfi_pipeline_py, py::arg("spec"), py::arg("tau"),
          py::arg("mu_c"), py::arg("r_T") = 0.0);
    m.def("cramer_rao", [](double qfi, long m_count) -> py::object {
        const auto s = cramer_rao(qfi, m_count);
        if (!s) return py::none();
        return py::float_(*s);
    }, py::arg("qfi"), py::arg("measurements") = 1);

    m.def("qfi_oracle", &qfi_oracle_py, py::arg("spec"), py::arg("mu_c"), py::arg("r_T"),
          py::arg("tau"), py::arg("n_cav"), py::arg("n_mech"),
          "Brute-force truncated-Fock-space QFI");

    py::class_<cli::Table1Row>(m, "Table1Row")
        .def_readonly("label", &cli::Table1Row::label)
        .def_readonly("computed", &cli::Table1Row::computed)
        .def_readonly("reference", &cli::Table1Row::reference)
        .def_readonly("rel_deviation", &cli::Table1Row::rel_deviation);
    py::class_<cli::Table1Report>(m, "Table1Report")
        .def_readonly("rows", &cli::Table1Report::rows)
        .def_readonly("max_rel_deviation", &cli::Table1Report::max_rel_deviation)
        .def_readonly("pass_", &cli::Table1Report::pass);
    m.def("table1", [] { return cli::table1(); });
}
