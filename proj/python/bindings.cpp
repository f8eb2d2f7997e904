#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdirac/errors.hpp"
#include "qdirac/config.hpp"
#include "qdirac/io.hpp"
#include "qdirac/qcore.hpp"
#include "qdirac/qtrig.hpp"
#include "qdirac/solver.hpp"
#include "qdirac/spectrum.hpp"
#include "qdirac/version.hpp"

#include <memory>
#include <sstream>

namespace py = pybind11;
using namespace qdirac;

PYBIND11_MODULE(_qdirac, m) {
    m.doc() = "q-Dirac spectral solver core";
    m.attr("__version__") = kVersion;

    py::register_exception<NumericError>(m, "QdiracNumericError",
                                         PyExc_ArithmeticError);

    py::class_<QLattice, std::shared_ptr<QLattice>>(m, "QLattice")
        .def_readonly("q", &QLattice::q)
        .def_readonly("a", &QLattice::a)
        .def_readonly("depth", &QLattice::depth)
        .def_readonly("nodes", &QLattice::nodes)
        .def_readonly("ext_node", &QLattice::ext_node)
        .def("node", &QLattice::node)
        .def("__len__", &QLattice::size);

    m.def(
        "build_lattice",
        [](double q, double a, int depth) {
            return std::const_pointer_cast<QLattice>(make_lattice(q, a, depth));
        },
        py::arg("q"), py::arg("a"), py::arg("depth"),
        "Truncated q-geometric grid {a q^n} with extension node a/q");

    py::class_<LatticeFn>(m, "LatticeFn")
        .def(py::init<QLatticePtr, std::vector<double>, std::optional<double>,
                      std::optional<double>>(),
             py::arg("lattice"), py::arg("values"),
             py::arg("ext_value") = std::nullopt,
             py::arg("zero_limit") = std::nullopt)
        .def_property_readonly("values", &LatticeFn::values)
        .def_property_readonly("ext_value", &LatticeFn::ext_value)
        .def_property_readonly("zero_limit", &LatticeFn::zero_limit)
        .def("value", &LatticeFn::value)
        .def("to_csv", [](const LatticeFn& f) { return lattice_fn_csv(f); });

    py::class_<Spinor>(m, "Spinor")
        .def(py::init<LatticeFn, LatticeFn>(), py::arg("y1"), py::arg("y2"))
        .def_readonly("y1", &Spinor::y1)
        .def_readonly("y2", &Spinor::y2);

    m.def("q_diff", &q_diff, py::arg("f"), py::arg("node_index"));
    m.def(
        "q_diff_at_zero",
        [](const LatticeFn& f, double tol) {
            auto r = q_diff_at_zero(f, tol);
            return py::make_tuple(r.value, r.converged, r.spread);
        },
        py::arg("f"), py::arg("tol") = 1e-8,
        "Returns (value, converged, spread)");
    m.def("q_inv_diff", &q_inv_diff, py::arg("f"), py::arg("node_index"));
    m.def("jackson_integral", &jackson_integral, py::arg("f"),
          py::arg("upper_index"));

    py::class_<QTrigContext>(m, "QTrigContext")
        .def(py::init<double, int, int>(), py::arg("q"),
             py::arg("precision_bits") = 53, py::arg("extended_bits") = 256)
        .def_static(
            "binary64_only",
            [](double q) { return std::make_unique<QTrigContext>(q, 53, 53); },
            py::arg("q"))
        .def_property_readonly("q", &QTrigContext::q)
        .def_property_readonly("precision_bits", &QTrigContext::precision_bits)
        .def_property_readonly("extended_bits", &QTrigContext::extended_bits)
        .def_property_readonly("escalation_threshold",
                               &QTrigContext::escalation_threshold)
        .def("pochhammer", &QTrigContext::pochhammer);

    py::enum_<TrigKind>(m, "TrigKind")
        .value("COS", TrigKind::Cos)
        .value("SIN", TrigKind::Sin);

    py::class_<TrigEval>(m, "TrigEval")
        .def_readonly("value", &TrigEval::value)
        .def_readonly("max_term_log2", &TrigEval::max_term_log2)
        .def_readonly("bits_used", &TrigEval::bits_used)
        .def_readonly("precision_loss", &TrigEval::precision_loss);

    m.def("q_pochhammer", &q_pochhammer, py::arg("ctx"), py::arg("n"));
    m.def("q_cos", &q_cos, py::arg("ctx"), py::arg("z"));
    m.def("q_sin", &q_sin, py::arg("ctx"), py::arg("z"));
    m.def("q_cos_eval", &q_cos_eval, py::arg("ctx"), py::arg("z"));
    m.def("q_sin_eval", &q_sin_eval, py::arg("ctx"), py::arg("z"));
    m.def("growth_envelope", &growth_envelope, py::arg("ctx"), py::arg("r"));

    py::class_<ZeroTable>(m, "ZeroTable")
        .def_readonly("q", &ZeroTable::q)
        .def_readonly("zeros", &ZeroTable::zeros)
        .def_readonly("residuals", &ZeroTable::residuals)
        .def_readonly("refinement_tol", &ZeroTable::refinement_tol)
        .def("to_csv", [](const ZeroTable& t) {
            std::ostringstream ss;
            write_zero_table_csv(ss, t);
            return ss.str();
        });

    m.def("trig_zeros", &trig_zeros, py::arg("ctx"), py::arg("kind"),
          py::arg("count"), py::arg("refinement_tol") = 1e-13);

    py::class_<BoundarySpec>(m, "BoundarySpec")
        .def(py::init([](double k11, double k12, double k21, double k22) {
                 BoundarySpec b{k11, k12, k21, k22};
                 validate_boundary(b);
                 return b;
             }),
             py::arg("k11"), py::arg("k12"), py::arg("k21"), py::arg("k22"))
        .def_readonly("k11", &BoundarySpec::k11)
        .def_readonly("k12", &BoundarySpec::k12)
        .def_readonly("k21", &BoundarySpec::k21)
        .def_readonly("k22", &BoundarySpec::k22);

    py::class_<Problem>(m, "Problem")
        .def(py::init<QLatticePtr, LatticeFn, LatticeFn, BoundarySpec>(),
             py::arg("lattice"), py::arg("p"), py::arg("r"), py::arg("boundary"))
        .def_readonly("p", &Problem::p)
        .def_readonly("r", &Problem::r)
        .def_readonly("boundary", &Problem::boundary);

    m.def("zero_potential_problem", &zero_potential_problem, py::arg("lattice"),
          py::arg("boundary"));
    m.def("make_potential", &make_potential, py::arg("descriptor"),
          py::arg("lattice"));

    py::enum_<SolveMethod>(m, "SolveMethod")
        .value("RECURSION", SolveMethod::Recursion)
        .value("INTEGRAL_EQUATION", SolveMethod::IntegralEquation);

    py::class_<SolveFlags>(m, "SolveFlags")
        .def_readonly("overflow", &SolveFlags::overflow)
        .def_readonly("precision_loss", &SolveFlags::precision_loss);

    py::class_<SolutionAtLambda>(m, "SolutionAtLambda")
        .def_readonly("lambda_", &SolutionAtLambda::lambda)
        .def_readonly("phi", &SolutionAtLambda::phi)
        .def_readonly("phi2_ext", &SolutionAtLambda::phi2_ext)
        .def_readonly("method", &SolutionAtLambda::method)
        .def_readonly("residual", &SolutionAtLambda::residual)
        .def_readonly("flags", &SolutionAtLambda::flags)
        .def_readonly("iterations", &SolutionAtLambda::iterations)
        .def_readonly("last_change", &SolutionAtLambda::last_change);

    m.def("free_solutions", &free_solutions, py::arg("lattice"), py::arg("ctx"),
          py::arg("lambda_"));
    m.def("propagate", &propagate, py::arg("problem"), py::arg("lambda_"));
    m.def("successive_approx", &successive_approx, py::arg("problem"),
          py::arg("ctx"), py::arg("lambda_"), py::arg("tol") = 1e-12,
          py::arg("max_iter") = 200);
    m.def("wronskian", &wronskian, py::arg("s1"), py::arg("s2"),
          py::arg("node_index"));
    m.def("system_defect", &system_defect, py::arg("problem"), py::arg("sol"));

    py::enum_<BoundaryCase>(m, "BoundaryCase")
        .value("CASE_1I", BoundaryCase::Case1i)
        .value("CASE_1II", BoundaryCase::Case1ii)
        .value("CASE_2I", BoundaryCase::Case2i)
        .value("CASE_2II", BoundaryCase::Case2ii);

    m.def("classify_boundary", &classify_boundary, py::arg("boundary"));
    m.def(
        "asymptotic_eigenvalue",
        [](BoundaryCase c, const QLatticePtr& lat, int mm) {
            return asymptotic_eigenvalue(c, *lat, mm);
        },
        py::arg("case_"), py::arg("lattice"), py::arg("m"));

    m.def("char_delta", &char_delta, py::arg("problem"), py::arg("ctx"),
          py::arg("lambda_"));

    py::class_<EigenResult>(m, "EigenResult")
        .def_readonly("index", &EigenResult::index)
        .def_readonly("lambda_", &EigenResult::lambda)
        .def_readonly("phi", &EigenResult::phi)
        .def_readonly("phi2_ext", &EigenResult::phi2_ext)
        .def_readonly("q_norm_sq", &EigenResult::q_norm_sq)
        .def_readonly("delta_prime", &EigenResult::delta_prime)
        .def_readonly("bracket", &EigenResult::bracket)
        .def_readonly("residual", &EigenResult::residual)
        .def_readonly("asymptotic_ratio", &EigenResult::asymptotic_ratio)
        .def_readonly("flags", &EigenResult::flags);

    py::class_<VerificationFlags>(m, "VerificationFlags")
        .def_readonly("reality_ok", &VerificationFlags::reality_ok)
        .def_readonly("orthogonality_ok", &VerificationFlags::orthogonality_ok)
        .def_readonly("simplicity_ok", &VerificationFlags::simplicity_ok)
        .def_readonly("asymptotics_ok", &VerificationFlags::asymptotics_ok)
        .def_readonly("orthogonality_max", &VerificationFlags::orthogonality_max)
        .def_readonly("simplicity_max_defect",
                      &VerificationFlags::simplicity_max_defect)
        .def_readonly("asymptotic_max_dev",
                      &VerificationFlags::asymptotic_max_dev)
        .def_readonly("missed_eigenvalue_warning",
                      &VerificationFlags::missed_eigenvalue_warning)
        .def_readonly("precision_loss", &VerificationFlags::precision_loss);

    py::class_<SpectrumReport>(m, "SpectrumReport")
        .def_readonly("eigenvalues", &SpectrumReport::eigenvalues)
        .def_readonly("orthogonality_matrix",
                      &SpectrumReport::orthogonality_matrix)
        .def_readonly("flags", &SpectrumReport::flags)
        .def("to_json", [](const SpectrumReport& r) { return spectrum_json(r); });

    py::class_<SpectrumOptions>(m, "SpectrumOptions")
        .def(py::init<>())
        .def_readwrite("scan_points_per_octave",
                       &SpectrumOptions::scan_points_per_octave)
        .def_readwrite("refine_tol", &SpectrumOptions::refine_tol)
        .def_readwrite("lead_octaves", &SpectrumOptions::lead_octaves)
        .def_readwrite("orthogonality_tol", &SpectrumOptions::orthogonality_tol)
        .def_readwrite("simplicity_tol", &SpectrumOptions::simplicity_tol)
        .def_readwrite("asymptotic_tol", &SpectrumOptions::asymptotic_tol);

    m.def("find_eigenvalues", &find_eigenvalues, py::arg("problem"),
          py::arg("ctx"), py::arg("count"), py::arg("both_signs") = true,
          py::arg("options") = SpectrumOptions{});

    m.def("q_inner_product", &q_inner_product, py::arg("s1"), py::arg("s2"));
    m.def("simplicity_check", &simplicity_check, py::arg("problem"),
          py::arg("eig"));
    m.def("eigenfunction_asymptotics_check", &eigenfunction_asymptotics_check,
          py::arg("problem"), py::arg("ctx"), py::arg("eig"),
          py::arg("min_index") = 5);
}
