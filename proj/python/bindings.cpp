#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "extsource/equilibrium.hpp"
#include "extsource/finite_n.hpp"
#include "extsource/quartic_phase.hpp"
#include "extsource/spectral_curve.hpp"

namespace py = pybind11;
using namespace extsource;

PYBIND11_MODULE(_core, m) {
  m.doc() = "equilibrium measures, spectral curves and finite-n checks for the "
            "Hermitian external source model with even polynomial potential";

  py::class_<EvenPolynomial>(m, "EvenPolynomial")
      .def(py::init<std::vector<double>>(), py::arg("coeffs"))
      .def_static("quadratic", &EvenPolynomial::quadratic)
      .def_static("quartic", &EvenPolynomial::quartic, py::arg("t"))
      .def_property_readonly("coeffs", &EvenPolynomial::coeffs)
      .def_property_readonly("degree", &EvenPolynomial::degree)
      .def("__call__", [](const EvenPolynomial& v, double x) { return v(x); })
      .def("deriv", [](const EvenPolynomial& v, double x) { return v.deriv(x); });

  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>())
      .def_readwrite("a", &Interval::a)
      .def_readwrite("b", &Interval::b)
      .def("__repr__", [](const Interval& iv) {
        return "Interval(" + std::to_string(iv.a) + ", " + std::to_string(iv.b) + ")";
      });

  py::class_<RealMeasure>(m, "RealMeasure")
      .def_static("from_density", &RealMeasure::from_density, py::arg("intervals"), py::arg("rho"),
                  py::arg("nodes_per_interval") = 256)
      .def_static("point_masses", &RealMeasure::point_masses)
      .def_static("uniform", &RealMeasure::uniform, py::arg("intervals"), py::arg("mass") = 1.0,
                  py::arg("nodes_per_interval") = 256)
      .def_static("semicircle", &RealMeasure::semicircle, py::arg("radius") = 1.0,
                  py::arg("nodes") = 512)
      .def_property_readonly("intervals", &RealMeasure::intervals)
      .def_property_readonly("nodes", &RealMeasure::nodes)
      .def_property_readonly("density", &RealMeasure::density)
      .def_property_readonly("weights", &RealMeasure::weights)
      .def("total_mass", &RealMeasure::total_mass)
      .def("density_at", &RealMeasure::density_at)
      .def("cdf", &RealMeasure::cdf);

  py::class_<AxisMeasure>(m, "AxisMeasure")
      .def_property_readonly("truncation", &AxisMeasure::truncation)
      .def_property_readonly("ceiling", &AxisMeasure::ceiling)
      .def_property_readonly("c", &AxisMeasure::c)
      .def_property_readonly("nodes", &AxisMeasure::nodes)
      .def_property_readonly("density", &AxisMeasure::density)
      .def_property_readonly("weights", &AxisMeasure::weights)
      .def("total_mass", &AxisMeasure::total_mass)
      .def("density_at", &AxisMeasure::density_at);

  m.def("log_potential", py::overload_cast<const RealMeasure&, Complex>(&log_potential));
  m.def("log_potential", py::overload_cast<const AxisMeasure&, Complex>(&log_potential));
  m.def("cauchy_transform", py::overload_cast<const RealMeasure&, Complex>(&cauchy_transform));
  m.def("cauchy_transform", py::overload_cast<const AxisMeasure&, Complex>(&cauchy_transform));
  m.def("energy", &energy, py::arg("mu1"), py::arg("mu2"), py::arg("V"), py::arg("a"),
        py::arg("mass_tol") = 1e-3);
  m.def("energy_decomposed", &energy_decomposed, py::arg("mu1"), py::arg("mu2"), py::arg("V"),
        py::arg("a"), py::arg("mass_tol") = 1e-3);

  py::class_<SpectralCurve>(m, "SpectralCurve")
      .def_static("pastur", &SpectralCurve::pastur, py::arg("a"))
      .def_static("mclaughlin", &SpectralCurve::mclaughlin, py::arg("t"), py::arg("a"),
                  py::arg("alpha"), py::arg("beta"))
      .def("roots_at", &SpectralCurve::roots_at)
      .def("discriminant_coeffs", [](const SpectralCurve& c) { return c.discriminant().coeffs(); })
      .def("discriminant_in_y_coeffs",
           [](const SpectralCurve& c) { return c.discriminant_in_y().coeffs(); });

  py::class_<BranchPointSet>(m, "BranchPointSet")
      .def_readonly("real_pairs", &BranchPointSet::real_pairs)
      .def_readonly("imaginary_pair", &BranchPointSet::imaginary_pair)
      .def_readonly("genus", &BranchPointSet::genus)
      .def_readonly("double_roots", &BranchPointSet::double_roots)
      .def_readonly("degenerate", &BranchPointSet::degenerate)
      .def("support", &BranchPointSet::support);

  m.def("branch_points", &branch_points, py::arg("curve"), py::arg("tol") = 1e-6,
        py::arg("allow_degenerate") = false);
  m.def("solve_sheets", &solve_sheets, py::arg("curve"), py::arg("z"),
        py::arg("exclusion_rel") = 1e-6);
  m.def("density_from_curve_at", &density_from_curve_at, py::arg("curve"), py::arg("pts"),
        py::arg("x"), py::arg("eps_rel") = 1e-8);
  m.def("density_from_curve", &density_from_curve, py::arg("curve"), py::arg("pts"),
        py::arg("nodes_per_interval") = 256, py::arg("eps_rel") = 1e-8, py::arg("neg_tol") = 1e-8);

  m.def("d6", &d6, py::arg("t"), py::arg("a"));
  m.def("painleve_a1", &painleve_a1);
  m.def("painleve_a2", &painleve_a2);
  m.def("pearcey_a3", &pearcey_a3);
  m.def("in_genus_one_region", &in_genus_one_region, py::arg("t"), py::arg("a"),
        py::arg("boundary_tol") = 1e-9);

  py::class_<GenusZeroParams>(m, "GenusZeroParams")
      .def_readonly("c_par", &GenusZeroParams::c_par)
      .def_readonly("u", &GenusZeroParams::u)
      .def_readonly("alpha", &GenusZeroParams::alpha)
      .def_readonly("beta", &GenusZeroParams::beta);
  m.def("genus_zero_parameters", &genus_zero_parameters, py::arg("t"), py::arg("a"));

  py::enum_<PhaseCase>(m, "PhaseCase")
      .value("I", PhaseCase::I)
      .value("II", PhaseCase::II)
      .value("III", PhaseCase::III)
      .value("boundary_critical", PhaseCase::boundary_critical);

  py::class_<PhasePoint>(m, "PhasePoint")
      .def_readonly("t", &PhasePoint::t)
      .def_readonly("a", &PhasePoint::a)
      .def_readonly("case_", &PhasePoint::phase_case)
      .def_readonly("genus", &PhasePoint::genus)
      .def_readonly("alpha", &PhasePoint::alpha)
      .def_readonly("beta", &PhasePoint::beta)
      .def_readonly("branch", &PhasePoint::branch)
      .def_readonly("boundary_distance", &PhasePoint::boundary_distance)
      .def_readonly("note", &PhasePoint::note);
  m.def("classify", &classify, py::arg("t"), py::arg("a"), py::arg("cluster_tol") = 1e-6,
        py::arg("boundary_band") = 1e-6);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("grid_coarse", &SolverConfig::grid_coarse)
      .def_readwrite("grid_interval", &SolverConfig::grid_interval)
      .def_readwrite("refine_passes", &SolverConfig::refine_passes)
      .def_readwrite("axis_half_nodes", &SolverConfig::axis_half_nodes)
      .def_readwrite("outer_tol", &SolverConfig::outer_tol)
      .def_readwrite("max_outer", &SolverConfig::max_outer)
      .def_readwrite("theta0", &SolverConfig::theta0)
      .def_readwrite("qp_kkt_tol", &SolverConfig::qp_kkt_tol)
      .def_readwrite("qp_max_iters", &SolverConfig::qp_max_iters)
      .def_readwrite("mu1_nodes_final", &SolverConfig::mu1_nodes_final);

  py::class_<VariationalReport>(m, "VariationalReport")
      .def_readonly("eq_residual_mu1", &VariationalReport::eq_residual_mu1)
      .def_readonly("ineq_margin_mu1", &VariationalReport::ineq_margin_mu1)
      .def_readonly("eq_residual_mu2", &VariationalReport::eq_residual_mu2)
      .def_readonly("ineq_margin_mu2", &VariationalReport::ineq_margin_mu2)
      .def_readonly("interior_margin_mu1", &VariationalReport::interior_margin_mu1)
      .def_readonly("interior_margin_mu2", &VariationalReport::interior_margin_mu2)
      .def_readonly("ell_std", &VariationalReport::ell_std);

  py::class_<EquilibriumSolution>(m, "EquilibriumSolution")
      .def_readonly("mu1", &EquilibriumSolution::mu1)
      .def_readonly("mu2", &EquilibriumSolution::mu2)
      .def_readonly("c", &EquilibriumSolution::c)
      .def_readonly("ell", &EquilibriumSolution::ell)
      .def_readonly("residuals", &EquilibriumSolution::residuals)
      .def_readonly("case_", &EquilibriumSolution::phase_case)
      .def_readonly("iterations", &EquilibriumSolution::iterations)
      .def_readonly("energy", &EquilibriumSolution::energy)
      .def_readonly("energy_history", &EquilibriumSolution::energy_history);

  m.def("mu2_from_mu1", &mu2_from_mu1, py::arg("mu1"), py::arg("a"),
        py::arg("truncation") = std::nullopt, py::arg("half_nodes") = 512);
  m.def("solve_c", &solve_c, py::arg("mu1"), py::arg("a"));
  m.def(
      "mu1_given_mu2",
      [](const EvenPolynomial& V, double a, const AxisMeasure* mu2, const SolverConfig& cfg) {
        return mu1_given_mu2(V, a, mu2, cfg);
      },
      py::arg("V"), py::arg("a"), py::arg("mu2") = nullptr, py::arg("cfg") = SolverConfig{});
  m.def("solve", &solve, py::arg("V"), py::arg("a"), py::arg("cfg") = SolverConfig{},
        py::call_guard<py::gil_scoped_release>());
  m.def("variational_report", &variational_report, py::arg("sol"), py::arg("V"), py::arg("a"),
        py::arg("cfg") = SolverConfig{});
  m.def("angelesco_solve", &angelesco_solve, py::arg("V"), py::arg("a"),
        py::arg("cfg") = SolverConfig{}, py::call_guard<py::gil_scoped_release>());

  py::class_<EnsembleSpec>(m, "EnsembleSpec")
      .def(py::init<EvenPolynomial, double, int>(), py::arg("V"), py::arg("a"), py::arg("n"))
      .def_readonly("a", &EnsembleSpec::a)
      .def_readonly("n", &EnsembleSpec::n);

  py::class_<SampleResult>(m, "SampleResult")
      .def_readonly("snapshots", &SampleResult::snapshots)
      .def_readonly("acceptance_rate", &SampleResult::acceptance_rate)
      .def_readonly("step_size", &SampleResult::step_size)
      .def_readonly("warning", &SampleResult::warning)
      .def("pooled", &SampleResult::pooled);

  py::class_<McmcOptions>(m, "McmcOptions")
      .def(py::init<>())
      .def_readwrite("burn_sweeps", &McmcOptions::burn_sweeps)
      .def_readwrite("thin_sweeps", &McmcOptions::thin_sweeps)
      .def_readwrite("initial_step", &McmcOptions::initial_step);

  m.def("sample_eigenvalues", &sample_eigenvalues, py::arg("spec"), py::arg("chains"),
        py::arg("sweeps"), py::arg("seed"), py::arg("opts") = McmcOptions{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<MopResult>(m, "MopResult")
      .def_readonly("n", &MopResult::n)
      .def_readonly("coeffs", &MopResult::coeffs)
      .def_readonly("zeros", &MopResult::zeros)
      .def_readonly("condition", &MopResult::condition)
      .def("__call__", [](const MopResult& p, double z) { return p(z); });
  m.def("mop_from_moments", &mop_from_moments);

  py::class_<CharPolyPoint>(m, "CharPolyPoint")
      .def_readonly("z", &CharPolyPoint::z)
      .def_readonly("mc_mean", &CharPolyPoint::mc_mean)
      .def_readonly("mc_se", &CharPolyPoint::mc_se)
      .def_readonly("reference", &CharPolyPoint::reference)
      .def_readonly("verdict", &CharPolyPoint::verdict);
  py::class_<CharPolyCheck>(m, "CharPolyCheck")
      .def_readonly("points", &CharPolyCheck::points)
      .def_readonly("all_within_3se", &CharPolyCheck::all_within_3se);
  m.def("avg_char_poly_check", &avg_char_poly_check, py::arg("spec"), py::arg("samples"),
        py::arg("z_points"));

  py::class_<KsReport>(m, "KsReport")
      .def_readonly("distance", &KsReport::distance)
      .def_readonly("n", &KsReport::n)
      .def_readonly("sample_count", &KsReport::sample_count);
  m.def("density_comparison", &density_comparison, py::arg("samples"), py::arg("mu1"));
}
