#pragma once

#include <optional>
#include <string>
#include <vector>

#include "extsource/measures.hpp"
#include "extsource/phase_case.hpp"
#include "extsource/polynomial.hpp"
#include "extsource/potentials.hpp"

namespace extsource {

struct SolverConfig {
  // mu1 grids
  int grid_coarse = 800;        // uniform cells on [-X, X] for the first pass
  int grid_interval = 280;      // cosine-graded cells per support interval
  int grid_band = 18;           // geometric band cells per interval side
  int grid_gap = 64;            // coarse cells spread over the complement
  int refine_passes = 2;
  // axis grid
  int axis_half_nodes = 512;      // solve-time half grid
  int axis_half_nodes_final = 512;  // final measure (mirrored to ~1024 total)
  double y_factor = 20.0;         // truncation Y = y_factor * (1 + max endpoint)
  // outer loop
  double outer_tol = 1e-7;
  int max_outer = 60;
  double theta0 = 0.5;           // damping, halved on energy increase
  int max_restarts = 6;
  double energy_increase_tol = 1e-9;
  // inner QP
  double qp_kkt_tol = 1e-10;
  int qp_max_iters = 60000;
  // extraction
  double support_threshold = 1e-8;  // relative to max density
  int mu1_nodes_final = 256;
  // verification grids
  int check_points_per_interval = 160;
  int check_points_axis = 160;
};

struct VariationalReport {
  double eq_residual_mu1 = 0.0;   // sup over supp(mu1) of the equality defect
  double ineq_margin_mu1 = 0.0;   // min slack off the support
  double eq_residual_mu2 = 0.0;   // sup over the unsaturated axis part
  double ineq_margin_mu2 = 0.0;   // min of U^{mu1} - 2U^{mu2} on the saturated set
  double interior_margin_mu1 = 0.0;  // same margins away from endpoints
  double interior_margin_mu2 = 0.0;
  double ell_std = 0.0;           // spread of the multiplier estimate over the support
};

struct EquilibriumSolution {
  RealMeasure mu1;
  AxisMeasure mu2;
  double c = 0.0;
  double ell = 0.0;
  VariationalReport residuals;
  PhaseCase phase_case = PhaseCase::boundary_critical;
  int iterations = 0;
  double energy = 0.0;
  std::vector<double> energy_history;
  double final_change = 0.0;
  bool singular_flag = false;  // c = 0 with an odd interval count
  std::string note;
};

/// Closed-form second component given mu1: saturation radius c and density.
/// Returns c = 0 when int dmu1/|s| <= 2a, otherwise c solves
/// int dmu1 / sqrt(s^2 + c^2) = 2a.
std::pair<AxisMeasure, double> mu2_from_mu1(const RealMeasure& mu1, double a,
                                            std::optional<double> truncation = std::nullopt,
                                            int half_nodes = 512);

/// The unique c > 0 with int dmu1 / sqrt(s^2 + c^2) = 2a
/// (requires int dmu1/|s| > 2a).
double solve_c(const RealMeasure& mu1, double a);

/// Minimizer of I(mu) + int (V - a|x| - U^{mu2}) dmu over probability measures
/// on [-X, X] (X chosen automatically); pass mu2 = nullptr for no interaction.
RealMeasure mu1_given_mu2(const EvenPolynomial& V, double a, const AxisMeasure* mu2,
                          const SolverConfig& cfg = {});

/// Alternating minimization for the constrained pair (mu1, mu2).
EquilibriumSolution solve(const EvenPolynomial& V, double a, const SolverConfig& cfg = {});

/// Euler-Lagrange residuals of a solution on dense check grids.
VariationalReport variational_report(const EquilibriumSolution& sol, const EvenPolynomial& V,
                                     double a, const SolverConfig& cfg = {});

/// Case-I specialization: the two-measure reformulation on the half lines with
/// fields V(x) -+ ax; reconstructs (mu1, mu2) from the right-half minimizer.
EquilibriumSolution angelesco_solve(const EvenPolynomial& V, double a, const SolverConfig& cfg = {});

}  // namespace extsource
