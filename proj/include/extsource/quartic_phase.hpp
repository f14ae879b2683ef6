#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "extsource/phase_case.hpp"
#include "extsource/spectral_curve.hpp"

namespace extsource {

struct PhasePoint {
  double t = 0.0;
  double a = 0.0;
  PhaseCase phase_case = PhaseCase::boundary_critical;
  int genus = -1;
  double alpha = 0.0;
  double beta = 0.0;
  BranchPointSet branch;
  // Euclidean distances in the (t, a) plane to the transition curves
  // A1 (outer gap/constraint boundary), A2 (inner closing boundary), A3.
  std::array<double, 3> boundary_distance{1e30, 1e30, 1e30};
  std::string note;
};

struct GenusZeroParams {
  double c_par = 0.0;  // largest positive root of the parametrizing sextic
  double u = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct PhaseScanOptions {
  double t_min = 0.0, t_max = 4.0;
  double a_min = 0.03, a_max = 1.5;
  int nt = 50, na = 50;
  int jobs = 0;  // 0 = hardware concurrency
  double boundary_band = 1e-6;
  double cluster_tol = 1e-6;
};

struct PhaseScanResult {
  std::vector<PhasePoint> points;  // row-major: t outer, a inner
  // boundary polylines: (curve id 1..3, t, a)
  std::vector<std::array<double, 3>> boundaries;
};

/// Coefficients (z^0, z^2, z^4, z^6) of the degree-six discriminant factor for
/// the quartic potential x^4/4 - t x^2/2 in the genus-one regime.
std::array<double, 4> d6(double t, double a);

/// Squared-a values of the two genus-transition branches:
/// A1 on t >= sqrt(3); A2 on sqrt(3) <= t <= 2.
double painleve_a1(double t);
double painleve_a2(double t);

/// Squared-a value of the gap-closing-with-saturation branch (all t).
double pearcey_a3(double t);

/// True iff (t, a) lies in the open genus-one region D: the cubic resolvent of
/// d6 has two strictly positive and one strictly negative root.
bool in_genus_one_region(double t, double a, double boundary_tol = 1e-9);

/// The genus-zero parametrization (c, u, alpha, beta); requires (t, a)
/// outside the closed region D.
GenusZeroParams genus_zero_parameters(double t, double a);

/// Full classification of a quartic phase point.
PhasePoint classify(double t, double a, double cluster_tol = 1e-6, double boundary_band = 1e-6);

PhaseScanResult scan(const PhaseScanOptions& opts);

}  // namespace extsource
