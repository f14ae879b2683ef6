#pragma once

#include "extsource/measures.hpp"
#include "extsource/polynomial.hpp"

namespace extsource {

/// Logarithmic potential U^m(x) = int log(1/|x-y|) dm(y).
/// The logarithmic singularity for x on the support is handled by
/// singularity subtraction against the interpolated density.
double log_potential(const RealMeasure& m, Complex x);
double log_potential(const AxisMeasure& m, Complex x);

/// Cauchy transform F(z) = int dm(s)/(z - s); z must lie off the support.
Complex cauchy_transform(const RealMeasure& m, Complex z);
Complex cauchy_transform(const AxisMeasure& m, Complex z);

/// Logarithmic energy I(m) = int int log(1/|x-y|) dm dm.
/// Atomic measures use the off-diagonal kernel sum (self-energy excluded).
double log_energy(const RealMeasure& m);
double log_energy(const AxisMeasure& m);

/// Mixed energy I(m1, m2) = int U^{m2} dm1, integrated over m1's grid.
double mixed_energy(const RealMeasure& m1, const RealMeasure& m2);
double mixed_energy(const RealMeasure& m1, const AxisMeasure& m2);
/// Same quantity integrated over the axis grid (independent quadrature route).
double mixed_energy_axis_route(const RealMeasure& m1, const AxisMeasure& m2);

/// Energy functional E(mu1, mu2) = I(mu1) + I(mu2) - I(mu1, mu2)
/// + int (V - a|x|) dmu1. Requires masses 1 and 1/2 (within `mass_tol`).
double energy(const RealMeasure& mu1, const AxisMeasure& mu2, const EvenPolynomial& V, double a,
              double mass_tol = 1e-3);

/// The convex split (3/4) I(mu1) + (1/4) I(mu1 - 2 mu2) + int (V - a|x|) dmu1,
/// with the signed-measure energy evaluated through its own quadrature route.
double energy_decomposed(const RealMeasure& mu1, const AxisMeasure& mu2, const EvenPolynomial& V,
                         double a, double mass_tol = 1e-3);

}  // namespace extsource
