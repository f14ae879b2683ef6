#pragma once

#include <vector>

namespace extsource {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
const QuadRule& gauss_legendre(int order);

/// Gauss-Legendre rule mapped to [a, b].
QuadRule gauss_legendre_on(double a, double b, int order);

/// Composite rule: [a, b] split into `panels` equal panels of `order` points each.
QuadRule composite_gl(double a, double b, int panels, int order = 16);

/// Nodes/weights for integrating rho(x) dx over [a, b] when rho has square-root
/// endpoint behavior: x = m + h cos(theta), theta Gauss-Legendre on [0, pi].
/// Weights include the sin(theta) Jacobian, so sum w_k rho(x_k) ~ integral.
QuadRule angle_rule(double a, double b, int n_nodes);

}  // namespace extsource
