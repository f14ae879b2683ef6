#include "extsource/polynomial.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace extsource {

std::vector<Complex> poly_roots(const Poly& p) {
  Poly q = p.trimmed(1e-300);
  const auto& c = q.coeffs();
  const int n = q.degree();
  if (n == 0) return {};
  // scale z -> s*z so coefficients are balanced: s = max |c_k/c_n|^{1/(n-k)}
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    if (c[k] == 0.0) continue;
    s = std::max(s, std::pow(std::abs(c[k] / c[n]), 1.0 / (n - k)));
  }
  if (s == 0.0) s = 1.0;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    // scaled monic coefficients a_k = c_k / (c_n s^{n-k})
    comp(k, n - 1) = -c[k] / (c[n] * std::pow(s, n - k));
    if (k > 0) comp(k, k - 1) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  std::vector<Complex> roots(n);
  for (int k = 0; k < n; ++k) roots[k] = es.eigenvalues()(k) * s;
  return roots;
}

}  // namespace extsource
