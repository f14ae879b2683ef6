#include "extsource/simplex_qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace extsource {

CellGrid CellGrid::uniform(double lo, double hi, int cells) {
  std::vector<double> e(cells + 1);
  for (int k = 0; k <= cells; ++k) e[k] = lo + (hi - lo) * k / cells;
  return from_edges(std::move(e));
}

CellGrid CellGrid::from_edges(std::vector<double> e) {
  if (e.size() < 2) throw std::invalid_argument("CellGrid needs at least one cell");
  for (std::size_t k = 1; k < e.size(); ++k)
    if (!(e[k] > e[k - 1])) throw std::invalid_argument("CellGrid edges must increase");
  CellGrid g;
  const int n = static_cast<int>(e.size()) - 1;
  g.centers.resize(n);
  g.widths.resize(n);
  for (int k = 0; k < n; ++k) {
    g.centers[k] = 0.5 * (e[k] + e[k + 1]);
    g.widths[k] = e[k + 1] - e[k];
  }
  g.edges = std::move(e);
  return g;
}

namespace {

// F'' (x) = log|x|; F(u) = (u^2/2) log|u| - (3/4) u^2, F(0) = 0
inline double F(double u) {
  if (u == 0.0) return 0.0;
  return 0.5 * u * u * std::log(std::abs(u)) - 0.75 * u * u;
}

}  // namespace

Eigen::MatrixXd log_kernel_matrix(const CellGrid& g) {
  const int n = g.size();
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i) {
    const double a = g.edges[i], b = g.edges[i + 1];
    for (int j = i; j < n; ++j) {
      const double c = g.edges[j], d = g.edges[j + 1];
      const double I = F(b - c) - F(a - c) - F(b - d) + F(a - d);
      const double v = -I / (g.widths[i] * g.widths[j]);
      A(i, j) = v;
      A(j, i) = v;
    }
  }
  return A;
}

Eigen::MatrixXd log_plus_kernel_matrix(const CellGrid& g) {
  if (g.edges.front() < -1e-15) throw std::invalid_argument("log_plus_kernel_matrix: cells must be >= 0");
  const int n = g.size();
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i) {
    const double a = g.edges[i], b = g.edges[i + 1];
    for (int j = i; j < n; ++j) {
      const double c = g.edges[j], d = g.edges[j + 1];
      const double I = F(b + d) - F(a + d) - F(b + c) + F(a + c);
      const double v = -I / (g.widths[i] * g.widths[j]);
      B(i, j) = v;
      B(j, i) = v;
    }
  }
  return B;
}

void project_simplex(Eigen::VectorXd& m, double mass) {
  const int n = static_cast<int>(m.size());
  std::vector<double> u(m.data(), m.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, lam = 0.0;
  int rho = 0;
  double run = 0.0;
  for (int k = 0; k < n; ++k) {
    run += u[k];
    const double cand = (run - mass) / (k + 1);
    if (u[k] - cand > 0.0) {
      rho = k + 1;
      css = run;
    }
  }
  lam = (css - mass) / rho;
  for (int k = 0; k < n; ++k) m[k] = std::max(m[k] - lam, 0.0);
}

QpResult solve_simplex_qp(const Eigen::MatrixXd& A, const Eigen::VectorXd& f, const QpOptions& opts,
                          const Eigen::VectorXd& warm) {
  const int n = static_cast<int>(f.size());
  QpResult res;

  // Lipschitz constant 2 lambda_max(A) by power iteration
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double lmax = 1.0;
  for (int it = 0; it < 60; ++it) {
    Eigen::VectorXd w = A * v;
    lmax = w.norm();
    if (lmax == 0.0) break;
    v = w / lmax;
  }
  const double L = 2.0 * std::max(lmax, 1e-12);

  Eigen::VectorXd m = warm.size() == n ? warm : Eigen::VectorXd::Constant(n, opts.mass / n);
  project_simplex(m, opts.mass);
  Eigen::VectorXd y = m, m_new(n), g(n);
  double tk = 1.0;
  auto kkt = [&](const Eigen::VectorXd& mm) {
    g = 2.0 * (A * mm) + f;
    const double gmin = g.minCoeff();
    double worst = 0.0;
    const double thresh = 1e-14 * opts.mass;
    for (int k = 0; k < n; ++k)
      if (mm[k] > thresh) worst = std::max(worst, g[k] - gmin);
    return worst;
  };

  for (int it = 1; it <= opts.max_iters; ++it) {
    g = 2.0 * (A * y) + f;
    m_new = y - g / L;
    project_simplex(m_new, opts.mass);
    const double tk1 = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    if ((m_new - m).dot(g) > 0.0) {  // gradient restart
      y = m_new;
      tk = 1.0;
    } else {
      y = m_new + ((tk - 1.0) / tk1) * (m_new - m);
      tk = tk1;
    }
    m = m_new;
    res.iterations = it;
    if (it % opts.check_every == 0) {
      res.kkt_residual = kkt(m);
      if (res.kkt_residual < opts.kkt_tol) {
        res.converged = true;
        break;
      }
    }
  }
  res.kkt_residual = kkt(m);
  res.converged = res.kkt_residual < opts.kkt_tol;
  res.m = std::move(m);
  return res;
}

}  // namespace extsource
