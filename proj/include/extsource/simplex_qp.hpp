#pragma once

#include <Eigen/Dense>
#include <vector>

namespace extsource {

/// Cell grid on the line: cells [edges[i], edges[i+1]] carrying masses m_i
/// with piecewise-constant density m_i / width_i.
struct CellGrid {
  std::vector<double> edges;
  Eigen::VectorXd centers;
  Eigen::VectorXd widths;

  static CellGrid uniform(double lo, double hi, int cells);
  static CellGrid from_edges(std::vector<double> e);
  int size() const { return static_cast<int>(centers.size()); }
};

/// Exact cell-pair log kernel: A_ij = (1/(w_i w_j)) int int log(1/|x-y|) dx dy.
Eigen::MatrixXd log_kernel_matrix(const CellGrid& g);
/// Same for the reflected kernel log(1/(x+y)) on a grid with positive cells.
Eigen::MatrixXd log_plus_kernel_matrix(const CellGrid& g);

/// Euclidean projection onto { m >= 0, sum m = mass }.
void project_simplex(Eigen::VectorXd& m, double mass);

struct QpResult {
  Eigen::VectorXd m;
  double kkt_residual = 0.0;  // max_i over active of g_i minus min_j g_j
  int iterations = 0;
  bool converged = false;
};

struct QpOptions {
  double mass = 1.0;
  double kkt_tol = 1e-10;
  int max_iters = 60000;
  int check_every = 250;
};

/// Minimize m^T A m + f^T m over the scaled simplex by accelerated projected
/// gradient with adaptive restarts. `warm` seeds the iteration when nonempty.
QpResult solve_simplex_qp(const Eigen::MatrixXd& A, const Eigen::VectorXd& f,
                          const QpOptions& opts, const Eigen::VectorXd& warm = {});

}  // namespace extsource
