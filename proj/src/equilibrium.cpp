#include "extsource/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <cstdlib>
#include <iostream>

#include "extsource/quadrature.hpp"
#include "extsource/simplex_qp.hpp"

namespace extsource {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Cloud {
  std::vector<double> x;
  std::vector<double> m;
};

Cloud cloud_of(const RealMeasure& mu) {
  Cloud c;
  c.x = mu.nodes();
  c.m.resize(c.x.size());
  for (std::size_t k = 0; k < c.x.size(); ++k) c.m[k] = mu.weights()[k] * mu.density()[k];
  return c;
}

Cloud cloud_of(const CellGrid& g, const Eigen::VectorXd& mass) {
  Cloud c;
  c.x.assign(g.centers.data(), g.centers.data() + g.size());
  c.m.assign(mass.data(), mass.data() + mass.size());
  return c;
}

double inv_abs_moment(const Cloud& cl) {
  double scale = 1.0;
  for (double x : cl.x) scale = std::max(scale, std::abs(x));
  double s = 0.0;
  for (std::size_t k = 0; k < cl.x.size(); ++k) {
    if (cl.m[k] <= 0.0) continue;
    if (std::abs(cl.x[k]) < 1e-12 * scale) return kInf;
    s += cl.m[k] / std::abs(cl.x[k]);
  }
  return s;
}

double sqrt_moment(const Cloud& cl, double c) {
  double s = 0.0;
  for (std::size_t k = 0; k < cl.x.size(); ++k)
    s += cl.m[k] / std::sqrt(cl.x[k] * cl.x[k] + c * c);
  return s;
}

double solve_c_cloud(const Cloud& cl, double a) {
  if (!(inv_abs_moment(cl) > 2.0 * a))
    throw std::domain_error("solve_c: constraint is inactive (int dmu1/|s| <= 2a)");
  double hi = 1.0;
  while (sqrt_moment(cl, hi) > 2.0 * a) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-16 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sqrt_moment(cl, mid) > 2.0 * a)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Theorem-driven density of the second component on the axis.
double rho2_at(const Cloud& cl, double a, double c, double y) {
  const double ay = std::abs(y);
  if (c > 0.0 && ay <= c) return a / std::numbers::pi;
  double s = 0.0;
  if (c == 0.0) {
    for (std::size_t k = 0; k < cl.x.size(); ++k)
      s += cl.m[k] * std::abs(cl.x[k]) / (y * y + cl.x[k] * cl.x[k]);
  } else {
    // ay^2 - ay sqrt(ay^2-c^2) written cancellation-free
    const double r = c / ay;
    const double q = c * c / (1.0 + std::sqrt(std::max(0.0, 1.0 - r * r)));
    for (std::size_t k = 0; k < cl.x.size(); ++k) {
      const double x2 = cl.x[k] * cl.x[k];
      s += cl.m[k] * (q + x2) / ((y * y + x2) * std::sqrt(x2 + c * c));
    }
  }
  return s / (2.0 * std::numbers::pi);
}

struct AxisStage {
  AxisMeasure axis;
  double c = 0.0;
};

AxisStage axis_from_cloud(const Cloud& cl, double a, double Y, int half_nodes) {
  AxisStage st;
  const double M0 = inv_abs_moment(cl);
  st.c = (M0 <= 2.0 * a) ? 0.0 : solve_c_cloud(cl, a);
  const double c = st.c;
  st.axis = AxisMeasure::from_density(c, Y, a / std::numbers::pi,
                                      [&cl, a, c](double y) { return rho2_at(cl, a, c, y); },
                                      half_nodes);
  return st;
}

// ---------------------------------------------------------------------------
// box selection

double field_argmin(const EvenPolynomial& V, double a) {
  auto Q = [&](double x) { return V(x) - a * x; };
  double best_x = 1e-3, best = Q(1e-3);
  for (double x = 1e-3; x < 1e3; x *= 1.15) {
    const double v = Q(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  double lo = best_x / 1.3, hi = best_x * 1.3;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = Q(x1), f2 = Q(x2);
  for (int it = 0; it < 100; ++it) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); f1 = Q(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); f2 = Q(x2);
    }
  }
  return 0.5 * (lo + hi);
}

double initial_box(const EvenPolynomial& V, double a) {
  return 1.6 * field_argmin(V, a) + 2.0;
}

// ---------------------------------------------------------------------------
// support detection on a cell grid

std::vector<Interval> detect_support(const CellGrid& g, const Eigen::VectorXd& m, double thr_rel,
                                     const Eigen::VectorXd* grad = nullptr) {
  const int n = g.size();
  Eigen::VectorXd dens = m.array() / g.widths.array();
  const double thr = thr_rel * dens.maxCoeff();
  double gmin = 0.0, slack_tol = 0.0;
  if (grad) {
    gmin = grad->minCoeff();
    slack_tol = 1e-6 * std::max(1.0, std::abs(gmin));
  }
  std::vector<Interval> out;
  int run = -1;
  for (int k = 0; k <= n; ++k) {
    bool on = k < n && dens[k] > thr;
    if (on && grad) on = (*grad)[k] - gmin < slack_tol;  // optimality slack rules out strays
    if (on && run < 0) run = k;
    if (!on && run >= 0) {
      if (k - run >= 4) out.push_back({g.edges[run], g.edges[k]});
      run = -1;
    }
  }
  if (out.empty()) throw std::runtime_error("support detection found no intervals");
  return out;
}

// local square-root fit near an endpoint: density^2 is close to linear there,
// so fit a centered quadratic over the nearest interior cells and take its root
double refine_endpoint(const CellGrid& g, const Eigen::VectorXd& m, const Interval& iv,
                       bool right) {
  const double endpoint = right ? iv.b : iv.a;
  Eigen::VectorXd dens = m.array() / g.widths.array();
  double dmax = 0.0;
  for (int k = 0; k < g.size(); ++k)
    if (g.centers[k] > iv.a && g.centers[k] < iv.b) dmax = std::max(dmax, dens[k]);
  if (dmax <= 0.0) return endpoint;
  // indices of cells strictly inside the interval, nearest the endpoint first
  std::vector<int> idx;
  if (right) {
    for (int k = g.size() - 1; k >= 0; --k)
      if (g.centers[k] > iv.a && g.centers[k] < iv.b && dens[k] > 1e-7 * dmax) idx.push_back(k);
  } else {
    for (int k = 0; k < g.size(); ++k)
      if (g.centers[k] > iv.a && g.centers[k] < iv.b && dens[k] > 1e-7 * dmax) idx.push_back(k);
  }
  if (idx.size() < 6) return endpoint;
  const int nfit = std::min<int>(12, static_cast<int>(idx.size()) / 2 + 3);
  double span = 0.0;
  for (int j = 0; j < nfit; ++j) span = std::max(span, std::abs(g.centers[idx[j]] - endpoint));
  if (span <= 0.0) return endpoint;
  // centered least squares: dens^2 ~ c0 + c1 u + c2 u^2, u = (x - endpoint)/span
  double S[5] = {0, 0, 0, 0, 0}, b0 = 0, b1 = 0, b2 = 0;
  for (int j = 0; j < nfit; ++j) {
    const double u = (g.centers[idx[j]] - endpoint) / span;
    const double y = dens[idx[j]] * dens[idx[j]];
    double up = 1.0;
    for (int p = 0; p < 5; ++p, up *= u) S[p] += up;
    b0 += y;
    b1 += y * u;
    b2 += y * u * u;
  }
  Eigen::Matrix3d M;
  M << S[0], S[1], S[2], S[1], S[2], S[3], S[2], S[3], S[4];
  Eigen::Vector3d cf = M.fullPivLu().solve(Eigen::Vector3d(b0, b1, b2));
  double root_u;
  const double disc = cf[1] * cf[1] - 4.0 * cf[2] * cf[0];
  if (std::abs(cf[2]) < 1e-12 * std::abs(cf[1]) || disc < 0.0) {
    if (cf[1] == 0.0) return endpoint;
    root_u = -cf[0] / cf[1];
  } else {
    const double r1 = (-cf[1] + std::sqrt(disc)) / (2.0 * cf[2]);
    const double r2 = (-cf[1] - std::sqrt(disc)) / (2.0 * cf[2]);
    root_u = std::abs(r1) < std::abs(r2) ? r1 : r2;
  }
  if (std::abs(root_u) > 0.75) return endpoint;  // fit disagrees with the detected edge
  return endpoint + root_u * span;
}

std::vector<Interval> symmetrize(std::vector<Interval> ivs) {
  std::sort(ivs.begin(), ivs.end(), [](const Interval& u, const Interval& v) { return u.a < v.a; });
  const std::size_t n = ivs.size();
  std::vector<Interval> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Interval& L = ivs[k];
    const Interval& R = ivs[n - 1 - k];
    out[k] = {0.5 * (L.a - R.b), 0.5 * (L.b - R.a)};
  }
  if (n % 2 == 1) {
    Interval& mid = out[n / 2];
    const double s = 0.5 * (mid.b - mid.a);
    mid = {-s, s};
  }
  return out;
}

// ---------------------------------------------------------------------------
// adapted grid: cosine-graded cells per interval, geometric bands, coarse gaps

std::vector<double> adapted_edges(const std::vector<Interval>& ivs, double X,
                                  const SolverConfig& cfg) {
  std::vector<double> pos;  // edges at x >= 0
  pos.push_back(0.0);
  pos.push_back(X);
  auto push = [&pos](double e) {
    if (e > 1e-14 && e < pos[1] - 1e-14) pos.push_back(e);
  };
  double band_hw = 0.0;
  for (const Interval& iv : ivs) {
    const double mid = 0.5 * (iv.a + iv.b), h = 0.5 * iv.length();
    const int n = cfg.grid_interval;
    for (int j = 0; j <= n; ++j) {
      const double e = mid - h * std::cos(std::numbers::pi * j / n);
      if (e >= 0.0) push(e);
    }
    // geometric band outside both endpoints
    const double w0 = h * std::pow(std::numbers::pi / n, 2.0);
    const double W = std::max(0.06 * h, 24.0 * w0);
    band_hw = std::max(band_hw, W);
    const int nb = cfg.grid_band;
    const double ratio = std::pow(W / w0, 1.0 / nb);
    double acc = 0.0, wcur = w0;
    for (int j = 0; j < nb; ++j) {
      acc += wcur;
      wcur *= ratio;
      push(iv.b + acc);
      push(iv.a - acc);
    }
  }
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end(),
                        [X](double u, double v) { return std::abs(u - v) < 1e-13 * (1.0 + X); }),
            pos.end());
  // fill remaining wide holes with coarse cells
  std::vector<double> filled;
  filled.push_back(pos[0]);
  const double coarse = 2.0 * X / std::max(cfg.grid_gap, 8);
  for (std::size_t k = 1; k < pos.size(); ++k) {
    const double gap = pos[k] - pos[k - 1];
    if (gap > 1.5 * coarse) {
      const int parts = static_cast<int>(std::ceil(gap / coarse));
      for (int j = 1; j < parts; ++j) filled.push_back(pos[k - 1] + gap * j / parts);
    }
    filled.push_back(pos[k]);
  }
  // mirror to the negative half
  std::vector<double> full;
  for (auto it = filled.rbegin(); it != filled.rend(); ++it)
    if (*it > 0.0) full.push_back(-*it);
  full.insert(full.end(), filled.begin(), filled.end());
  return full;
}

// interpolate cell densities onto x (piecewise constant lookup)
double cell_density_at(const CellGrid& g, const Eigen::VectorXd& m, double x) {
  auto it = std::upper_bound(g.edges.begin(), g.edges.end(), x);
  if (it == g.edges.begin() || it == g.edges.end()) return 0.0;
  const int k = static_cast<int>(it - g.edges.begin()) - 1;
  return m[k] / g.widths[k];
}

// ---------------------------------------------------------------------------
// alternation

struct AltDiag {
  int outer = 0;
  double final_change = 0.0;
  double energy = 0.0;
  std::vector<double> ehist;
  double c = 0.0;
  double theta = 0.0;
  Eigen::VectorXd gradient;  // 2 A m + field at the final iterate
};

double discrete_energy(const Eigen::MatrixXd& A, const Eigen::VectorXd& field0,
                       const Eigen::VectorXd& m, const AxisMeasure& axis,
                       const Eigen::VectorXd& U2) {
  const double I1 = m.dot(A * m);
  const double I12 = m.dot(U2);
  return I1 + log_energy(axis) - I12 + field0.dot(m);
}

Eigen::VectorXd axis_potential_at(const AxisMeasure& axis, const Eigen::VectorXd& xs) {
  Eigen::VectorXd u(xs.size());
  for (int k = 0; k < xs.size(); ++k) u[k] = log_potential(axis, Complex(xs[k], 0.0));
  return u;
}

void run_alternation(const EvenPolynomial& V, double a, const CellGrid& grid,
                     const Eigen::MatrixXd& A, Eigen::VectorXd& m, double Y,
                     const SolverConfig& cfg, double tol, AltDiag& diag) {
  const int n = grid.size();
  Eigen::VectorXd field0(n);
  for (int k = 0; k < n; ++k)
    field0[k] = V(grid.centers[k]) - a * std::abs(grid.centers[k]);

  project_simplex(m, 1.0);
  AxisStage st = axis_from_cloud(cloud_of(grid, m), a, Y, cfg.axis_half_nodes);
  Eigen::VectorXd U2 = axis_potential_at(st.axis, grid.centers);
  double E = discrete_energy(A, field0, m, st.axis, U2);
  diag.ehist.push_back(E);

  double theta = cfg.theta0;
  int restarts = 0;
  QpOptions qopt;
  qopt.mass = 1.0;
  qopt.kkt_tol = cfg.qp_kkt_tol;
  qopt.max_iters = cfg.qp_max_iters;

  for (int it = 1; it <= cfg.max_outer; ++it) {
    const Eigen::VectorXd f = field0 - U2;
    QpResult qp = solve_simplex_qp(A, f, qopt, m);

    bool accepted = false;
    Eigen::VectorXd m_cand;
    AxisStage st_cand;
    Eigen::VectorXd U2_cand;
    double E_cand = 0.0;
    while (!accepted) {
      m_cand = (1.0 - theta) * m + theta * qp.m;
      st_cand = axis_from_cloud(cloud_of(grid, m_cand), a, Y, cfg.axis_half_nodes);
      U2_cand = axis_potential_at(st_cand.axis, grid.centers);
      E_cand = discrete_energy(A, field0, m_cand, st_cand.axis, U2_cand);
      if (E_cand <= E + cfg.energy_increase_tol * std::max(1.0, std::abs(E))) {
        accepted = true;
      } else {
        theta *= 0.5;
        if (++restarts > cfg.max_restarts)
          throw std::runtime_error("solve: energy kept increasing after damping restarts");
      }
    }
    const double change = ((m_cand - m).array() / grid.widths.array()).abs().maxCoeff();
    m = m_cand;
    st = std::move(st_cand);
    U2 = std::move(U2_cand);
    E = E_cand;
    diag.ehist.push_back(E);
    diag.outer = it;
    diag.final_change = change;
    diag.c = st.c;
    diag.theta = theta;
    if (change < tol) break;
  }
  // final undamped half-step: the exact minimizer for the final mu2 projects
  // stray off-support mass (left behind by the damped mixing) to exact zero
  {
    const Eigen::VectorXd f = field0 - U2;
    QpResult qp = solve_simplex_qp(A, f, qopt, m);
    m = qp.m;
    st = axis_from_cloud(cloud_of(grid, m), a, Y, cfg.axis_half_nodes);
    U2 = axis_potential_at(st.axis, grid.centers);
    E = discrete_energy(A, field0, m, st.axis, U2);
    diag.ehist.push_back(E);
    diag.c = st.c;
    diag.gradient = 2.0 * (A * m) + f;
  }
  diag.energy = E;
}

// resample cell densities onto an angle grid through the square-root profile
RealMeasure cells_to_measure(const CellGrid& g, const Eigen::VectorXd& m,
                             const std::vector<Interval>& ivs, int nodes_per_interval) {
  std::vector<int> counts;
  std::vector<double> nodes, dens, weights;
  for (const Interval& iv : ivs) {
    const double mid = 0.5 * (iv.a + iv.b), h = 0.5 * iv.length();
    // collect (theta, h) samples from cells inside, away from the endpoints
    std::vector<double> ths, hs;
    for (int k = 0; k < g.size(); ++k) {
      const double x = g.centers[k];
      if (x <= iv.a + 1.2 * g.widths[k] || x >= iv.b - 1.2 * g.widths[k]) continue;
      const double s2 = (iv.b - x) * (x - iv.a);
      if (s2 <= 0.0) continue;
      ths.push_back(std::acos(std::clamp((x - mid) / h, -1.0, 1.0)));
      hs.push_back((m[k] / g.widths[k]) / std::sqrt(s2));
    }
    if (ths.size() < 4) throw std::runtime_error("too few cells inside a support interval");
    std::reverse(ths.begin(), ths.end());  // ascending theta
    std::reverse(hs.begin(), hs.end());
    auto h_at = [&](double th) {
      if (th <= ths.front()) {
        const double sl = (hs[1] - hs[0]) / (ths[1] - ths[0]);
        return std::max(hs[0] + sl * (th - ths.front()), 0.0);
      }
      if (th >= ths.back()) {
        const std::size_t n = ths.size();
        const double sl = (hs[n - 1] - hs[n - 2]) / (ths[n - 1] - ths[n - 2]);
        return std::max(hs[n - 1] + sl * (th - ths.back()), 0.0);
      }
      auto it = std::lower_bound(ths.begin(), ths.end(), th);
      const std::size_t j = it - ths.begin();
      const double u = (th - ths[j - 1]) / (ths[j] - ths[j - 1]);
      return (1.0 - u) * hs[j - 1] + u * hs[j];
    };
    QuadRule r = angle_rule(iv.a, iv.b, nodes_per_interval);
    counts.push_back(nodes_per_interval);
    for (int k = 0; k < nodes_per_interval; ++k) {
      const double x = r.nodes[k];
      const double th = std::acos(std::clamp((x - mid) / h, -1.0, 1.0));
      const double s2 = std::max((iv.b - x) * (x - iv.a), 0.0);
      nodes.push_back(x);
      dens.push_back(h_at(th) * std::sqrt(s2));
      weights.push_back(r.weights[k]);
    }
  }
  RealMeasure mu = RealMeasure::from_samples(ivs, counts, std::move(nodes), std::move(dens),
                                             std::move(weights));
  // normalize the mass exactly
  const double mass = mu.total_mass();
  if (!(mass > 0.0)) throw std::runtime_error("extracted measure has no mass");
  std::vector<double> d2 = mu.density();
  for (double& d : d2) d /= mass;
  std::vector<int> cnts;
  for (std::size_t k = 0; k < mu.intervals().size(); ++k) {
    auto [lo, hi] = mu.interval_nodes(static_cast<int>(k));
    cnts.push_back(hi - lo);
  }
  return RealMeasure::from_samples(mu.intervals(), cnts, mu.nodes(), std::move(d2), mu.weights());
}

PhaseCase classify_solution(double c, std::size_t n_intervals, bool& singular) {
  const bool active = c > 0.0;
  const bool odd = n_intervals % 2 == 1;
  singular = false;
  if (!active && !odd) return PhaseCase::I;
  if (active && !odd) return PhaseCase::II;
  if (active && odd) return PhaseCase::III;
  singular = true;  // c = 0 with odd N means singular behavior at the origin
  return PhaseCase::I;
}

}  // namespace

// ---------------------------------------------------------------------------
// public operations

std::pair<AxisMeasure, double> mu2_from_mu1(const RealMeasure& mu1, double a,
                                            std::optional<double> truncation, int half_nodes) {
  if (a <= 0.0) throw std::invalid_argument("mu2_from_mu1: a must be positive");
  const Cloud cl = cloud_of(mu1);
  const double Y = truncation.value_or(20.0 * (1.0 + mu1.max_abs_endpoint()));
  AxisStage st = axis_from_cloud(cl, a, Y, half_nodes);
  return {std::move(st.axis), st.c};
}

double solve_c(const RealMeasure& mu1, double a) {
  if (a <= 0.0) throw std::invalid_argument("solve_c: a must be positive");
  return solve_c_cloud(cloud_of(mu1), a);
}

namespace {

struct BoxSolve {
  CellGrid grid;
  Eigen::VectorXd m;
  std::vector<Interval> intervals;
  AltDiag diag;
  int outer_total = 0;
  std::vector<double> ehist;
};

// two-phase alternation in a fixed box; returns cells + detected support
BoxSolve solve_in_box(const EvenPolynomial& V, double a, double X, const SolverConfig& cfg) {
  BoxSolve bs;
  const double Y = cfg.y_factor * (1.0 + X);

  // phase 1: uniform cells
  bs.grid = CellGrid::uniform(-X, X, cfg.grid_coarse);
  Eigen::MatrixXd A = log_kernel_matrix(bs.grid);
  bs.m = Eigen::VectorXd::Zero(bs.grid.size());
  const double x0 = field_argmin(V, a);
  for (int k = 0; k < bs.grid.size(); ++k) {
    const double x = bs.grid.centers[k];
    bs.m[k] = std::max(1.0 - std::pow((std::abs(x) - x0) / (0.6 * (1.0 + x0)), 2.0), 0.0);
  }
  AltDiag d1;
  run_alternation(V, a, bs.grid, A, bs.m, Y, cfg, cfg.outer_tol, d1);
  bs.outer_total += d1.outer;
  bs.ehist = d1.ehist;
  bs.diag = d1;

  const bool dbg = std::getenv("EXTSOURCE_DEBUG") != nullptr;
  for (int pass = 0; pass < cfg.refine_passes; ++pass) {
    std::vector<Interval> raw =
        detect_support(bs.grid, bs.m, cfg.support_threshold, &bs.diag.gradient);
    std::vector<Interval> ivs = raw;
    for (Interval& iv : ivs) {
      const Interval raw_iv = iv;
      iv.a = refine_endpoint(bs.grid, bs.m, raw_iv, /*right=*/false);
      iv.b = refine_endpoint(bs.grid, bs.m, raw_iv, /*right=*/true);
    }
    ivs = symmetrize(ivs);
    if (dbg) {
      std::cerr << "[pass " << pass << "] raw:";
      for (auto& iv : raw) std::cerr << " [" << iv.a << "," << iv.b << "]";
      std::cerr << " refined:";
      for (auto& iv : ivs) std::cerr << " [" << iv.a << "," << iv.b << "]";
      std::cerr << " outer=" << bs.diag.outer << " E=" << bs.diag.energy << "\n";
    }
    bs.intervals = ivs;

    CellGrid fine = CellGrid::from_edges(adapted_edges(ivs, X, cfg));
    Eigen::VectorXd m2(fine.size());
    for (int k = 0; k < fine.size(); ++k)
      m2[k] = std::max(cell_density_at(bs.grid, bs.m, fine.centers[k]), 0.0) * fine.widths[k];
    project_simplex(m2, 1.0);
    Eigen::MatrixXd A2 = log_kernel_matrix(fine);
    AltDiag d2;
    run_alternation(V, a, fine, A2, m2, Y, cfg, cfg.outer_tol * 0.3, d2);
    bs.grid = std::move(fine);
    bs.m = std::move(m2);
    bs.outer_total += d2.outer;
    bs.ehist.insert(bs.ehist.end(), d2.ehist.begin(), d2.ehist.end());
    bs.diag = d2;
  }

  std::vector<Interval> ivs =
      detect_support(bs.grid, bs.m, cfg.support_threshold, &bs.diag.gradient);
  if (dbg) {
    std::cerr << "[final] raw:";
    for (auto& iv : ivs) std::cerr << " [" << iv.a << "," << iv.b << "]";
    std::cerr << "\n";
  }
  for (Interval& iv : ivs) {
    const Interval raw_iv = iv;
    iv.a = refine_endpoint(bs.grid, bs.m, raw_iv, false);
    iv.b = refine_endpoint(bs.grid, bs.m, raw_iv, true);
  }
  bs.intervals = symmetrize(ivs);
  return bs;
}

EquilibriumSolution finish_solution(const EvenPolynomial& V, double a, const BoxSolve& bs,
                                    const SolverConfig& cfg) {
  EquilibriumSolution sol;
  sol.mu1 = cells_to_measure(bs.grid, bs.m, bs.intervals, cfg.mu1_nodes_final);
  auto [axis, c] = mu2_from_mu1(sol.mu1, a, std::nullopt, cfg.axis_half_nodes_final);
  sol.mu2 = std::move(axis);
  sol.c = c;
  sol.iterations = bs.outer_total;
  sol.energy_history = bs.ehist;
  sol.final_change = bs.diag.final_change;

  // multiplier estimate over the support
  double sum = 0.0, sum2 = 0.0;
  int cnt = 0;
  for (const Interval& iv : sol.mu1.intervals()) {
    for (int k = 1; k < 40; ++k) {
      const double x = iv.a + iv.length() * k / 40.0;
      const double v = log_potential(sol.mu2, Complex(x, 0.0)) -
                       2.0 * log_potential(sol.mu1, Complex(x, 0.0)) - V(x) + a * std::abs(x);
      sum += v;
      sum2 += v * v;
      ++cnt;
    }
  }
  sol.ell = sum / cnt;
  sol.residuals.ell_std = std::sqrt(std::max(sum2 / cnt - sol.ell * sol.ell, 0.0));

  sol.phase_case = classify_solution(sol.c, sol.mu1.intervals().size(), sol.singular_flag);
  if (sol.singular_flag) sol.note = "c = 0 with an odd number of support intervals (singular at 0)";
  sol.energy = energy(sol.mu1, sol.mu2, V, a);
  VariationalReport rep = variational_report(sol, V, a, cfg);
  rep.ell_std = sol.residuals.ell_std;
  sol.residuals = rep;
  return sol;
}

}  // namespace

RealMeasure mu1_given_mu2(const EvenPolynomial& V, double a, const AxisMeasure* mu2,
                          const SolverConfig& cfg) {
  if (a < 0.0) throw std::invalid_argument("mu1_given_mu2: a must be nonnegative");
  double X = initial_box(V, a);
  for (int attempt = 0; attempt < 5; ++attempt) {
    CellGrid grid = CellGrid::uniform(-X, X, cfg.grid_coarse);
    Eigen::MatrixXd A = log_kernel_matrix(grid);
    Eigen::VectorXd f(grid.size());
    for (int k = 0; k < grid.size(); ++k) {
      const double x = grid.centers[k];
      f[k] = V(x) - a * std::abs(x) - (mu2 ? log_potential(*mu2, Complex(x, 0.0)) : 0.0);
    }
    QpOptions qopt;
    qopt.kkt_tol = cfg.qp_kkt_tol;
    qopt.max_iters = cfg.qp_max_iters;
    QpResult qp = solve_simplex_qp(A, f, qopt);
    if (!qp.converged)
      throw std::runtime_error("mu1_given_mu2: projected gradient did not reach tolerance; residual " +
                               std::to_string(qp.kkt_residual));
    Eigen::VectorXd grad = 2.0 * (A * qp.m) + f;
    std::vector<Interval> ivs = detect_support(grid, qp.m, cfg.support_threshold, &grad);
    if (std::max(std::abs(ivs.front().a), std::abs(ivs.back().b)) > 0.95 * X) {
      X *= 1.4;
      continue;
    }
    // one adapted pass for endpoint quality
    for (Interval& iv : ivs) {
      const Interval raw_iv = iv;
      iv.a = refine_endpoint(grid, qp.m, raw_iv, false);
      iv.b = refine_endpoint(grid, qp.m, raw_iv, true);
    }
    ivs = symmetrize(ivs);
    CellGrid fine = CellGrid::from_edges(adapted_edges(ivs, X, cfg));
    Eigen::VectorXd m2(fine.size());
    for (int k = 0; k < fine.size(); ++k)
      m2[k] = std::max(cell_density_at(grid, qp.m, fine.centers[k]), 0.0) * fine.widths[k];
    project_simplex(m2, 1.0);
    Eigen::MatrixXd A2 = log_kernel_matrix(fine);
    Eigen::VectorXd f2(fine.size());
    for (int k = 0; k < fine.size(); ++k) {
      const double x = fine.centers[k];
      f2[k] = V(x) - a * std::abs(x) - (mu2 ? log_potential(*mu2, Complex(x, 0.0)) : 0.0);
    }
    QpResult qp2 = solve_simplex_qp(A2, f2, qopt, m2);
    Eigen::VectorXd grad2 = 2.0 * (A2 * qp2.m) + f2;
    std::vector<Interval> ivs2 = detect_support(fine, qp2.m, cfg.support_threshold, &grad2);
    for (Interval& iv : ivs2) {
      const Interval raw_iv = iv;
      iv.a = refine_endpoint(fine, qp2.m, raw_iv, false);
      iv.b = refine_endpoint(fine, qp2.m, raw_iv, true);
    }
    return cells_to_measure(fine, qp2.m, symmetrize(ivs2), cfg.mu1_nodes_final);
  }
  throw std::runtime_error("mu1_given_mu2: support kept escaping the box");
}

EquilibriumSolution solve(const EvenPolynomial& V, double a, const SolverConfig& cfg) {
  if (a <= 0.0) throw std::invalid_argument("solve: a must be positive");
  double X = initial_box(V, a);
  for (int attempt = 0; attempt < 5; ++attempt) {
    BoxSolve bs = solve_in_box(V, a, X, cfg);
    const double outer = std::max(std::abs(bs.intervals.front().a), std::abs(bs.intervals.back().b));
    if (outer > 0.93 * X) {
      X *= 1.35;
      continue;
    }
    return finish_solution(V, a, bs, cfg);
  }
  throw std::runtime_error("solve: support kept escaping the box");
}

VariationalReport variational_report(const EquilibriumSolution& sol, const EvenPolynomial& V,
                                     double a, const SolverConfig& cfg) {
  VariationalReport rep;
  const RealMeasure& mu1 = sol.mu1;
  const AxisMeasure& mu2 = sol.mu2;
  const double ell = sol.ell;

  auto defect = [&](double x) {
    return 2.0 * log_potential(mu1, Complex(x, 0.0)) - log_potential(mu2, Complex(x, 0.0)) + V(x) -
           a * std::abs(x) + ell;
  };

  // condition 1: equality on the support (angle-spaced interior points)
  rep.eq_residual_mu1 = 0.0;
  for (const Interval& iv : mu1.intervals()) {
    const double mid = 0.5 * (iv.a + iv.b), h = 0.5 * iv.length();
    for (int k = 1; k < cfg.check_points_per_interval; ++k) {
      const double th = std::numbers::pi * k / cfg.check_points_per_interval;
      const double x = mid + h * std::cos(th);
      rep.eq_residual_mu1 = std::max(rep.eq_residual_mu1, std::abs(defect(x)));
    }
  }

  // condition 2: inequality off the support
  rep.ineq_margin_mu1 = kInf;
  rep.interior_margin_mu1 = kInf;
  const double Xc = 1.4 * mu1.max_abs_endpoint() + 1.0;
  const int Nc = 6 * cfg.check_points_per_interval;
  for (int k = 0; k <= Nc; ++k) {
    const double x = -Xc + 2.0 * Xc * k / Nc;
    bool inside = false;
    double dist_to_edge = kInf;
    for (const Interval& iv : mu1.intervals()) {
      if (x >= iv.a && x <= iv.b) inside = true;
      dist_to_edge = std::min({dist_to_edge, std::abs(x - iv.a), std::abs(x - iv.b)});
    }
    if (inside) continue;
    const double v = defect(x);
    rep.ineq_margin_mu1 = std::min(rep.ineq_margin_mu1, v);
    if (dist_to_edge > 0.01 * mu1.intervals().front().length())
      rep.interior_margin_mu1 = std::min(rep.interior_margin_mu1, v);
  }

  // condition 3: equality on the unsaturated part of the axis
  rep.eq_residual_mu2 = 0.0;
  const double Ych = 0.75 * mu2.truncation();
  const double c = sol.c;
  for (int k = 0; k <= cfg.check_points_axis; ++k) {
    const double u = static_cast<double>(k) / cfg.check_points_axis;
    const double y = c + (Ych - c) * u * u;  // graded toward the kink at c
    const double v = 2.0 * log_potential(mu2, Complex(0.0, y)) - log_potential(mu1, Complex(0.0, y));
    rep.eq_residual_mu2 = std::max(rep.eq_residual_mu2, std::abs(v));
  }

  // condition 4: strict inequality on the saturated segment
  rep.ineq_margin_mu2 = kInf;
  rep.interior_margin_mu2 = kInf;
  if (c > 0.0) {
    for (int k = 0; k <= cfg.check_points_axis; ++k) {
      const double y = c * k / cfg.check_points_axis * (1.0 - 1e-12);
      const double v = log_potential(mu1, Complex(0.0, y)) - 2.0 * log_potential(mu2, Complex(0.0, y));
      rep.ineq_margin_mu2 = std::min(rep.ineq_margin_mu2, v);
      if (y < 0.99 * c) rep.interior_margin_mu2 = std::min(rep.interior_margin_mu2, v);
    }
  }
  rep.ell_std = sol.residuals.ell_std;
  return rep;
}

EquilibriumSolution angelesco_solve(const EvenPolynomial& V, double a, const SolverConfig& cfg) {
  if (a <= 0.0) throw std::invalid_argument("angelesco_solve: a must be positive");
  double X = initial_box(V, a);

  for (int attempt = 0; attempt < 5; ++attempt) {
    // right-half problem: minimize m^T (2A + B) m + 2 f^T m, mass 1/2
    const int nc = cfg.grid_coarse / 2;
    CellGrid grid = CellGrid::uniform(0.0, X, nc);
    Eigen::MatrixXd Q = 2.0 * log_kernel_matrix(grid) + log_plus_kernel_matrix(grid);
    Eigen::VectorXd f(grid.size());
    for (int k = 0; k < grid.size(); ++k)
      f[k] = 2.0 * (V(grid.centers[k]) - a * grid.centers[k]);
    QpOptions qopt;
    qopt.mass = 0.5;
    qopt.kkt_tol = cfg.qp_kkt_tol;
    qopt.max_iters = cfg.qp_max_iters;
    QpResult qp = solve_simplex_qp(Q, f, qopt);
    Eigen::VectorXd grad = 2.0 * (Q * qp.m) + f;
    std::vector<Interval> ivs = detect_support(grid, qp.m, cfg.support_threshold, &grad);
    if (ivs.back().b > 0.95 * X) {
      X *= 1.4;
      continue;
    }
    for (Interval& iv : ivs) {
      const Interval raw_iv = iv;
      iv.a = refine_endpoint(grid, qp.m, raw_iv, false);
      iv.b = refine_endpoint(grid, qp.m, raw_iv, true);
    }
    if (ivs.front().a <= 1e-3 * X)
      throw std::domain_error(
          "angelesco_solve: right-half support touches the origin (not Case I); use solve()");

    // adapted pass
    std::vector<double> edges;  // within [0, X]
    {
      std::vector<double> tmp = adapted_edges(ivs, X, cfg);
      for (double e : tmp)
        if (e >= 0.0) edges.push_back(e);
      if (edges.front() > 0.0) edges.insert(edges.begin(), 0.0);
    }
    CellGrid fine = CellGrid::from_edges(std::move(edges));
    Eigen::VectorXd m2(fine.size());
    for (int k = 0; k < fine.size(); ++k)
      m2[k] = std::max(cell_density_at(grid, qp.m, fine.centers[k]), 0.0) * fine.widths[k];
    project_simplex(m2, 0.5);
    Eigen::MatrixXd Q2 = 2.0 * log_kernel_matrix(fine) + log_plus_kernel_matrix(fine);
    Eigen::VectorXd f2(fine.size());
    for (int k = 0; k < fine.size(); ++k)
      f2[k] = 2.0 * (V(fine.centers[k]) - a * fine.centers[k]);
    QpResult qp2 = solve_simplex_qp(Q2, f2, qopt, m2);
    Eigen::VectorXd grad2 = 2.0 * (Q2 * qp2.m) + f2;
    std::vector<Interval> ivs2 = detect_support(fine, qp2.m, cfg.support_threshold, &grad2);
    for (Interval& iv : ivs2) {
      const Interval raw_iv = iv;
      iv.a = refine_endpoint(fine, qp2.m, raw_iv, false);
      iv.b = refine_endpoint(fine, qp2.m, raw_iv, true);
    }
    RealMeasure right = cells_to_measure(fine, qp2.m, ivs2, cfg.mu1_nodes_final);
    // scale right-half mass to exactly 1/2 (cells_to_measure normalized to 1)
    std::vector<double> d = right.density();
    for (double& v : d) v *= 0.5;

    // assemble mu1 = mirror + right
    std::vector<Interval> all;
    std::vector<int> counts;
    std::vector<double> nodes, dens, weights;
    const auto& rivs = right.intervals();
    for (int k = static_cast<int>(rivs.size()) - 1; k >= 0; --k) {
      all.push_back({-rivs[k].b, -rivs[k].a});
      auto [lo, hi] = right.interval_nodes(k);
      counts.push_back(hi - lo);
      for (int j = hi - 1; j >= lo; --j) {
        nodes.push_back(-right.nodes()[j]);
        dens.push_back(d[j]);
        weights.push_back(right.weights()[j]);
      }
    }
    for (std::size_t k = 0; k < rivs.size(); ++k) {
      all.push_back(rivs[k]);
      auto [lo, hi] = right.interval_nodes(static_cast<int>(k));
      counts.push_back(hi - lo);
      for (int j = lo; j < hi; ++j) {
        nodes.push_back(right.nodes()[j]);
        dens.push_back(d[j]);
        weights.push_back(right.weights()[j]);
      }
    }
    EquilibriumSolution sol;
    sol.mu1 = RealMeasure::from_samples(all, counts, std::move(nodes), std::move(dens),
                                        std::move(weights));

    if (inv_abs_moment(cloud_of(sol.mu1)) > 2.0 * a)
      throw std::domain_error(
          "angelesco_solve: constraint would be active at this point (not Case I); use solve()");

    auto [axis, c] = mu2_from_mu1(sol.mu1, a, std::nullopt, cfg.axis_half_nodes_final);
    sol.mu2 = std::move(axis);
    sol.c = c;
    sol.iterations = qp.iterations + qp2.iterations;
    sol.phase_case = PhaseCase::I;
    sol.energy = energy(sol.mu1, sol.mu2, V, a);

    double sum = 0.0, sum2 = 0.0;
    int cnt = 0;
    for (const Interval& iv : sol.mu1.intervals())
      for (int k = 1; k < 40; ++k) {
        const double x = iv.a + iv.length() * k / 40.0;
        const double v = log_potential(sol.mu2, Complex(x, 0.0)) -
                         2.0 * log_potential(sol.mu1, Complex(x, 0.0)) - V(x) + a * std::abs(x);
        sum += v;
        sum2 += v * v;
        ++cnt;
      }
    sol.ell = sum / cnt;
    sol.residuals.ell_std = std::sqrt(std::max(sum2 / cnt - sol.ell * sol.ell, 0.0));
    VariationalReport rep = variational_report(sol, V, a, cfg);
    rep.ell_std = sol.residuals.ell_std;
    sol.residuals = rep;
    return sol;
  }
  throw std::runtime_error("angelesco_solve: support kept escaping the box");
}

}  // namespace extsource
