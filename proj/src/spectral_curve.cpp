#include "extsource/spectral_curve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "extsource/quadrature.hpp"

namespace extsource {

SpectralCurve SpectralCurve::pastur(double a) {
  if (a <= 0.0) throw std::invalid_argument("pastur: a must be positive");
  SpectralCurve c(CurveKind::quadratic, a, Poly({0.0, -1.0}), Poly({1.0 - a * a}), Poly({0.0, a * a}));
  return c;
}

SpectralCurve SpectralCurve::mclaughlin(double t, double a, double alpha, double beta) {
  if (a <= 0.0) throw std::invalid_argument("mclaughlin: a must be positive");
  SpectralCurve c(CurveKind::quartic, a, Poly({0.0, t, 0.0, -1.0}), Poly({alpha, 0.0, 1.0}),
                  Poly({0.0, beta, 0.0, a * a}));
  c.quartic_ = QuarticParams{t, a, alpha, beta};
  return c;
}

SpectralCurve SpectralCurve::generic(const EvenPolynomial& V, double a, Poly p1, Poly p0) {
  if (a <= 0.0) throw std::invalid_argument("generic curve: a must be positive");
  // z -> -z symmetry of the surface requires p1 even and p0 odd
  for (std::size_t k = 0; k < p1.coeffs().size(); ++k)
    if (k % 2 == 1 && p1.coeffs()[k] != 0.0) throw std::invalid_argument("p1 must be even in z");
  for (std::size_t k = 0; k < p0.coeffs().size(); ++k)
    if (k % 2 == 0 && p0.coeffs()[k] != 0.0) throw std::invalid_argument("p0 must be odd in z");
  return SpectralCurve(CurveKind::generic, a, V.deriv_poly() * -1.0, std::move(p1), std::move(p0));
}

Poly SpectralCurve::discriminant() const {
  const Poly& p = p2_;
  const Poly& q = p1_;
  const Poly& r = p0_;
  return 18.0 * (p * q * r) - 4.0 * (p * p * p * r) + (p * p) * (q * q) - 4.0 * (q * q * q) -
         27.0 * (r * r);
}

Poly SpectralCurve::discriminant_in_y() const { return discriminant().even_part_in_y(); }

std::array<Complex, 3> SpectralCurve::roots_at(Complex z) const {
  const Complex p = p2_(z), q = p1_(z), r = p0_(z);
  Eigen::Matrix3cd comp = Eigen::Matrix3cd::Zero();
  comp(0, 2) = -r;
  comp(1, 2) = -q;
  comp(2, 2) = -p;
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(comp, /*computeEigenvectors=*/false);
  return {es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
}

// ---------------------------------------------------------------------------

std::vector<Interval> BranchPointSet::support() const {
  const std::vector<double>& b = real_pairs;  // descending
  std::vector<Interval> res;
  std::size_t k = 0;
  while (k + 1 < b.size()) {
    res.push_back({b[k + 1], b[k]});
    res.push_back({-b[k], -b[k + 1]});
    k += 2;
  }
  if (k < b.size()) res.push_back({-b[k], b[k]});  // innermost interval through 0
  std::sort(res.begin(), res.end(), [](const Interval& u, const Interval& v) { return u.a < v.a; });
  return res;
}

BranchPointSet branch_points(const SpectralCurve& curve, double tol, bool allow_degenerate) {
  Poly dy = curve.discriminant_in_y().trimmed(1e-14);
  BranchPointSet out;

  // deflate the exact root at the origin first: a y-root of multiplicity m
  // there would otherwise split as eps^(1/m) under rounding
  std::vector<double> cs = dy.coeffs();
  double cmax = 0.0;
  for (double c : cs) cmax = std::max(cmax, std::abs(c));
  int origin_mult = 0;
  while (cs.size() > 1 && std::abs(cs.front()) <= 1e-12 * cmax) {
    cs.erase(cs.begin());
    ++origin_mult;
  }
  if (origin_mult > 0) out.double_roots.emplace_back(Complex(0.0, 0.0), 2 * origin_mult);

  std::vector<Complex> roots = poly_roots(Poly(cs));
  if (roots.empty()) {
    out.degenerate = true;
    out.note = "discriminant has no roots away from the origin";
    if (!allow_degenerate) throw std::domain_error("branch_points: " + out.note);
    return out;
  }
  double scale = 0.0;
  for (const Complex& r : roots) scale = std::max(scale, std::abs(r));
  scale = std::max(scale, 1e-12);
  const double cluster_r = 2.0 * tol * scale;  // y-space radius matching relative tol in z

  // greedy clustering
  std::vector<bool> used(roots.size(), false);
  struct Cluster {
    Complex center;
    int mult;
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    Complex sum = roots[i];
    int n = 1;
    used[i] = true;
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (!used[j] && std::abs(roots[j] - sum / static_cast<double>(n)) < cluster_r) {
        sum += roots[j];
        ++n;
        used[j] = true;
      }
    }
    clusters.push_back({sum / static_cast<double>(n), n});
  }

  out.min_cluster_gap = 1e30;
  for (std::size_t i = 0; i < clusters.size(); ++i)
    for (std::size_t j = i + 1; j < clusters.size(); ++j)
      out.min_cluster_gap =
          std::min(out.min_cluster_gap, std::abs(clusters[i].center - clusters[j].center) / scale);
  if (origin_mult > 0)
    for (const Cluster& cl : clusters)
      out.min_cluster_gap = std::min(out.min_cluster_gap, std::abs(cl.center) / scale);
  if (clusters.size() <= 1 && origin_mult == 0) out.min_cluster_gap = 1.0;

  const double axis_tol = tol * scale;
  int n_imag = 0;
  bool bad = false;
  std::string why;
  for (const Cluster& cl : clusters) {
    const Complex y = cl.center;
    if (cl.mult == 1) {
      if (std::abs(y) <= axis_tol) {
        bad = true;
        why = "simple discriminant root at the origin (transition point)";
      } else if (std::abs(y.imag()) <= axis_tol) {
        if (y.real() > 0.0) {
          out.real_pairs.push_back(std::sqrt(y.real()));
        } else {
          ++n_imag;
          out.imaginary_pair = std::sqrt(-y.real());
        }
      } else {
        bad = true;
        why = "simple root off both axes without a symmetric partner";
      }
    } else {
      if (std::abs(y) <= axis_tol) {
        out.double_roots.emplace_back(Complex(0.0, 0.0), 2 * cl.mult);
      } else {
        const Complex zr = std::sqrt(y);
        out.double_roots.emplace_back(zr, cl.mult);
        out.double_roots.emplace_back(-zr, cl.mult);
      }
    }
  }
  std::sort(out.real_pairs.rbegin(), out.real_pairs.rend());

  // ambiguity guard: clusters closer than sqrt(tol) are not trustworthy
  const double guard = std::sqrt(tol);
  if (out.min_cluster_gap < guard) {
    bad = true;
    why = "discriminant root clusters nearly coalesce (near-critical parameters)";
  }
  if (n_imag > 1) {
    bad = true;
    why = "more than one imaginary branch pair";
  }
  const int P = static_cast<int>(out.real_pairs.size());
  if (!bad) {
    if (P == 0) {
      bad = true;
      why = "no real branch points";
    } else if (n_imag == 0 && P % 2 != 0) {
      bad = true;
      why = "odd number of real branch pairs with inactive constraint";
    }
  }
  out.genus = P - 2 + n_imag;
  if (!bad && out.genus < 0) {
    bad = true;
    why = "branch point count implies negative genus";
  }
  out.degenerate = bad;
  out.note = why;
  if (bad && !allow_degenerate) throw std::domain_error("branch_points: " + why);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Tracker {
  const SpectralCurve& curve;
  std::array<Complex, 3> xi;
  Complex z;
  double step_hint = 0.0;  // remembered accepted step length

  static double min_sep(const std::array<Complex, 3>& r) {
    return std::min({std::abs(r[0] - r[1]), std::abs(r[0] - r[2]), std::abs(r[1] - r[2])});
  }

  // match new roots to current labels, minimal total motion over permutations
  static std::array<Complex, 3> match(const std::array<Complex, 3>& cur,
                                      const std::array<Complex, 3>& raw, double& motion) {
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    double best = 1e300;
    std::array<Complex, 3> out{};
    for (const auto& p : perms) {
      const double cost =
          std::abs(raw[p[0]] - cur[0]) + std::abs(raw[p[1]] - cur[1]) + std::abs(raw[p[2]] - cur[2]);
      if (cost < best) {
        best = cost;
        out = {raw[p[0]], raw[p[1]], raw[p[2]]};
      }
    }
    motion = std::max({std::abs(out[0] - cur[0]), std::abs(out[1] - cur[1]), std::abs(out[2] - cur[2])});
    return out;
  }

  // No sheet swap is possible while every root pair moves by less than half
  // its own separation; this leaves the dominant branch free to move fast.
  bool step_ok(const std::array<Complex, 3>& cur, const std::array<Complex, 3>& cand) {
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const double travel = std::abs(cand[i] - cur[i]) + std::abs(cand[j] - cur[j]);
        const double sep = std::min(std::abs(cur[i] - cur[j]), std::abs(cand[i] - cand[j]));
        if (travel > 0.5 * sep) return false;
      }
    return true;
  }

  // walk the straight segment to target with adaptive step control
  void walk_to(Complex target, int max_steps = 200000) {
    int steps = 0;
    while (z != target && steps < max_steps) {
      ++steps;
      const Complex rem = target - z;
      const double rem_len = std::abs(rem);
      double len = step_hint > 0.0 ? std::min(step_hint, rem_len) : rem_len;
      const Complex dir = rem / rem_len;
      for (int h = 0;; ++h) {
        if (h == 60) throw std::domain_error("solve_sheets: sheet tracking stalled near a branch point");
        const Complex znew = (len >= rem_len) ? target : z + dir * len;
        double motion = 0.0;
        const std::array<Complex, 3> cand = match(xi, curve.roots_at(znew), motion);
        if (step_ok(xi, cand) || len < 1e-14 * (1.0 + std::abs(z))) {
          z = znew;
          xi = cand;
          step_hint = 2.0 * len;
          break;
        }
        len *= 0.5;
      }
    }
    if (z != target) throw std::domain_error("solve_sheets: tracking did not reach the target point");
  }
};

double branch_radius(const SpectralCurve& curve) {
  Poly dy = curve.discriminant_in_y().trimmed(1e-14);
  double m = 0.0;
  for (const Complex& y : poly_roots(dy)) m = std::max(m, std::sqrt(std::abs(y)));
  return m;
}

Tracker start_tracker(const SpectralCurve& curve, double R, double theta) {
  const Complex z0 = std::polar(R, theta);
  const std::array<Complex, 3> raw = curve.roots_at(z0);
  const double a = curve.source_a();
  const Complex t1 = curve.vprime(z0) - 1.0 / z0;
  const Complex t2 = a + 0.5 / z0;
  const Complex t3 = -a + 0.5 / z0;
  // assign xi1 first (it dominates), then xi2/xi3 among the rest
  int i1 = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(raw[k] - t1) < std::abs(raw[i1] - t1)) i1 = k;
  int rest[2], n = 0;
  for (int k = 0; k < 3; ++k)
    if (k != i1) rest[n++] = k;
  int i2 = rest[0], i3 = rest[1];
  if (std::abs(raw[i3] - t2) + std::abs(raw[i2] - t3) < std::abs(raw[i2] - t2) + std::abs(raw[i3] - t3))
    std::swap(i2, i3);
  Tracker tr{curve, {raw[i1], raw[i2], raw[i3]}, z0};
  return tr;
}

}  // namespace

std::array<Complex, 3> solve_sheets(const SpectralCurve& curve, Complex z, double exclusion_rel) {
  const double rad = branch_radius(curve);
  const double scale = 1.0 + rad;
  {
    Poly dy = curve.discriminant_in_y().trimmed(1e-14);
    for (const Complex& y : poly_roots(dy)) {
      const Complex b = std::sqrt(y);
      if (std::min(std::abs(z - b), std::abs(z + b)) < exclusion_rel * scale)
        throw std::domain_error("solve_sheets: z is inside the branch-point exclusion radius");
    }
  }
  const double R = 10.0 * (1.0 + rad);
  if (std::abs(z) >= R) {
    Tracker tr = start_tracker(curve, std::abs(z), std::arg(z));
    return tr.xi;
  }
  Tracker tr = start_tracker(curve, R, std::arg(z));
  tr.walk_to(z);
  return tr.xi;
}

namespace {

// Richardson-extrapolated boundary value Im xi1(x + i0+) from a tracker
// positioned anywhere on the sheet; restores the tracker to x + i eta.
double boundary_density(Tracker& tr, double x, double eta, double eps) {
  tr.walk_to(Complex(x, eta));
  Tracker down = tr;
  down.walk_to(Complex(x, 2.0 * eps));
  const double im2 = down.xi[0].imag();
  down.walk_to(Complex(x, eps));
  const double im1 = down.xi[0].imag();
  return (2.0 * im1 - im2) / std::numbers::pi;
}

}  // namespace

double density_from_curve_at(const SpectralCurve& curve, const BranchPointSet& pts, double x,
                             double eps_rel) {
  const double scale = 1.0 + (pts.real_pairs.empty() ? 1.0 : pts.real_pairs.front());
  const double eps = eps_rel * scale;
  const double eta = 1e-3 * scale;
  Tracker tr = start_tracker(curve, 10.0 * scale, std::arg(Complex(x, eta)));
  return boundary_density(tr, x, eta, eps) ;
}

RealMeasure density_from_curve(const SpectralCurve& curve, const BranchPointSet& pts,
                               int nodes_per_interval, double eps_rel, double neg_tol) {
  const std::vector<Interval> sup = pts.support();
  if (sup.empty()) throw std::domain_error("density_from_curve: empty support");
  std::vector<int> counts;
  std::vector<double> nodes, dens, weights;
  double dmax = 0.0;
  const double scale = 1.0 + pts.real_pairs.front();
  const double eps = eps_rel * scale;
  const double eta = 1e-3 * scale;
  for (const Interval& iv : sup) {
    QuadRule r = angle_rule(iv.a, iv.b, nodes_per_interval);
    counts.push_back(nodes_per_interval);
    // one tracker per interval, walked along the nodes at height eta
    Tracker tr = start_tracker(curve, 10.0 * scale, std::arg(Complex(r.nodes[0], eta)));
    for (int k = 0; k < nodes_per_interval; ++k) {
      const double d = boundary_density(tr, r.nodes[k], eta, eps);
      nodes.push_back(r.nodes[k]);
      dens.push_back(d);
      weights.push_back(r.weights[k]);
      dmax = std::max(dmax, d);
    }
  }
  for (double& d : dens) {
    if (d < -neg_tol * std::max(dmax, 1.0))
      throw std::domain_error("density_from_curve: negative density (inconsistent curve parameters)");
    d = std::max(d, 0.0);
  }
  return RealMeasure::from_samples(sup, counts, std::move(nodes), std::move(dens), std::move(weights));
}

}  // namespace extsource
