#include "extsource/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "extsource/quadrature.hpp"

namespace extsource {

namespace {

void check_disjoint_sorted(const std::vector<Interval>& ivs) {
  for (std::size_t k = 0; k < ivs.size(); ++k) {
    if (!(ivs[k].b > ivs[k].a)) throw std::invalid_argument("interval must satisfy a < b");
    if (k > 0 && !(ivs[k].a > ivs[k - 1].b)) throw std::invalid_argument("intervals must be disjoint and sorted");
  }
}

}  // namespace

RealMeasure RealMeasure::from_density(std::vector<Interval> intervals,
                                      const std::function<double(double)>& rho,
                                      int nodes_per_interval) {
  check_disjoint_sorted(intervals);
  RealMeasure m;
  m.intervals_ = std::move(intervals);
  m.offsets_.push_back(0);
  for (const Interval& iv : m.intervals_) {
    QuadRule r = angle_rule(iv.a, iv.b, nodes_per_interval);
    for (int k = 0; k < nodes_per_interval; ++k) {
      m.nodes_.push_back(r.nodes[k]);
      m.weights_.push_back(r.weights[k]);
      double d = rho(r.nodes[k]);
      if (d < 0.0 && d > -1e-14) d = 0.0;
      m.density_.push_back(d);
    }
    m.offsets_.push_back(static_cast<int>(m.nodes_.size()));
  }
  return m;
}

RealMeasure RealMeasure::from_samples(std::vector<Interval> intervals, std::vector<int> counts,
                                      std::vector<double> nodes, std::vector<double> density,
                                      std::vector<double> weights) {
  check_disjoint_sorted(intervals);
  if (intervals.size() != counts.size()) throw std::invalid_argument("counts size mismatch");
  RealMeasure m;
  m.intervals_ = std::move(intervals);
  m.offsets_.push_back(0);
  for (int c : counts) m.offsets_.push_back(m.offsets_.back() + c);
  if (static_cast<int>(nodes.size()) != m.offsets_.back())
    throw std::invalid_argument("node count mismatch");
  m.nodes_ = std::move(nodes);
  m.density_ = std::move(density);
  m.weights_ = std::move(weights);
  return m;
}

RealMeasure RealMeasure::point_masses(const std::vector<std::pair<double, double>>& location_mass) {
  RealMeasure m;
  m.atomic_ = true;
  std::vector<std::pair<double, double>> pts = location_mass;
  std::sort(pts.begin(), pts.end());
  m.offsets_.push_back(0);
  for (const auto& [x, mass] : pts) {
    m.intervals_.push_back({x, x});
    m.nodes_.push_back(x);
    m.density_.push_back(1.0);
    m.weights_.push_back(mass);
    m.offsets_.push_back(static_cast<int>(m.nodes_.size()));
  }
  return m;
}

RealMeasure RealMeasure::uniform(std::vector<Interval> intervals, double mass, int nodes_per_interval) {
  double len = 0.0;
  for (const Interval& iv : intervals) len += iv.length();
  const double d = mass / len;
  return from_density(std::move(intervals), [d](double) { return d; }, nodes_per_interval);
}

RealMeasure RealMeasure::semicircle(double radius, int nodes) {
  const double r2 = radius * radius;
  return from_density({{-radius, radius}},
                      [r2](double x) { return 2.0 / (std::numbers::pi * r2) * std::sqrt(std::max(0.0, r2 - x * x)); },
                      nodes);
}

std::pair<int, int> RealMeasure::interval_nodes(int k) const {
  return {offsets_[k], offsets_[k + 1]};
}

double RealMeasure::total_mass() const {
  double s = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) s += weights_[k] * density_[k];
  return s;
}

double RealMeasure::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) s += weights_[k] * density_[k] * f(nodes_[k]);
  return s;
}

double RealMeasure::density_at(double x) const {
  if (atomic_) throw std::logic_error("density_at on an atomic measure");
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    const Interval& iv = intervals_[k];
    if (x < iv.a || x > iv.b) continue;
    auto [lo, hi] = interval_nodes(static_cast<int>(k));
    const int n = hi - lo;
    // interpolate h = rho / sqrt((b-x)(x-a)) in the angle variable
    const double mid = 0.5 * (iv.a + iv.b), h2 = 0.5 * iv.length();
    auto theta_of = [&](double xx) { return std::acos(std::clamp((xx - mid) / h2, -1.0, 1.0)); };
    const double th = theta_of(x);
    // nodes ascend in x so theta descends; locate bracketing nodes
    int j = lo;
    while (j < hi - 1 && nodes_[j + 1] < x) ++j;
    auto hval = [&](int idx) {
      const double s2 = (iv.b - nodes_[idx]) * (nodes_[idx] - iv.a);
      return density_[idx] / std::sqrt(std::max(s2, 1e-300));
    };
    // Catmull-Rom in theta over up to 4 surrounding nodes
    int i1 = std::clamp(j, lo, hi - 2);
    int i0 = std::max(i1 - 1, lo), i2 = i1 + 1, i3 = std::min(i2 + 1, hi - 1);
    double t1 = theta_of(nodes_[i1]), t2 = theta_of(nodes_[i2]);
    double u = (th - t1) / (t2 - t1);
    double p0 = hval(i0), p1 = hval(i1), p2 = hval(i2), p3 = hval(i3);
    double m1 = (i0 == i1) ? (p2 - p1) : (p2 - p0) * (t2 - t1) / (theta_of(nodes_[i2]) - theta_of(nodes_[i0]));
    double m2 = (i3 == i2) ? (p2 - p1) : (p3 - p1) * (t2 - t1) / (theta_of(nodes_[i3]) - theta_of(nodes_[i1]));
    double u2 = u * u, u3 = u2 * u;
    double h = (2 * u3 - 3 * u2 + 1) * p1 + (u3 - 2 * u2 + u) * m1 + (-2 * u3 + 3 * u2) * p2 + (u3 - u2) * m2;
    return h * std::sqrt(std::max((iv.b - x) * (x - iv.a), 0.0));
  }
  return 0.0;
}

void RealMeasure::build_cdf() const {
  cdf_cache_.resize(nodes_.size());
  double s = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    s += weights_[k] * density_[k];
    cdf_cache_[k] = s;
  }
}

double RealMeasure::cdf(double x) const {
  if (cdf_cache_.empty()) build_cdf();
  // midpoint convention: node k's weight is accumulated once x passes it
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  if (it == nodes_.begin()) return 0.0;
  return cdf_cache_[static_cast<std::size_t>(it - nodes_.begin()) - 1];
}

bool RealMeasure::covers_origin(double tol) const {
  for (const Interval& iv : intervals_)
    if (iv.a < -tol && iv.b > tol) return true;
  if (atomic_)
    for (double x : nodes_)
      if (std::abs(x) <= tol) return true;
  return false;
}

double RealMeasure::max_abs_endpoint() const {
  double m = 0.0;
  for (const Interval& iv : intervals_) m = std::max({m, std::abs(iv.a), std::abs(iv.b)});
  return m;
}

// ---------------------------------------------------------------------------

AxisMeasure AxisMeasure::from_density(double c, double Y, double ceiling,
                                      const std::function<double(double)>& rho,
                                      int half_nodes_target) {
  if (Y <= c) throw std::invalid_argument("AxisMeasure: truncation must exceed c");
  AxisMeasure m;
  m.Y_ = Y;
  m.ceiling_ = ceiling;
  m.c_ = c;

  // Segment edges on the half axis: saturated part [0, c] (uniform panels),
  // then [c, c+2] graded quadratically toward c (sqrt kink), then out to Y.
  std::vector<double> edges;
  edges.push_back(0.0);
  const int order = 16;
  int budget = std::max(8, half_nodes_target / order);
  auto push_edges = [&edges](double lo, double hi, int k, double power) {
    for (int j = 1; j <= k; ++j) {
      double u = static_cast<double>(j) / k;
      edges.push_back(lo + (hi - lo) * std::pow(u, power));
    }
  };
  if (c > 0.0) {
    int k_sat = std::max(2, budget / 6);
    push_edges(0.0, c, k_sat, 1.0);
    double mid = std::min(c + 2.0 * (1.0 + c), Y);
    int k_kink = std::max(4, budget / 3);
    push_edges(c, mid, k_kink, 2.0);
    int k_far = std::max(4, budget - k_sat - k_kink);
    push_edges(mid, Y, k_far, 2.0);
  } else {
    double mid = std::min(4.0, Y);
    int k_near = std::max(4, budget / 2);
    push_edges(0.0, mid, k_near, 1.0);
    int k_far = std::max(4, budget - k_near);
    push_edges(mid, Y, k_far, 2.0);
  }
  m.seg_edges_ = edges;

  std::vector<double> hy, hw, hd;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    QuadRule r = gauss_legendre_on(edges[s], edges[s + 1], order);
    for (int k = 0; k < order; ++k) {
      hy.push_back(r.nodes[k]);
      hw.push_back(r.weights[k]);
      double d = rho(r.nodes[k]);
      if (d < 0.0 && d > -1e-13) d = 0.0;
      hd.push_back(d);
    }
  }

  // two-term tail fit from rho at Y and 0.8 Y
  const double y1 = Y, y2 = 0.8 * Y;
  const double r1 = rho(y1), r2 = rho(y2);
  // solve K2/y^2 + K4/y^4 = r at y1, y2
  const double a11 = 1.0 / (y1 * y1), a12 = 1.0 / (y1 * y1 * y1 * y1);
  const double a21 = 1.0 / (y2 * y2), a22 = 1.0 / (y2 * y2 * y2 * y2);
  const double det = a11 * a22 - a12 * a21;
  m.k2_ = (r1 * a22 - r2 * a12) / det;
  m.k4_ = (r2 * a11 - r1 * a21) / det;

  // mirror to the full symmetric grid
  const int n = static_cast<int>(hy.size());
  m.nodes_.resize(2 * n);
  m.weights_.resize(2 * n);
  m.density_.resize(2 * n);
  for (int k = 0; k < n; ++k) {
    m.nodes_[n - 1 - k] = -hy[k];
    m.weights_[n - 1 - k] = hw[k];
    m.density_[n - 1 - k] = hd[k];
    m.nodes_[n + k] = hy[k];
    m.weights_[n + k] = hw[k];
    m.density_[n + k] = hd[k];
  }
  return m;
}

double AxisMeasure::tail_mass() const {
  return 2.0 * (k2_ / Y_ + k4_ / (3.0 * Y_ * Y_ * Y_));
}

double AxisMeasure::total_mass() const {
  double s = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) s += weights_[k] * density_[k];
  return s + tail_mass();
}

double AxisMeasure::density_at(double y) const {
  const double ay = std::abs(y);
  if (ay > Y_) return k2_ / (ay * ay) + k4_ / (ay * ay * ay * ay);
  if (c_ > 0.0 && ay <= c_) return ceiling_;
  // linear interpolation on the half grid
  const int n = static_cast<int>(nodes_.size()) / 2;
  const double* ys = nodes_.data() + n;  // positive half, ascending
  auto it = std::lower_bound(ys, ys + n, ay);
  int j = static_cast<int>(it - ys);
  if (j <= 0) return density_[n];
  if (j >= n) return density_[2 * n - 1];
  const double y0 = ys[j - 1], y1 = ys[j];
  const double d0 = density_[n + j - 1], d1 = density_[n + j];
  return d0 + (d1 - d0) * (ay - y0) / (y1 - y0);
}

}  // namespace extsource
