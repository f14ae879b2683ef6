#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "extsource/polynomial.hpp"

namespace extsource {

struct Interval {
  double a;
  double b;
  double length() const { return b - a; }
};

/// Measure on the real line: disjoint intervals carrying a sampled density on
/// quadrature nodes, or a finite set of point masses (degenerate intervals).
class RealMeasure {
 public:
  RealMeasure() = default;

  /// Absolutely continuous measure: density sampled on angle-rule nodes per interval.
  static RealMeasure from_density(std::vector<Interval> intervals,
                                  const std::function<double(double)>& rho,
                                  int nodes_per_interval = 256);

  /// As above but from explicit per-node data (intervals[i] owns a contiguous
  /// block of nodes; offsets are derived from counts).
  static RealMeasure from_samples(std::vector<Interval> intervals, std::vector<int> counts,
                                  std::vector<double> nodes, std::vector<double> density,
                                  std::vector<double> weights);

  /// Finite atomic measure (degenerate one-node intervals).
  static RealMeasure point_masses(const std::vector<std::pair<double, double>>& location_mass);

  /// Uniform density on the given intervals, normalized to `mass`.
  static RealMeasure uniform(std::vector<Interval> intervals, double mass = 1.0,
                             int nodes_per_interval = 256);

  /// Semicircle density (2/(pi r^2)) sqrt(r^2 - x^2) on [-r, r], unit mass.
  static RealMeasure semicircle(double radius = 1.0, int nodes = 512);

  bool atomic() const { return atomic_; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& density() const { return density_; }
  const std::vector<double>& weights() const { return weights_; }
  /// [first, last) node index range of interval k.
  std::pair<int, int> interval_nodes(int k) const;

  double total_mass() const;
  /// sum w_k f(x_k) rho_k
  double integrate(const std::function<double(double)>& f) const;

  /// Pointwise density via interpolation of the square-root-reduced profile.
  double density_at(double x) const;
  /// Cumulative distribution F(x) of the (assumed positive) measure.
  double cdf(double x) const;

  /// True if some interval contains 0 strictly inside (or an atom sits at 0).
  bool covers_origin(double tol = 0.0) const;
  double max_abs_endpoint() const;

 private:
  bool atomic_ = false;
  std::vector<Interval> intervals_;
  std::vector<int> offsets_;  // per-interval start index; trailing total count
  std::vector<double> nodes_;
  std::vector<double> density_;
  std::vector<double> weights_;
  mutable std::vector<double> cdf_cache_;  // per-node cumulative sums
  void build_cdf() const;
};

/// Measure on the imaginary axis, parametrized by y (z = iy): symmetric grid on
/// [-Y, Y] with density w.r.t. |dz|, an upper ceiling a/pi, a saturation radius
/// c >= 0, and a fitted two-term decay tail K2/y^2 + K4/y^4 beyond Y.
class AxisMeasure {
 public:
  AxisMeasure() = default;

  /// Build from a density function rho(y) (even in y). Nodes are graded GL
  /// panels on [0, c] and [c, Y], mirrored; the tail is fitted from rho at
  /// y = Y and y = 0.8 Y.
  static AxisMeasure from_density(double c, double Y, double ceiling,
                                  const std::function<double(double)>& rho,
                                  int half_nodes_target = 512);

  double truncation() const { return Y_; }
  double ceiling() const { return ceiling_; }
  double c() const { return c_; }
  double tail_k2() const { return k2_; }
  double tail_k4() const { return k4_; }

  /// Full symmetric grid, y ascending (negative to positive).
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& density() const { return density_; }
  const std::vector<double>& weights() const { return weights_; }

  double tail_mass() const;  // both tails combined
  double total_mass() const;
  double density_at(double y) const;

 private:
  double Y_ = 0.0, ceiling_ = 0.0, c_ = 0.0, k2_ = 0.0, k4_ = 0.0;
  std::vector<double> nodes_, density_, weights_;
  std::vector<double> seg_edges_;  // half-axis segment edges (for subtraction closed forms)
};

}  // namespace extsource
