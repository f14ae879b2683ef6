#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "extsource/measures.hpp"
#include "extsource/polynomial.hpp"

namespace extsource {

enum class CurveKind { quadratic, quartic, generic };

struct QuarticParams {
  double t = 0.0;
  double a = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// The cubic xi^3 + p2(z) xi^2 + p1(z) xi + p0(z) = 0 whose three branches are
/// the sheet functions of the associated Riemann surface. p2 = -V' always.
class SpectralCurve {
 public:
  static SpectralCurve pastur(double a);
  static SpectralCurve mclaughlin(double t, double a, double alpha, double beta);
  /// V even; p1 must be even and p0 odd (required by the z -> -z symmetry).
  static SpectralCurve generic(const EvenPolynomial& V, double a, Poly p1, Poly p0);

  const Poly& p2() const { return p2_; }
  const Poly& p1() const { return p1_; }
  const Poly& p0() const { return p0_; }
  CurveKind kind() const { return kind_; }
  double source_a() const { return a_; }
  const std::optional<QuarticParams>& quartic() const { return quartic_; }

  /// V'(z) = -p2(z).
  Complex vprime(Complex z) const { return -p2_(z); }

  /// Discriminant with respect to xi, expanded in z.
  Poly discriminant() const;
  /// Discriminant as a polynomial in y = z^2 (even potentials only).
  Poly discriminant_in_y() const;

  /// The three cubic roots at z, unordered (companion-matrix eigenvalues).
  std::array<Complex, 3> roots_at(Complex z) const;

 private:
  SpectralCurve(CurveKind k, double a, Poly p2, Poly p1, Poly p0)
      : kind_(k), a_(a), p2_(std::move(p2)), p1_(std::move(p1)), p0_(std::move(p0)) {}
  CurveKind kind_;
  double a_;
  Poly p2_, p1_, p0_;
  std::optional<QuarticParams> quartic_;
};

struct BranchPointSet {
  std::vector<double> real_pairs;        // b values, descending, branch points at +-b
  std::optional<double> imaginary_pair;  // c value, branch points at +-ic
  int genus = 0;
  std::vector<std::pair<Complex, int>> double_roots;  // remaining discriminant roots (z, multiplicity)
  /// Smallest separation between distinct root clusters, relative to scale.
  double min_cluster_gap = 0.0;
  bool degenerate = false;  // pattern did not match any regular case
  std::string note;

  /// Support intervals implied by the real pairs (outermost inward; an odd
  /// count of pairs puts the innermost interval through the origin).
  std::vector<Interval> support() const;
};

/// Classify the discriminant roots into branch points.
/// `tol` is the clustering tolerance relative to the largest root magnitude.
/// Throws std::domain_error when the root pattern is ambiguous (near-critical
/// parameters); pass `allow_degenerate` to get the raw set with the flag set.
BranchPointSet branch_points(const SpectralCurve& curve, double tol = 1e-6,
                             bool allow_degenerate = false);

/// The three sheet values at z, labeled by the large-|z| asymptotics
///   xi1 ~ V'(z) - 1/z,  xi2 ~ a + 1/(2z),  xi3 ~ -a + 1/(2z),
/// continued inward along the ray from |z| = R = 10 (1 + max branch radius).
std::array<Complex, 3> solve_sheets(const SpectralCurve& curve, Complex z,
                                    double exclusion_rel = 1e-6);

/// Density dmu1/dx = Im xi_{1,+}(x) / pi on the support interior, by
/// approaching from the upper half plane and Richardson-extrapolating in eps.
double density_from_curve_at(const SpectralCurve& curve, const BranchPointSet& pts, double x,
                             double eps_rel = 1e-8);

/// Sampled measure on angle-rule grids over the support intervals.
RealMeasure density_from_curve(const SpectralCurve& curve, const BranchPointSet& pts,
                               int nodes_per_interval = 256, double eps_rel = 1e-8,
                               double neg_tol = 1e-8);

}  // namespace extsource
