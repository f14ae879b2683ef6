#include "extsource/quartic_phase.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace extsource {

std::string to_string(PhaseCase c) {
  switch (c) {
    case PhaseCase::I: return "I";
    case PhaseCase::II: return "II";
    case PhaseCase::III: return "III";
    default: return "critical";
  }
}

std::array<double, 4> d6(double t, double a) {
  if (a <= 0.0) throw std::invalid_argument("d6: a must be positive");
  const double a2 = a * a;
  return {-27.0 * a2 * a2 + (18.0 * t - 4.0 * t * t * t) * a2 - 4.0 + t * t,
          (12.0 * t * t - 18.0) * a2 - 2.0 * t, 1.0 - 12.0 * t * a2, 4.0 * a2};
}

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;

double guarded_pow32(double v) {
  // (t^2 - 3)^{3/2} with roundoff guard at t = sqrt(3)
  if (v < 0.0 && v > -1e-12) v = 0.0;
  if (v < 0.0) throw std::domain_error("painleve boundary: t must be >= sqrt(3)");
  return v * std::sqrt(v);
}

}  // namespace

double painleve_a1(double t) {
  if (t < kSqrt3 - 1e-12) throw std::domain_error("painleve_a1: t must be >= sqrt(3)");
  return t / 3.0 - (2.0 / 27.0) * (t * t * t - guarded_pow32(t * t - 3.0));
}

double painleve_a2(double t) {
  if (t < kSqrt3 - 1e-12 || t > 2.0 + 1e-12)
    throw std::domain_error("painleve_a2: t must lie in [sqrt(3), 2]");
  return t / 3.0 - (2.0 / 27.0) * (t * t * t + guarded_pow32(t * t - 3.0));
}

double pearcey_a3(double t) {
  const double s = t * t + 24.0;
  return -2.0 * t / 3.0 + (t * t * t + s * std::sqrt(s)) / 108.0;
}

bool in_genus_one_region(double t, double a, double boundary_tol) {
  if (a <= 0.0) throw std::invalid_argument("in_genus_one_region: a must be positive");
  const std::array<double, 4> c = d6(t, a);
  const double A = c[3], B = c[2], C = c[1], D = c[0];
  // cubic resolvent in y = z^2 must have two strictly positive and one
  // strictly negative root
  const double disc = 18.0 * A * B * C * D - 4.0 * B * B * B * D + B * B * C * C -
                      4.0 * A * C * C * C - 27.0 * A * A * D * D;
  const double scale = std::max({std::abs(A), std::abs(B), std::abs(C), std::abs(D), 1.0});
  if (disc <= boundary_tol * scale * scale * scale * scale) return false;  // complex or multiple roots
  if (D <= boundary_tol * scale) return false;  // product of roots >= 0
  // local minimum of the cubic must sit at positive y with negative value
  const double h = B * B - 3.0 * A * C;
  if (h <= 0.0) return false;
  const double ystar = (-B + std::sqrt(h)) / (3.0 * A);
  if (ystar <= 0.0) return false;
  const double val = ((A * ystar + B) * ystar + C) * ystar + D;
  return val < -boundary_tol * scale;
}

GenusZeroParams genus_zero_parameters(double t, double a) {
  if (a <= 0.0) throw std::invalid_argument("genus_zero_parameters: a must be positive");
  // 2c^6 - 2tc^4 - ac^3 + 3c^2 - tac - a^2 = 0, ascending coefficients
  Poly sextic({-a * a, -t * a, 3.0, -a, -2.0 * t, 0.0, 2.0});
  double best = -1.0;
  for (const Complex& r : poly_roots(sextic)) {
    if (std::abs(r.imag()) < 1e-9 * std::max(1.0, std::abs(r)) && r.real() > 0.0)
      best = std::max(best, r.real());
  }
  if (best <= 0.0)
    throw std::domain_error(
        "genus_zero_parameters: no positive root (parameters lie in the genus-one region?)");
  GenusZeroParams g;
  g.c_par = best;
  const double c = best;
  const double c4 = c * c * c * c;
  g.u = 2.0 * c4 + a * c;
  const double u = g.u;
  const double w = c4 + 2.0 * c4 * u - u * u;
  g.alpha = (1.0 - u) * w * w / (c * c * u * u * u);
  g.beta = -(3.0 * c4 - u) * w * w / (c4 * u * u);
  return g;
}

namespace {

// geometric distance from (t, a) to the sampled curve branch (t', sqrt(f(t')))
double curve_distance(double t, double a, double lo, double hi,
                      const std::function<double(double)>& a2_of_t) {
  const int N = 600;
  double best = 1e30, best_t = lo;
  for (int k = 0; k <= N; ++k) {
    const double tt = lo + (hi - lo) * k / N;
    const double a2 = a2_of_t(tt);
    if (a2 < 0.0) continue;
    const double d = std::hypot(tt - t, std::sqrt(a2) - a);
    if (d < best) {
      best = d;
      best_t = tt;
    }
  }
  // local golden-section refinement around the best sample
  double lo2 = std::max(lo, best_t - (hi - lo) / N);
  double hi2 = std::min(hi, best_t + (hi - lo) / N);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi2 - gr * (hi2 - lo2), x2 = lo2 + gr * (hi2 - lo2);
  auto dist = [&](double tt) {
    const double a2 = a2_of_t(tt);
    if (a2 < 0.0) return 1e30;
    return std::hypot(tt - t, std::sqrt(a2) - a);
  };
  double f1 = dist(x1), f2 = dist(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi2 = x2; x2 = x1; f2 = f1;
      x1 = hi2 - gr * (hi2 - lo2);
      f1 = dist(x1);
    } else {
      lo2 = x1; x1 = x2; f1 = f2;
      x2 = lo2 + gr * (hi2 - lo2);
      f2 = dist(x2);
    }
  }
  return std::min(best, std::min(f1, f2));
}

}  // namespace

PhasePoint classify(double t, double a, double cluster_tol, double boundary_band) {
  if (a <= 0.0) throw std::invalid_argument("classify: a must be positive");
  PhasePoint p;
  p.t = t;
  p.a = a;

  const double t_hi = std::max(t + 3.0, 8.0);
  p.boundary_distance[0] =
      curve_distance(t, a, kSqrt3, t_hi, [](double tt) { return painleve_a1(tt); });
  p.boundary_distance[1] =
      curve_distance(t, a, kSqrt3, 2.0, [](double tt) { return painleve_a2(tt); });
  p.boundary_distance[2] =
      curve_distance(t, a, std::min(t - 3.0, -3.0), kSqrt3, [](double tt) { return pearcey_a3(tt); });

  const double dmin = *std::min_element(p.boundary_distance.begin(), p.boundary_distance.end());
  if (dmin < boundary_band) {
    p.phase_case = PhaseCase::boundary_critical;
    p.note = "within the boundary band of a transition curve";
    return p;
  }

  if (in_genus_one_region(t, a)) {
    p.alpha = 0.0;
    p.beta = 0.0;
    SpectralCurve curve = SpectralCurve::mclaughlin(t, a, 0.0, 0.0);
    p.branch = branch_points(curve, cluster_tol, /*allow_degenerate=*/true);
    if (p.branch.degenerate || p.branch.real_pairs.size() != 2 || !p.branch.imaginary_pair) {
      p.phase_case = PhaseCase::boundary_critical;
      p.note = p.branch.note.empty() ? "unexpected branch pattern in the genus-one region" : p.branch.note;
      return p;
    }
    p.phase_case = PhaseCase::II;
    p.genus = 1;
    return p;
  }

  GenusZeroParams g;
  try {
    g = genus_zero_parameters(t, a);
  } catch (const std::domain_error& e) {
    p.phase_case = PhaseCase::boundary_critical;
    p.note = e.what();
    return p;
  }
  p.alpha = g.alpha;
  p.beta = g.beta;
  SpectralCurve curve = SpectralCurve::mclaughlin(t, a, g.alpha, g.beta);
  p.branch = branch_points(curve, cluster_tol, /*allow_degenerate=*/true);
  if (p.branch.degenerate) {
    p.phase_case = PhaseCase::boundary_critical;
    p.note = p.branch.note;
    return p;
  }
  const std::size_t P = p.branch.real_pairs.size();
  if (!p.branch.imaginary_pair && P == 2) {
    p.phase_case = PhaseCase::I;
    p.genus = 0;
  } else if (p.branch.imaginary_pair && P == 1) {
    p.phase_case = PhaseCase::III;
    p.genus = 0;
  } else {
    p.phase_case = PhaseCase::boundary_critical;
    p.note = "branch pattern matches no regular genus-zero case";
  }
  return p;
}

PhaseScanResult scan(const PhaseScanOptions& opts) {
  if (opts.nt < 1 || opts.na < 1) throw std::invalid_argument("scan: resolution must be positive");
  PhaseScanResult res;
  const int total = opts.nt * opts.na;
  res.points.resize(total);
  auto t_of = [&](int i) {
    return opts.nt == 1 ? opts.t_min : opts.t_min + (opts.t_max - opts.t_min) * i / (opts.nt - 1);
  };
  auto a_of = [&](int j) {
    return opts.na == 1 ? opts.a_min : opts.a_min + (opts.a_max - opts.a_min) * j / (opts.na - 1);
  };

  int jobs = opts.jobs > 0 ? opts.jobs : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, total));
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= total) return;
      const int i = k / opts.na, j = k % opts.na;
      try {
        res.points[k] = classify(t_of(i), a_of(j), opts.cluster_tol, opts.boundary_band);
      } catch (const std::exception& e) {
        PhasePoint p;
        p.t = t_of(i);
        p.a = a_of(j);
        p.phase_case = PhaseCase::boundary_critical;
        p.note = e.what();
        res.points[k] = p;
      }
    }
  };
  for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  // boundary polylines restricted to the scanned t-window
  const int nb = 200;
  auto emit = [&](int id, double lo, double hi, const std::function<double(double)>& a2_of_t) {
    if (!(hi > lo)) return;
    for (int k = 0; k <= nb; ++k) {
      const double t = lo + (hi - lo) * k / nb;
      const double a2 = a2_of_t(t);
      if (a2 < 0.0) continue;
      res.boundaries.push_back({static_cast<double>(id), t, std::sqrt(a2)});
    }
  };
  emit(1, std::max(kSqrt3, opts.t_min), opts.t_max, [](double t) { return painleve_a1(t); });
  emit(2, std::max(kSqrt3, opts.t_min), std::min(2.0, opts.t_max), [](double t) { return painleve_a2(t); });
  emit(3, opts.t_min, std::min(kSqrt3, opts.t_max), [](double t) { return pearcey_a3(t); });
  return res;
}

}  // namespace extsource
