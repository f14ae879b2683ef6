#include "extsource/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace extsource {

namespace {

QuadRule compute_gl(int n) {
  // Newton iteration on Legendre P_n, nodes seeded by the Chebyshev estimate.
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const QuadRule& gauss_legendre(int order) {
  static std::map<int, QuadRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gl(order)).first;
  return it->second;
}

QuadRule gauss_legendre_on(double a, double b, int order) {
  const QuadRule& base = gauss_legendre(order);
  QuadRule r;
  const double mid = 0.5 * (a + b), h = 0.5 * (b - a);
  r.nodes.reserve(order);
  r.weights.reserve(order);
  for (int k = 0; k < order; ++k) {
    r.nodes.push_back(mid + h * base.nodes[k]);
    r.weights.push_back(h * base.weights[k]);
  }
  return r;
}

QuadRule composite_gl(double a, double b, int panels, int order) {
  if (panels < 1) throw std::invalid_argument("composite_gl: panels < 1");
  QuadRule r;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + (b - a) * p / panels;
    const double pb = a + (b - a) * (p + 1) / panels;
    QuadRule part = gauss_legendre_on(pa, pb, order);
    r.nodes.insert(r.nodes.end(), part.nodes.begin(), part.nodes.end());
    r.weights.insert(r.weights.end(), part.weights.begin(), part.weights.end());
  }
  return r;
}

QuadRule angle_rule(double a, double b, int n_nodes) {
  if (!(b > a)) throw std::invalid_argument("angle_rule: empty interval");
  const double mid = 0.5 * (a + b), h = 0.5 * (b - a);
  QuadRule th = gauss_legendre_on(0.0, std::numbers::pi, n_nodes);
  QuadRule r;
  r.nodes.resize(n_nodes);
  r.weights.resize(n_nodes);
  // theta decreasing -> x increasing
  for (int k = 0; k < n_nodes; ++k) {
    const double theta = th.nodes[n_nodes - 1 - k];
    r.nodes[k] = mid + h * std::cos(theta);
    r.weights[k] = th.weights[n_nodes - 1 - k] * h * std::sin(theta);
  }
  return r;
}

}  // namespace extsource
