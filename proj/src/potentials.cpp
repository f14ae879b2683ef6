#include "extsource/potentials.hpp"

#include <cmath>
#include <stdexcept>

#include "extsource/quadrature.hpp"

namespace extsource {

namespace {

// int_a^b log|x - y| dy for complex x = xi + iv, exact.
double log_line_integral(double a, double b, Complex x) {
  const double xi = x.real(), v = std::abs(x.imag());
  auto G = [&](double u) -> double {
    if (v == 0.0) {
      if (u == 0.0) return 0.0;
      return u * std::log(std::abs(u)) - u;
    }
    return 0.5 * (u * std::log(u * u + v * v) - 2.0 * u) + v * std::atan(u / v);
  };
  return G(b - xi) - G(a - xi);
}

// int_{-Y}^{Y} log|x - iy| dy for complex x = xi + iv:
// |x - iy| = sqrt((y - v)^2 + xi^2), i.e. the line integral with re/im swapped.
double log_axis_integral(double Y, Complex x) {
  return log_line_integral(-Y, Y, Complex(x.imag(), x.real()));
}

double second_moment(const RealMeasure& m) {
  double s = 0.0;
  for (std::size_t k = 0; k < m.nodes().size(); ++k)
    s += m.weights()[k] * m.density()[k] * m.nodes()[k] * m.nodes()[k];
  return s;
}

}  // namespace

double log_potential(const RealMeasure& m, Complex x) {
  const auto& xs = m.nodes();
  const auto& rho = m.density();
  const auto& w = m.weights();
  double acc = 0.0;
  if (m.atomic()) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double d = std::abs(x - xs[k]);
      acc -= w[k] * std::log(d);
    }
    if (!std::isfinite(acc))
      throw std::domain_error("log_potential: evaluation point collides with a point mass");
    return acc;
  }
  const double xi = x.real();
  for (std::size_t iv = 0; iv < m.intervals().size(); ++iv) {
    const Interval& I = m.intervals()[iv];
    auto [lo, hi] = m.interval_nodes(static_cast<int>(iv));
    if (xi >= I.a && xi <= I.b && std::abs(x.imag()) < 0.5 * I.length()) {
      const double rx = m.density_at(xi);
      for (int k = lo; k < hi; ++k) {
        const double d = std::abs(x - xs[k]);
        if (d == 0.0) continue;  // (rho - rho(x)) log d -> 0 at an exact node hit
        acc -= w[k] * (rho[k] - rx) * std::log(d);
      }
      acc -= rx * log_line_integral(I.a, I.b, x);
    } else {
      for (int k = lo; k < hi; ++k) acc -= w[k] * rho[k] * std::log(std::abs(x - xs[k]));
    }
  }
  if (!std::isfinite(acc))
    throw std::domain_error("log_potential: node collision not covered by the subtraction rule");
  return acc;
}

double log_potential(const AxisMeasure& m, Complex x) {
  const auto& ys = m.nodes();
  const auto& rho = m.density();
  const auto& w = m.weights();
  const double Y = m.truncation();
  const double v = x.imag();
  double acc = 0.0;
  if (std::abs(v) <= Y) {
    const double rv = m.density_at(v);
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const double d = std::abs(x - Complex(0.0, ys[k]));
      if (d == 0.0) continue;
      acc -= w[k] * (rho[k] - rv) * std::log(d);
    }
    acc -= rv * log_axis_integral(Y, x);
  } else {
    for (std::size_t k = 0; k < ys.size(); ++k)
      acc -= w[k] * rho[k] * std::log(std::abs(x - Complex(0.0, ys[k])));
  }
  if (!std::isfinite(acc))
    throw std::domain_error("log_potential: node collision not covered by the subtraction rule");
  // tail beyond Y (density K2/y^2 + K4/y^4 on both ends), compactified by
  // u = 1/y; the log u part is integrated in closed form, the rest by GL
  const double K2 = m.tail_k2(), K4 = m.tail_k4();
  const double lY = std::log(Y);
  const double Y3 = Y * Y * Y;
  double tail = 2.0 * K2 * (lY + 1.0) / Y + 2.0 * K4 * (lY + 1.0 / 3.0) / (3.0 * Y3);
  const Complex x2 = x * x;
  const QuadRule& gl = gauss_legendre(32);
  const double h = 0.5 / Y;
  double smooth = 0.0;
  for (int q = 0; q < 32; ++q) {
    const double u = h + h * gl.nodes[q];
    smooth += h * gl.weights[q] * (K2 + K4 * u * u) * std::log(std::abs(1.0 + u * u * x2));
  }
  return acc - tail - smooth;
}

Complex cauchy_transform(const RealMeasure& m, Complex z) {
  const double scale = 1.0 + m.max_abs_endpoint();
  if (std::abs(z.imag()) < 1e-13 * scale) {
    for (const Interval& I : m.intervals())
      if (z.real() >= I.a - 1e-13 * scale && z.real() <= I.b + 1e-13 * scale)
        throw std::domain_error("cauchy_transform: z lies on the support of the measure");
  }
  Complex acc = 0.0;
  for (std::size_t k = 0; k < m.nodes().size(); ++k)
    acc += m.weights()[k] * m.density()[k] / (z - m.nodes()[k]);
  if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
    throw std::domain_error("cauchy_transform: z collides with a quadrature node");
  return acc;
}

Complex cauchy_transform(const AxisMeasure& m, Complex z) {
  const double scale = 1.0 + m.truncation();
  if (std::abs(z.real()) < 1e-13 * scale)
    throw std::domain_error("cauchy_transform: z lies on the support of the measure");
  Complex acc = 0.0;
  for (std::size_t k = 0; k < m.nodes().size(); ++k)
    acc += m.weights()[k] * m.density()[k] / (z - Complex(0.0, m.nodes()[k]));
  const double Y = m.truncation();
  const double K2 = m.tail_k2(), K4 = m.tail_k4();
  const QuadRule& gl = gauss_legendre(32);
  const double h = 0.5 / Y;
  Complex tail = 0.0;
  for (int q = 0; q < 32; ++q) {
    const double u = h + h * gl.nodes[q];
    tail += h * gl.weights[q] * (K2 + K4 * u * u) * 2.0 * z * u * u / (1.0 + u * u * z * z);
  }
  return acc + tail;
}

double log_energy(const RealMeasure& m) {
  const auto& xs = m.nodes();
  const auto& w = m.weights();
  if (m.atomic()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < xs.size(); ++j) {
        if (i == j) continue;
        acc -= w[i] * w[j] * std::log(std::abs(xs[i] - xs[j]));
      }
    return acc;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    acc += w[i] * m.density()[i] * log_potential(m, Complex(xs[i], 0.0));
  return acc;
}

double log_energy(const AxisMeasure& m) {
  double acc = 0.0;
  for (std::size_t k = 0; k < m.nodes().size(); ++k)
    acc += m.weights()[k] * m.density()[k] * log_potential(m, Complex(0.0, m.nodes()[k]));
  // tail x bulk interaction, with U^m(iy) ~ -mass * log|y| beyond Y
  const double Y = m.truncation(), lY = std::log(Y);
  const double mass = m.total_mass();
  acc += -2.0 * mass * (m.tail_k2() * (lY + 1.0) / Y + m.tail_k4() * (lY + 1.0 / 3.0) / (3.0 * Y * Y * Y));
  return acc;
}

double mixed_energy(const RealMeasure& m1, const RealMeasure& m2) {
  // canonical order so I(a, b) and I(b, a) run identical sums
  const RealMeasure* p = &m1;
  const RealMeasure* q = &m2;
  if (q->nodes().size() < p->nodes().size() ||
      (q->nodes().size() == p->nodes().size() && q->nodes() < p->nodes()))
    std::swap(p, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p->nodes().size(); ++i)
    for (std::size_t j = 0; j < q->nodes().size(); ++j)
      acc -= p->weights()[i] * p->density()[i] * q->weights()[j] * q->density()[j] *
             std::log(std::abs(p->nodes()[i] - q->nodes()[j]));
  return acc;
}

double mixed_energy(const RealMeasure& m1, const AxisMeasure& m2) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m1.nodes().size(); ++i)
    acc += m1.weights()[i] * m1.density()[i] * log_potential(m2, Complex(m1.nodes()[i], 0.0));
  return acc;
}

double mixed_energy_axis_route(const RealMeasure& m1, const AxisMeasure& m2) {
  double acc = 0.0;
  for (std::size_t k = 0; k < m2.nodes().size(); ++k)
    acc += m2.weights()[k] * m2.density()[k] * log_potential(m1, Complex(0.0, m2.nodes()[k]));
  // tail: U^{mu1}(iy) = -log y - m2/(2y^2) + m4/(4y^4) + ... against K2/y^2 + K4/y^4
  const double Y = m2.truncation(), lY = std::log(Y);
  const double K2 = m2.tail_k2(), K4 = m2.tail_k4();
  const double mom2 = second_moment(m1);
  const double Y3 = Y * Y * Y;
  double tail = -2.0 * K2 * (lY + 1.0) / Y;
  tail += -(2.0 * K4 * (lY + 1.0 / 3.0) + mom2 * K2) / (3.0 * Y3);
  return acc + tail;
}

double energy(const RealMeasure& mu1, const AxisMeasure& mu2, const EvenPolynomial& V, double a,
              double mass_tol) {
  if (std::abs(mu1.total_mass() - 1.0) > mass_tol)
    throw std::invalid_argument("energy: mu1 must have unit mass");
  if (std::abs(mu2.total_mass() - 0.5) > mass_tol)
    throw std::invalid_argument("energy: mu2 must have mass 1/2");
  const double field = mu1.integrate([&](double x) { return V(x) - a * std::abs(x); });
  return log_energy(mu1) + log_energy(mu2) - mixed_energy(mu1, mu2) + field;
}

double energy_decomposed(const RealMeasure& mu1, const AxisMeasure& mu2, const EvenPolynomial& V,
                         double a, double mass_tol) {
  if (std::abs(mu1.total_mass() - 1.0) > mass_tol)
    throw std::invalid_argument("energy: mu1 must have unit mass");
  if (std::abs(mu2.total_mass() - 0.5) > mass_tol)
    throw std::invalid_argument("energy: mu2 must have mass 1/2");
  const double I1 = log_energy(mu1);
  const double I2 = log_energy(mu2);
  const double I12 = mixed_energy(mu1, mu2);
  const double I21 = mixed_energy_axis_route(mu1, mu2);
  const double Is = I1 - 2.0 * I12 - 2.0 * I21 + 4.0 * I2;
  const double field = mu1.integrate([&](double x) { return V(x) - a * std::abs(x); });
  return 0.75 * I1 + 0.25 * Is + field;
}

}  // namespace extsource
