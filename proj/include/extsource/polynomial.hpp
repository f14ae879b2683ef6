#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace extsource {

using Complex = std::complex<double>;

/// Dense real polynomial, coefficients in ascending powers of z.
class Poly {
 public:
  Poly() : coeffs_{0.0} {}
  explicit Poly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_ = {0.0};
  }

  static Poly monomial(int degree, double c = 1.0) {
    std::vector<double> v(degree + 1, 0.0);
    v[degree] = c;
    return Poly(std::move(v));
  }

  const std::vector<double>& coeffs() const { return coeffs_; }
  int degree() const {
    for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k)
      if (coeffs_[k] != 0.0) return k;
    return 0;
  }

  double operator()(double z) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }
  Complex operator()(Complex z) const {
    Complex acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Poly derivative() const {
    if (coeffs_.size() <= 1) return Poly();
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
    return Poly(std::move(d));
  }

  Poly trimmed(double rel_tol = 0.0) const {
    double scale = 0.0;
    for (double c : coeffs_) scale = std::max(scale, std::abs(c));
    std::vector<double> v = coeffs_;
    while (v.size() > 1 && std::abs(v.back()) <= rel_tol * scale) v.pop_back();
    return Poly(std::move(v));
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<double> v(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) v[k] += a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) v[k] += b.coeffs_[k];
    return Poly(std::move(v));
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (b * -1.0); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    std::vector<double> v(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Poly(std::move(v));
  }
  friend Poly operator*(const Poly& a, double s) {
    std::vector<double> v = a.coeffs_;
    for (double& c : v) c *= s;
    return Poly(std::move(v));
  }
  friend Poly operator*(double s, const Poly& a) { return a * s; }

  /// The even part as a polynomial in y = z^2. Throws if any odd coefficient
  /// is non-negligible relative to the largest one.
  Poly even_part_in_y(double rel_tol = 1e-12) const {
    double scale = 0.0;
    for (double c : coeffs_) scale = std::max(scale, std::abs(c));
    std::vector<double> v((coeffs_.size() + 1) / 2, 0.0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      if (k % 2 == 0) {
        v[k / 2] = coeffs_[k];
      } else if (std::abs(coeffs_[k]) > rel_tol * scale) {
        throw std::invalid_argument("polynomial is not even in z");
      }
    }
    return Poly(std::move(v));
  }

 private:
  std::vector<double> coeffs_;
};

/// All complex roots, computed as eigenvalues of the scaled companion matrix.
std::vector<Complex> poly_roots(const Poly& p);

/// Even polynomial potential V(x) = sum_{j=1..d} v_j x^{2j} with v_d > 0.
class EvenPolynomial {
 public:
  explicit EvenPolynomial(std::vector<double> coeffs) : v_(std::move(coeffs)) {
    if (v_.empty()) throw std::invalid_argument("EvenPolynomial needs at least one coefficient");
    if (v_.back() <= 0.0) throw std::invalid_argument("leading coefficient must be positive");
  }

  static EvenPolynomial quadratic() { return EvenPolynomial({0.5}); }             // x^2/2
  static EvenPolynomial quartic(double t) { return EvenPolynomial({-0.5 * t, 0.25}); }  // x^4/4 - t x^2/2

  int d() const { return static_cast<int>(v_.size()); }
  int degree() const { return 2 * d(); }
  const std::vector<double>& coeffs() const { return v_; }

  double operator()(double x) const {
    const double y = x * x;
    double acc = 0.0;
    for (auto it = v_.rbegin(); it != v_.rend(); ++it) acc = (acc + *it) * y;
    return acc;
  }
  Complex operator()(Complex z) const {
    const Complex y = z * z;
    Complex acc = 0.0;
    for (auto it = v_.rbegin(); it != v_.rend(); ++it) acc = (acc + *it) * y;
    return acc;
  }

  double deriv(double x) const {
    const double y = x * x;
    double acc = 0.0;
    for (int j = d(); j >= 1; --j) acc = acc * y + 2.0 * j * v_[j - 1];
    return acc * x;
  }
  Complex deriv(Complex z) const {
    const Complex y = z * z;
    Complex acc = 0.0;
    for (int j = d(); j >= 1; --j) acc = acc * y + 2.0 * j * v_[j - 1];
    return acc * z;
  }

  /// V'(z) as a Poly in z (odd, degree 2d-1).
  Poly deriv_poly() const {
    std::vector<double> c(2 * d(), 0.0);
    for (int j = 1; j <= d(); ++j) c[2 * j - 1] = 2.0 * j * v_[j - 1];
    return Poly(std::move(c));
  }

  bool is_quadratic_half_square() const { return d() == 1 && v_[0] == 0.5; }
  /// Returns t if this is x^4/4 - t x^2/2.
  bool quartic_t(double& t) const {
    if (d() != 2 || v_[1] != 0.25) return false;
    t = -2.0 * v_[0];
    return true;
  }

 private:
  std::vector<double> v_;  // v_1..v_d
};

}  // namespace extsource
