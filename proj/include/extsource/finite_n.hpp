#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "extsource/measures.hpp"
#include "extsource/polynomial.hpp"

namespace extsource {

/// Hermitian n x n ensemble with density ~ exp(-n Tr(V(M) - AM)),
/// A = diag(a, ..., a, -a, ..., -a) with both eigenvalues of multiplicity n/2.
struct EnsembleSpec {
  EvenPolynomial V;
  double a = 0.0;
  int n = 0;  // even

  EnsembleSpec(EvenPolynomial pot, double source, int size) : V(std::move(pot)), a(source), n(size) {
    if (n <= 0 || n % 2 != 0) throw std::invalid_argument("EnsembleSpec: n must be even and positive");
  }
};

struct SampleResult {
  std::vector<std::vector<double>> snapshots;  // sorted eigenvalues per retained state
  double acceptance_rate = 0.0;
  double step_size = 0.0;
  int chains = 0;
  std::optional<std::string> warning;

  /// All eigenvalues pooled, each snapshot paired with its sign-flipped twin.
  std::vector<double> pooled() const;
};

struct McmcOptions {
  int burn_sweeps = 300;
  int thin_sweeps = 5;
  double initial_step = 0.3;
};

/// Metropolis random walk: Gaussian perturbation of a uniformly chosen
/// Hermitian entry pair, step adapted toward 0.3 acceptance during burn-in.
SampleResult sample_eigenvalues(const EnsembleSpec& spec, int chains, int sweeps, std::uint64_t seed,
                                const McmcOptions& opts = {});

struct MopResult {
  int n = 0;
  std::vector<double> coeffs;  // ascending, degree n, monic, odd entries zero
  std::vector<Complex> zeros;
  double condition = 0.0;

  double operator()(double z) const;
};

/// Monic polynomial of degree n orthogonal to x^k (k < n/2) against both
/// weights w(x) = exp(-n(V(x) -+ ax)); by evenness a single decoupled system.
MopResult mop_from_moments(const EnsembleSpec& spec);

struct CharPolyPoint {
  double z = 0.0;
  double mc_mean = 0.0;
  double mc_se = 0.0;
  double reference = 0.0;
  std::string verdict;  // "agree" | "inconclusive" | "fail"
};

struct CharPolyCheck {
  std::vector<CharPolyPoint> points;
  bool all_within_3se = true;
};

/// Monte Carlo E[det(zI - M)] from samples against the moment-system polynomial.
CharPolyCheck avg_char_poly_check(const EnsembleSpec& spec, const SampleResult& samples,
                                  const std::vector<double>& z_points);

struct KsReport {
  double distance = 0.0;
  int n = 0;
  std::size_t sample_count = 0;
};

/// Kolmogorov-Smirnov distance between the empirical eigenvalue CDF and mu1.
KsReport density_comparison(const std::vector<double>& samples, const RealMeasure& mu1);

}  // namespace extsource
