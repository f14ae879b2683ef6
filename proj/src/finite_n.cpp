#include "extsource/finite_n.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "extsource/quadrature.hpp"

namespace extsource {

namespace {

// uniform in (0,1) and a Box-Muller normal, reproducible across platforms
struct Rng {
  std::mt19937_64 eng;
  bool has_spare = false;
  double spare = 0.0;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return ((eng() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare = r * std::sin(phi);
    has_spare = true;
    return r * std::cos(phi);
  }
};

struct Chain {
  std::vector<std::vector<double>> snapshots;
  double acc_rate = 0.0;
  double step = 0.0;
};

Chain run_chain(const EnsembleSpec& spec, int sweeps, std::uint64_t seed, const McmcOptions& opts) {
  const int n = spec.n;
  Rng rng(seed);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  // start from the source minima: diag(x0, ..., -x0, ...)
  double x0 = 1.0;
  {
    double best = 1e300;
    for (double x = 1e-2; x < 50.0; x *= 1.05) {
      const double q = spec.V(x) - spec.a * x;
      if (q < best) {
        best = q;
        x0 = x;
      }
    }
  }
  for (int i = 0; i < n; ++i) M(i, i) = (i < n / 2) ? x0 : -x0;
  std::vector<double> Ad(n);
  for (int i = 0; i < n; ++i) Ad[i] = (i < n / 2) ? spec.a : -spec.a;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  auto trV = [&](const Eigen::MatrixXcd& m) {
    es.compute(m, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += spec.V(es.eigenvalues()[i]);
    return s;
  };
  double trv = trV(M);
  double tra = 0.0;
  for (int i = 0; i < n; ++i) tra += Ad[i] * M(i, i).real();

  double step = opts.initial_step;
  long accepted = 0, proposed = 0;
  Chain out;
  const int per_sweep = n * n;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int p = 0; p < per_sweep; ++p) {
      int i = static_cast<int>(rng.uniform() * n);
      int j = static_cast<int>(rng.uniform() * n);
      i = std::min(i, n - 1);
      j = std::min(j, n - 1);
      if (i > j) std::swap(i, j);
      const Complex old = M(i, j);
      double dtra = 0.0;
      if (i == j) {
        const double d = step * rng.normal();
        M(i, i) = old + d;
        dtra = Ad[i] * d;
      } else {
        const Complex d = step * std::numbers::sqrt2 * 0.5 * Complex(rng.normal(), rng.normal());
        M(i, j) = old + d;
        M(j, i) = std::conj(M(i, j));
      }
      const double trv_new = trV(M);
      const double dE = spec.n * ((trv_new - trv) - dtra);
      ++proposed;
      if (std::log(rng.uniform()) < -dE) {
        trv = trv_new;
        tra += dtra;
        ++accepted;
      } else {
        M(i, j) = old;
        if (i != j) M(j, i) = std::conj(old);
      }
    }
    if (sweep < opts.burn_sweeps) {
      if (sweep % 10 == 9 && proposed > 0) {
        const double r = static_cast<double>(accepted) / proposed;
        step *= std::exp(1.5 * (r - 0.3));
        accepted = proposed = 0;
      }
    } else if ((sweep - opts.burn_sweeps) % opts.thin_sweeps == 0) {
      es.compute(M, Eigen::EigenvaluesOnly);
      std::vector<double> lam(n);
      for (int k = 0; k < n; ++k) lam[k] = es.eigenvalues()[k];
      std::sort(lam.begin(), lam.end());
      out.snapshots.push_back(std::move(lam));
    }
  }
  out.acc_rate = proposed > 0 ? static_cast<double>(accepted) / proposed : 0.0;
  out.step = step;
  return out;
}

}  // namespace

std::vector<double> SampleResult::pooled() const {
  std::vector<double> out;
  out.reserve(2 * snapshots.size() * (snapshots.empty() ? 0 : snapshots.front().size()));
  for (const auto& s : snapshots)
    for (double v : s) {
      out.push_back(v);
      out.push_back(-v);
    }
  return out;
}

SampleResult sample_eigenvalues(const EnsembleSpec& spec, int chains, int sweeps, std::uint64_t seed,
                                const McmcOptions& opts) {
  if (chains < 1) throw std::invalid_argument("sample_eigenvalues: chains must be positive");
  if (sweeps <= opts.burn_sweeps)
    throw std::invalid_argument("sample_eigenvalues: sweeps must exceed the burn-in");
  std::vector<Chain> results(chains);
  std::vector<std::thread> pool;
  for (int c = 0; c < chains; ++c)
    pool.emplace_back([&, c]() {
      results[c] = run_chain(spec, sweeps, seed + 0x9e3779b97f4a7c15ULL * (c + 1), opts);
    });
  for (auto& t : pool) t.join();

  SampleResult out;
  out.chains = chains;
  double acc = 0.0, st = 0.0;
  for (const Chain& ch : results) {
    acc += ch.acc_rate;
    st += ch.step;
    out.snapshots.insert(out.snapshots.end(), ch.snapshots.begin(), ch.snapshots.end());
  }
  out.acceptance_rate = acc / chains;
  out.step_size = st / chains;
  if (out.acceptance_rate < 0.1 || out.acceptance_rate > 0.7)
    out.warning = "acceptance rate " + std::to_string(out.acceptance_rate) +
                  " outside [0.1, 0.7]; try step size " + std::to_string(out.step_size * 0.5);
  return out;
}

// ---------------------------------------------------------------------------

double MopResult::operator()(double z) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

MopResult mop_from_moments(const EnsembleSpec& spec) {
  const int n = spec.n;
  const int half = n / 2;
  auto Q = [&](double x) { return spec.V(x) - spec.a * x; };

  // integration window: n (Q - Qmin) <= 700
  double qmin = 1e300, lo = 0.0, hi = 0.0;
  {
    std::vector<double> xs;
    for (double x = -64.0; x <= 64.0; x += 1.0 / 512.0) xs.push_back(x);
    for (double x : xs) qmin = std::min(qmin, Q(x));
    bool first = true;
    for (double x : xs)
      if (n * (Q(x) - qmin) <= 700.0) {
        if (first) {
          lo = x;
          first = false;
        }
        hi = x;
      }
    lo -= 0.5;
    hi += 0.5;
  }

  // moments of w1 up to power n + half - 1, scaled by e^{n qmin}
  const int pmax = n + half;
  std::vector<double> mu(pmax + 1, 0.0);
  QuadRule rule = composite_gl(lo, hi, 64, 24);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double x = rule.nodes[k];
    const double w = rule.weights[k] * std::exp(-(n * (Q(x) - qmin)));
    double xp = 1.0;
    for (int p = 0; p <= pmax; ++p, xp *= x) mu[p] += w * xp;
  }

  const double s = std::pow(mu[n] / mu[0], 1.0 / n);
  std::vector<double> nu(pmax + 1);
  for (int p = 0; p <= pmax; ++p) nu[p] = mu[p] / (mu[0] * std::pow(s, p));

  Eigen::MatrixXd H(half, half);
  Eigen::VectorXd rhs(half);
  for (int k = 0; k < half; ++k) {
    for (int m = 0; m < half; ++m) H(k, m) = nu[2 * m + k];
    rhs[k] = -nu[n + k];
  }
  Eigen::VectorXd colnorm = H.colwise().norm();
  for (int m = 0; m < half; ++m) H.col(m) /= colnorm[m];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond = svd.singularValues()(0) / svd.singularValues()(half - 1);
  if (cond > 1e12)
    throw std::runtime_error("mop_from_moments: moment matrix condition " + std::to_string(cond) +
                             " exceeds 1e12; use a smaller n");
  Eigen::VectorXd g = svd.solve(rhs);
  for (int m = 0; m < half; ++m) g[m] /= colnorm[m];

  MopResult res;
  res.n = n;
  res.condition = cond;
  res.coeffs.assign(n + 1, 0.0);
  res.coeffs[n] = 1.0;
  std::vector<double> ycoef(half + 1);
  ycoef[half] = 1.0;
  for (int m = 0; m < half; ++m) {
    const double qm = g[m] * std::pow(s, n - 2 * m);
    res.coeffs[2 * m] = qm;
    ycoef[m] = qm;
  }
  for (const Complex& y : poly_roots(Poly(ycoef))) {
    const Complex r = std::sqrt(y);
    res.zeros.push_back(r);
    res.zeros.push_back(-r);
  }
  std::sort(res.zeros.begin(), res.zeros.end(),
            [](const Complex& u, const Complex& v) { return u.real() < v.real(); });
  return res;
}

CharPolyCheck avg_char_poly_check(const EnsembleSpec& spec, const SampleResult& samples,
                                  const std::vector<double>& z_points) {
  if (samples.snapshots.empty()) throw std::invalid_argument("avg_char_poly_check: no samples");
  MopResult pn = mop_from_moments(spec);
  CharPolyCheck out;
  for (double z : z_points) {
    std::vector<double> vals;
    vals.reserve(samples.snapshots.size());
    for (const auto& lam : samples.snapshots) {
      double v = 1.0, vr = 1.0;
      for (double l : lam) {
        v *= (z - l);
        vr *= (z + l);  // reflected twin M -> -M
      }
      vals.push_back(0.5 * (v + vr));
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= std::max<std::size_t>(vals.size() - 1, 1);
    const double se = std::sqrt(var / vals.size());
    CharPolyPoint pt;
    pt.z = z;
    pt.mc_mean = mean;
    pt.mc_se = se;
    pt.reference = pn(z);
    const double d = std::abs(mean - pt.reference);
    if (d <= 3.0 * se)
      pt.verdict = "agree";
    else if (se > d)
      pt.verdict = "inconclusive";
    else {
      pt.verdict = "fail";
      out.all_within_3se = false;
    }
    out.points.push_back(pt);
  }
  return out;
}

KsReport density_comparison(const std::vector<double>& samples, const RealMeasure& mu1) {
  if (samples.empty()) throw std::invalid_argument("density_comparison: no samples");
  std::vector<double> s = samples;
  std::sort(s.begin(), s.end());
  const double N = static_cast<double>(s.size());
  double ks = 0.0;
  const double mass = mu1.total_mass();
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double F = mu1.cdf(s[k]) / mass;
    ks = std::max(ks, std::abs((k + 1) / N - F));
    ks = std::max(ks, std::abs(k / N - F));
  }
  KsReport rep;
  rep.distance = ks;
  rep.sample_count = s.size();
  return rep;
}

}  // namespace extsource
