#include <CLI11.hpp>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "extsource/equilibrium.hpp"
#include "extsource/finite_n.hpp"
#include "extsource/io.hpp"
#include "extsource/quartic_phase.hpp"
#include "extsource/spectral_curve.hpp"

using json = nlohmann::json;
using namespace extsource;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBoundaryCritical = 2;
constexpr int kExitVerifyFailed = 3;

EvenPolynomial parse_potential(const std::string& spec) {
  std::vector<double> v;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  return EvenPolynomial(v);
}

json branch_json(const BranchPointSet& b) {
  json j;
  j["real_pairs"] = b.real_pairs;
  if (b.imaginary_pair) j["imaginary_pair"] = *b.imaginary_pair;
  j["genus"] = b.genus;
  json doubles = json::array();
  for (const auto& [z, m] : b.double_roots)
    doubles.push_back({{"re", z.real()}, {"im", z.imag()}, {"multiplicity", m}});
  j["double_roots"] = doubles;
  return j;
}

int cmd_classify(double t, double a, const std::string& json_out, const RunConfig& cfg) {
  PhasePoint p = classify(t, a, cfg.curve_root_tol, cfg.boundary_band);
  if (p.phase_case == PhaseCase::boundary_critical) {
    std::cout << "boundary-critical (" << p.note << ")";
  } else {
    std::cout << "Case " << to_string(p.phase_case) << " genus " << p.genus << " alpha " << p.alpha
              << " beta " << p.beta;
    std::cout << " branch";
    for (double b : p.branch.real_pairs) std::cout << " +-" << b;
    if (p.branch.imaginary_pair) std::cout << " +-" << *p.branch.imaginary_pair << "i";
  }
  std::cout << " boundary-distance A1 " << p.boundary_distance[0] << " A2 " << p.boundary_distance[1]
            << " A3 " << p.boundary_distance[2] << "\n";
  if (!json_out.empty()) {
    json j;
    j["t"] = p.t;
    j["a"] = p.a;
    j["case"] = to_string(p.phase_case);
    j["genus"] = p.genus;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["boundary_distance"] = {{"A1", p.boundary_distance[0]}, {"A2", p.boundary_distance[1]},
                              {"A3", p.boundary_distance[2]}};
    j["branch"] = branch_json(p.branch);
    if (!p.note.empty()) j["note"] = p.note;
    std::ofstream(json_out) << j.dump(2) << "\n";
  }
  return p.phase_case == PhaseCase::boundary_critical ? kExitBoundaryCritical : kExitOk;
}

int cmd_phase_scan(const PhaseScanOptions& opts, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  PhaseScanResult res = scan(opts);
  {
    CsvWriter w(out_dir + "/scan.csv");
    w.comment("phase scan of the quartic potential x^4/4 - t x^2/2");
    w.comment("t in [" + format_full(opts.t_min) + ", " + format_full(opts.t_max) + "] x" +
              std::to_string(opts.nt) + ", a in [" + format_full(opts.a_min) + ", " +
              format_full(opts.a_max) + "] x" + std::to_string(opts.na));
    w.header({"t", "a", "case", "genus", "alpha", "beta"});
    for (const PhasePoint& p : res.points) {
      std::ostringstream line;
      line << format_full(p.t) << "," << format_full(p.a) << "," << to_string(p.phase_case) << ","
           << p.genus << "," << format_full(p.alpha) << "," << format_full(p.beta);
      w.raw_row(line.str());
    }
  }
  {
    CsvWriter w(out_dir + "/boundaries.csv");
    w.comment("transition curves: 1 = A1, 2 = A2 (genus boundaries), 3 = A3");
    w.header({"curve", "t", "a"});
    for (const auto& row : res.boundaries) {
      std::ostringstream line;
      line << "A" << static_cast<int>(row[0]) << "," << format_full(row[1]) << ","
           << format_full(row[2]);
      w.raw_row(line.str());
    }
  }
  return kExitOk;
}

int cmd_density(std::optional<double> t, double a, const std::string& potential,
                const std::string& method, const std::string& out, const RunConfig& cfg) {
  EvenPolynomial V = potential.empty() ? (t ? EvenPolynomial::quartic(*t) : EvenPolynomial::quadratic())
                                       : parse_potential(potential);
  RealMeasure mu1;
  AxisMeasure mu2;
  double c = 0.0, ell = 0.0;
  std::string case_label;
  double eq1 = 0.0, eq2 = 0.0;

  if (method == "curve") {
    SpectralCurve curve = [&]() {
      double tq = 0.0;
      if (V.is_quadratic_half_square()) return SpectralCurve::pastur(a);
      if (V.quartic_t(tq)) {
        PhasePoint p = classify(tq, a, cfg.curve_root_tol, cfg.boundary_band);
        if (p.phase_case == PhaseCase::boundary_critical)
          throw std::domain_error("density: parameters are boundary-critical: " + p.note);
        case_label = to_string(p.phase_case);
        return SpectralCurve::mclaughlin(tq, a, p.alpha, p.beta);
      }
      throw CLI::ValidationError("--method curve requires the quadratic or quartic potential");
    }();
    BranchPointSet pts = branch_points(curve, cfg.curve_root_tol);
    mu1 = density_from_curve(curve, pts, cfg.solver.mu1_nodes_final);
    auto [axis, cc] = mu2_from_mu1(mu1, a);
    mu2 = std::move(axis);
    c = cc;
    if (case_label.empty())
      case_label = pts.imaginary_pair ? (mu1.intervals().size() % 2 ? "III" : "II") : "I";
  } else if (method == "solve") {
    EquilibriumSolution sol = solve(V, a, cfg.solver);
    mu1 = sol.mu1;
    mu2 = sol.mu2;
    c = sol.c;
    ell = sol.ell;
    case_label = to_string(sol.phase_case);
    eq1 = sol.residuals.eq_residual_mu1;
    eq2 = sol.residuals.eq_residual_mu2;
  } else {
    throw CLI::ValidationError("--method must be curve or solve");
  }

  CsvWriter w(out);
  w.comment("case " + case_label + "  c " + format_full(c) + "  ell " + format_full(ell));
  w.comment("eq_residual_mu1 " + format_full(eq1) + "  eq_residual_mu2 " + format_full(eq2));
  w.comment("columns: x, rho1 (mu1 density), y, rho2 (mu2 density at iy)");
  w.header({"x", "rho1", "y", "rho2"});
  const std::size_t rows = std::max(mu1.nodes().size(), mu2.nodes().size());
  for (std::size_t k = 0; k < rows; ++k) {
    std::ostringstream line;
    if (k < mu1.nodes().size())
      line << format_full(mu1.nodes()[k]) << "," << format_full(mu1.density()[k]) << ",";
    else
      line << ",,";
    if (k < mu2.nodes().size())
      line << format_full(mu2.nodes()[k]) << "," << format_full(mu2.density()[k]);
    else
      line << ",";
    w.raw_row(line.str());
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::optional<double> t, double a,
               const std::string& potential, const RunConfig& cfg, const std::string& out) {
  EvenPolynomial V = potential.empty() ? (t ? EvenPolynomial::quartic(*t) : EvenPolynomial::quadratic())
                                       : parse_potential(potential);
  json rep;
  rep["suite"] = suite;
  rep["a"] = a;
  if (t) rep["t"] = *t;
  bool ok = true;

  if (suite == "variational") {
    EquilibriumSolution sol = solve(V, a, cfg.solver);
    rep["case"] = to_string(sol.phase_case);
    rep["c"] = sol.c;
    rep["ell"] = sol.ell;
    rep["energy"] = sol.energy;
    rep["iterations"] = sol.iterations;
    rep["eq_residual_mu1"] = sol.residuals.eq_residual_mu1;
    rep["eq_residual_mu2"] = sol.residuals.eq_residual_mu2;
    rep["ineq_margin_mu1"] = sol.residuals.ineq_margin_mu1;
    rep["ineq_margin_mu2"] = sol.residuals.ineq_margin_mu2;
    ok = sol.residuals.eq_residual_mu1 < 1e-4 && sol.residuals.eq_residual_mu2 < 1e-4 &&
         sol.residuals.ineq_margin_mu1 > -1e-6 &&
         (sol.c == 0.0 || sol.residuals.ineq_margin_mu2 > -1e-6);
  } else if (suite == "mcmc") {
    EquilibriumSolution sol = solve(V, a, cfg.solver);
    EnsembleSpec spec(V, a, cfg.verify_n);
    SampleResult s =
        sample_eigenvalues(spec, cfg.verify_chains, cfg.verify_steps, cfg.verify_seed);
    KsReport ks = density_comparison(s.pooled(), sol.mu1);
    rep["ks_distance"] = ks.distance;
    rep["samples"] = ks.sample_count;
    rep["acceptance_rate"] = s.acceptance_rate;
    if (s.warning) rep["warning"] = *s.warning;
    ok = ks.distance < 0.15;
    // gap check: in a two-interval phase the middle of the gap must stay empty
    if (sol.mu1.intervals().size() >= 2 && !sol.mu1.covers_origin()) {
      const double gap_edge = sol.mu1.intervals()[sol.mu1.intervals().size() / 2].a;
      std::size_t inside = 0;
      const auto pooled = s.pooled();
      for (double x : pooled)
        if (std::abs(x) < 0.5 * gap_edge) ++inside;
      const double frac = static_cast<double>(inside) / pooled.size();
      rep["gap_fraction"] = frac;
      ok = ok && frac < 0.02;
    }
  } else if (suite == "mop") {
    EnsembleSpec spec(V, a, cfg.verify_n);
    MopResult mop = mop_from_moments(spec);
    rep["condition"] = mop.condition;
    json zeros = json::array();
    bool real_paired = true;
    for (const Complex& z : mop.zeros) {
      zeros.push_back({{"re", z.real()}, {"im", z.imag()}});
      if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z))) real_paired = false;
    }
    rep["zeros"] = zeros;
    rep["zeros_real"] = real_paired;
    ok = real_paired;
    EquilibriumSolution sol = solve(V, a, cfg.solver);
    double max_outside = 0.0;
    for (const Complex& z : mop.zeros) {
      double dist = 1e300;
      for (const Interval& iv : sol.mu1.intervals())
        dist = std::min(dist, z.real() >= iv.a && z.real() <= iv.b
                                  ? 0.0
                                  : std::min(std::abs(z.real() - iv.a), std::abs(z.real() - iv.b)));
      max_outside = std::max(max_outside, dist);
    }
    rep["max_zero_distance_to_support"] = max_outside;
    ok = ok && max_outside < 0.15;
  } else {
    throw CLI::ValidationError("--suite must be variational, mcmc or mop");
  }

  rep["ok"] = ok;
  if (out.empty())
    std::cout << rep.dump(2) << "\n";
  else
    std::ofstream(out) << rep.dump(2) << "\n";
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equilibrium measures, spectral curves and phase diagram for the external source model"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "flat key=value configuration file")->expected(1);

  double t = 0.0, a = 0.0;
  std::string potential, out, method = "solve", json_out, suite = "variational";
  int jobs = 0, n = 0, chains = 0, steps = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto* c_classify = app.add_subcommand("classify", "classify a quartic phase point");
  c_classify->add_option("--t", t)->required();
  c_classify->add_option("--a", a)->required();
  c_classify->add_option("--json", json_out, "also write a JSON report");

  auto* c_scan = app.add_subcommand("phase-scan", "classify a (t, a) grid and emit CSV tables");
  PhaseScanOptions sopt;
  c_scan->add_option("--t-min", sopt.t_min);
  c_scan->add_option("--t-max", sopt.t_max);
  c_scan->add_option("--a-min", sopt.a_min);
  c_scan->add_option("--a-max", sopt.a_max);
  c_scan->add_option("--nt", sopt.nt);
  c_scan->add_option("--na", sopt.na);
  c_scan->add_option("--jobs", jobs);
  c_scan->add_option("--out", out, "output directory")->required();

  auto* c_density = app.add_subcommand("density", "emit both equilibrium densities as CSV");
  c_density->add_option("--t", t);
  bool t_given = false;
  c_density->callback([&] { t_given = c_density->count("--t") > 0; });
  c_density->add_option("--a", a)->required();
  c_density->add_option("--potential", potential, "coefficients v1,v2,... of sum v_j x^{2j}");
  c_density->add_option("--method", method, "curve | solve");
  c_density->add_option("--out", out)->required();

  auto* c_verify = app.add_subcommand("verify", "run a verification suite, JSON report");
  c_verify->add_option("--suite", suite, "variational | mcmc | mop");
  c_verify->add_option("--t", t);
  bool vt_given = false;
  c_verify->callback([&] { vt_given = c_verify->count("--t") > 0; });
  c_verify->add_option("--a", a)->required();
  c_verify->add_option("--potential", potential);
  c_verify->add_option("--n", n);
  c_verify->add_option("--chains", chains);
  c_verify->add_option("--steps", steps);
  c_verify->add_option("--seed", seed)->each([&](const std::string&) { seed_set = true; });
  c_verify->add_option("--out", out);
  c_verify->add_option("--jobs", jobs);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (jobs > 0) cfg.jobs = jobs;

    if (c_classify->parsed()) {
      if (a <= 0.0) {
        std::cerr << "classify: --a must be positive\n";
        return kExitUsage;
      }
      return cmd_classify(t, a, json_out, cfg);
    }
    if (c_scan->parsed()) {
      sopt.jobs = cfg.jobs;
      sopt.boundary_band = cfg.boundary_band;
      sopt.cluster_tol = cfg.curve_root_tol;
      return cmd_phase_scan(sopt, out);
    }
    if (c_density->parsed()) {
      if (a <= 0.0) {
        std::cerr << "density: --a must be positive\n";
        return kExitUsage;
      }
      return cmd_density(t_given ? std::optional<double>(t) : std::nullopt, a, potential, method, out,
                         cfg);
    }
    if (c_verify->parsed()) {
      if (a <= 0.0) {
        std::cerr << "verify: --a must be positive\n";
        return kExitUsage;
      }
      if ((suite == "mcmc" || suite == "mop") && !seed_set && suite == "mcmc") {
        std::cerr << "verify: --seed is required for randomized suites\n";
        return kExitUsage;
      }
      if (n > 0) cfg.verify_n = n;
      if (chains > 0) cfg.verify_chains = chains;
      if (steps > 0) cfg.verify_steps = steps;
      if (seed_set) cfg.verify_seed = seed;
      cfg.validate();
      return cmd_verify(suite, vt_given ? std::optional<double>(t) : std::nullopt, a, potential, cfg,
                        out);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
