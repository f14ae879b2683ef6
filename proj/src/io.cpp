#include "extsource/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace extsource {

void RunConfig::validate() const {
  if (solver.outer_tol <= 0 || solver.qp_kkt_tol <= 0 || curve_root_tol <= 0 || boundary_band <= 0)
    throw std::invalid_argument("config: all tolerances must be positive");
  if (verify_n <= 0 || verify_n % 2 != 0)
    throw std::invalid_argument("config: verify.n must be even and positive");
}

namespace {

template <typename T>
void assign(const std::map<std::string, std::string>& kv, const std::string& key, T& out) {
  auto it = kv.find(key);
  if (it == kv.end()) return;
  std::istringstream is(it->second);
  is >> out;
  if (is.fail()) throw std::invalid_argument("config: cannot parse value for " + key);
}

}  // namespace

RunConfig parse_config(const std::map<std::string, std::string>& kv) {
  RunConfig c;
  assign(kv, "solver.grid_coarse", c.solver.grid_coarse);
  assign(kv, "solver.grid_interval", c.solver.grid_interval);
  assign(kv, "solver.grid_band", c.solver.grid_band);
  assign(kv, "solver.grid_gap", c.solver.grid_gap);
  assign(kv, "solver.refine_passes", c.solver.refine_passes);
  assign(kv, "solver.axis_half_nodes", c.solver.axis_half_nodes);
  assign(kv, "solver.axis_half_nodes_final", c.solver.axis_half_nodes_final);
  assign(kv, "solver.y_factor", c.solver.y_factor);
  assign(kv, "solver.outer_tol", c.solver.outer_tol);
  assign(kv, "solver.max_outer", c.solver.max_outer);
  assign(kv, "solver.theta0", c.solver.theta0);
  assign(kv, "solver.max_restarts", c.solver.max_restarts);
  assign(kv, "solver.qp_kkt_tol", c.solver.qp_kkt_tol);
  assign(kv, "solver.qp_max_iters", c.solver.qp_max_iters);
  assign(kv, "solver.support_threshold", c.solver.support_threshold);
  assign(kv, "solver.mu1_nodes_final", c.solver.mu1_nodes_final);
  assign(kv, "curve.root_tol", c.curve_root_tol);
  assign(kv, "curve.exclusion", c.curve_exclusion);
  assign(kv, "curve.boundary_band", c.boundary_band);
  assign(kv, "verify.n", c.verify_n);
  assign(kv, "verify.chains", c.verify_chains);
  assign(kv, "verify.steps", c.verify_steps);
  assign(kv, "verify.seed", c.verify_seed);
  assign(kv, "jobs", c.jobs);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = val;
  }
  return parse_config(kv);
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) {
    delete impl_;
    throw std::runtime_error("cannot open output file: " + path);
  }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::comment(const std::string& line) { impl_->out << "# " << line << "\n"; }

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t k = 0; k < columns.size(); ++k)
    impl_->out << columns[k] << (k + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t k = 0; k < values.size(); ++k)
    impl_->out << format_full(values[k]) << (k + 1 < values.size() ? "," : "\n");
}

void CsvWriter::raw_row(const std::string& line) { impl_->out << line << "\n"; }

}  // namespace extsource
