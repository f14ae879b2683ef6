#pragma once

#include <map>
#include <string>
#include <vector>

#include "extsource/equilibrium.hpp"

namespace extsource {

/// Flat key = value configuration mirroring the solver/curve/verify blocks.
struct RunConfig {
  SolverConfig solver;
  // curve block
  double curve_root_tol = 1e-6;
  double curve_exclusion = 1e-6;
  double boundary_band = 1e-6;
  // verify block
  int verify_n = 16;
  int verify_chains = 4;
  int verify_steps = 1200;  // sweeps per chain
  std::uint64_t verify_seed = 1;
  int jobs = 0;

  void validate() const;
};

/// Parse `key = value` lines ('#' comments, blank lines ignored).
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::map<std::string, std::string>& kv);

/// CSV writing with '#'-prefixed metadata header; 17 significant digits.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void comment(const std::string& line);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  struct Impl;
  Impl* impl_;
};

std::string format_full(double v);  // %.17g

}  // namespace extsource
