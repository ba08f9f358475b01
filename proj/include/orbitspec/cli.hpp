#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace orbitspec {

// Parsed command-line request. One instance per invocation; every report
// echoes the fields that were actually consumed plus the seed.
struct RunConfig {
  std::string command;
  std::string poly_text;
  std::string set_spec;
  std::string moduli_text;
  std::string torus_text;
  std::string gens_text;
  std::string matrix_text;
  std::string alpha_text;
  std::string bohr_alpha;
  std::string bohr_eps;
  std::string mode = "polynomial";
  std::string format = "json";
  std::string output_path;
  int depth = 0;
  std::int64_t prime = 0;
  std::int64_t modulus = 0;
  std::int64_t count = 0;
  std::int64_t k = 0;
  std::int64_t k_max = 0;
  std::int64_t m = -1;
  std::int64_t radius = 0;
  std::int64_t bound = 0;
  std::int64_t window_lo = 0;
  std::int64_t window_hi = 0;
  std::int64_t scan_bound = 0;
  std::int64_t psi_modulus = 0;
  double eps = 0.0;
  double gamma = 0.0;
  double hua_target = 0.0;
  std::uint64_t seed = 1;
  bool blueprint = false;
  bool necessity = false;
  std::vector<std::int64_t> base_point;
};

// Runs one CLI invocation. `args` holds the arguments after the program
// name in natural order. Reports go to `out`, error messages to `err`.
// Exit codes: 0 success, 1 usage error, 2 resource/search bound hit,
// 3 internal invariant failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orbitspec
