#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace isl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct RunConfig {
  std::string command;
  std::string problem;
  int count = 10;
  double s_min = 0.0;   // charfn grid start, 0 = s_step
  double s_max = 0.0;   // 0 = command default
  double s_step = 0.0;  // 0 = command default
  int mesh = 512;
  std::string out = ".";
  std::vector<double> kappa{30.0, 60.0};
  double tol = 1e-3;
  int threads = 0;  // 0 = hardware concurrency
  int n_max = 20;
  int hadamard_m = 40;

  /// Throws ConfigError naming the offending flag.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Parses argv, runs the subcommand, writes its files into --out.
/// Returns kExitOk, kExitConfig or kExitNumeric.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace isl::cli
