#pragma once

#include <string>
#include <vector>

namespace isl {

enum class SpectrumMethod { Shooting, FdOracle, ClosedForm };

inline const char* to_string(SpectrumMethod m) {
  switch (m) {
    case SpectrumMethod::Shooting: return "shooting";
    case SpectrumMethod::FdOracle: return "fd_oracle";
    case SpectrumMethod::ClosedForm: return "closed_form";
  }
  return "unknown";
}

struct SpectrumEntry {
  double lambda = 0.0;
  int multiplicity = 1;
  /// shooting: |omega| at the root relative to its bracket scale;
  /// fd_oracle: Richardson error band of the cluster.
  double residual = 0.0;
};

struct SpectrumResolution {
  double s_step = 0.0;       // scan step in s (shooting)
  double tolerance = 0.0;    // root refinement tolerance in s (shooting)
  double s_max = 0.0;        // final scan extent (shooting)
  int mesh = 0;              // nodes per half, coarse mesh (fd_oracle)
  int steps = 0;             // fixed RK4 steps, 0 = default rule (shooting)
  std::vector<std::string> diagnostics;
};

/// Eigenvalues in ascending order with multiplicities.
struct Spectrum {
  std::vector<SpectrumEntry> entries;
  SpectrumMethod method = SpectrumMethod::Shooting;
  SpectrumResolution resolution;

  int total_multiplicity() const {
    int n = 0;
    for (const auto& e : entries) n += e.multiplicity;
    return n;
  }
  /// lambda_0 <= lambda_1 <= ... with each value repeated by multiplicity,
  /// truncated to `count` (all when count < 0).
  std::vector<double> expanded(int count = -1) const {
    std::vector<double> out;
    for (const auto& e : entries)
      for (int k = 0; k < e.multiplicity; ++k) {
        if (count >= 0 && static_cast<int>(out.size()) >= count) return out;
        out.push_back(e.lambda);
      }
    return out;
  }
};

}  // namespace isl
