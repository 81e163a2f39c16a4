#pragma once

// Deterministic CSV/JSON emission. Every float is written with "%.12e"; every
// file starts with the resolved run configuration.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isl/charfn.hpp"
#include "isl/spectrum_types.hpp"

namespace isl {

std::string format_double(double v);

struct CharfnRow {
  double lambda = 0.0;
  double s = 0.0;
  double log_abs_omega = 0.0;
  int sign = 0;
  double omega0_paper = 0.0;
  double omega0_exact = 0.0;
  double g = 0.0;
};

/// One row per s (lambda = s^2), evaluated in parallel, ordered as `s_values`.
std::vector<CharfnRow> charfn_table(const CharacteristicFunction& omega,
                                    const std::vector<double>& s_values);

/// "# config: <compact json>" followed by the header and rows.
std::string charfn_csv(const std::vector<CharfnRow>& rows, const nlohmann::json& config);
std::string spectrum_csv(const Spectrum& spectrum, const nlohmann::json& config);

struct SpectrumDiffRow {
  int index = 0;
  double shooting = 0.0;
  double fd = 0.0;
  double difference = 0.0;
  double band = 0.0;  // FD cluster band of the entry holding this index
};

/// Per-index comparison of two multiplicity-expanded spectra.
std::vector<SpectrumDiffRow> spectrum_diff(const Spectrum& shooting, const Spectrum& fd, int count);
std::string spectrum_diff_csv(const std::vector<SpectrumDiffRow>& rows, const nlohmann::json& config);

nlohmann::json to_json(const Spectrum& spectrum);

/// Writes text to path, throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace isl
