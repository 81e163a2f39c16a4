#include "isl/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "isl/parallel.hpp"

namespace isl {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

namespace {

std::string config_line(const nlohmann::json& config) { return "# config: " + config.dump() + "\n"; }

}  // namespace

std::vector<CharfnRow> charfn_table(const CharacteristicFunction& omega,
                                    const std::vector<double>& s_values) {
  const auto& spec = omega.spec();
  const auto model = AsymptoticModel::from(spec, omega.halves());
  return parallel_map(s_values.size(), [&](std::size_t i) {
    const double s = s_values[i];
    const Complex lambda{s * s, 0.0};
    const auto w = omega(lambda);
    CharfnRow r;
    r.lambda = s * s;
    r.s = s;
    r.log_abs_omega = w.log_mag;
    r.sign = w.sign();
    r.omega0_paper = omega0_paper_s(spec.dim, spec.alpha, spec.a, Complex{s, 0.0}).real();
    r.omega0_exact = omega0_exact_s(spec.dim, spec.alpha, spec.a, Complex{s, 0.0}).real();
    r.g = asym_ABG(model, lambda).G.real();
    return r;
  });
}

std::string charfn_csv(const std::vector<CharfnRow>& rows, const nlohmann::json& config) {
  std::ostringstream os;
  os << config_line(config) << "lambda,s,log_abs_omega,sign,omega0_paper,omega0_exact,G\n";
  for (const auto& r : rows)
    os << format_double(r.lambda) << ',' << format_double(r.s) << ','
       << format_double(r.log_abs_omega) << ',' << r.sign << ',' << format_double(r.omega0_paper)
       << ',' << format_double(r.omega0_exact) << ',' << format_double(r.g) << '\n';
  return os.str();
}

std::string spectrum_csv(const Spectrum& spectrum, const nlohmann::json& config) {
  std::ostringstream os;
  os << config_line(config) << "index,lambda,multiplicity,method,residual\n";
  int index = 0;
  for (const auto& e : spectrum.entries) {
    os << index << ',' << format_double(e.lambda) << ',' << e.multiplicity << ','
       << to_string(spectrum.method) << ',' << format_double(e.residual) << '\n';
    index += e.multiplicity;
  }
  return os.str();
}

std::vector<SpectrumDiffRow> spectrum_diff(const Spectrum& shooting, const Spectrum& fd, int count) {
  const auto a = shooting.expanded(count), b = fd.expanded(count);
  std::vector<double> bands;
  for (const auto& e : fd.entries)
    for (int k = 0; k < e.multiplicity; ++k) bands.push_back(e.residual);
  std::vector<SpectrumDiffRow> rows;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
    rows.push_back({static_cast<int>(k), a[k], b[k], a[k] - b[k], bands[k]});
  return rows;
}

std::string spectrum_diff_csv(const std::vector<SpectrumDiffRow>& rows, const nlohmann::json& config) {
  std::ostringstream os;
  os << config_line(config) << "index,lambda_shooting,lambda_fd,difference,fd_band\n";
  for (const auto& r : rows)
    os << r.index << ',' << format_double(r.shooting) << ',' << format_double(r.fd) << ','
       << format_double(r.difference) << ',' << format_double(r.band) << '\n';
  return os.str();
}

nlohmann::json to_json(const Spectrum& spectrum) {
  nlohmann::json entries = nlohmann::json::array();
  int index = 0;
  for (const auto& e : spectrum.entries) {
    entries.push_back({{"index", index},
                       {"lambda", e.lambda},
                       {"multiplicity", e.multiplicity},
                       {"method", to_string(spectrum.method)},
                       {"residual", e.residual}});
    index += e.multiplicity;
  }
  const auto& r = spectrum.resolution;
  return {{"method", to_string(spectrum.method)},
          {"entries", entries},
          {"resolution",
           {{"s_step", r.s_step},
            {"tolerance", r.tolerance},
            {"s_max", r.s_max},
            {"mesh", r.mesh},
            {"steps", r.steps},
            {"diagnostics", r.diagnostics}}}};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path);
}

}  // namespace isl
