#include "isl/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <ostream>

#include "isl/ambarzumyan.hpp"
#include "isl/parallel.hpp"
#include "isl/problem_io.hpp"
#include "isl/report_io.hpp"
#include "isl/spectrum.hpp"

namespace isl::cli {

void RunConfig::validate() const {
  if (problem.empty()) throw ConfigError("problem", "a problem file is required");
  if (count < 1 || count > 400) throw ConfigError("count", "must be in [1, 400]");
  if (!(s_min >= 0.0)) throw ConfigError("s-min", "must be >= 0");
  if (!(s_max >= 0.0) || !std::isfinite(s_max)) throw ConfigError("s-max", "must be finite and >= 0");
  if (!(s_step >= 0.0) || !std::isfinite(s_step)) throw ConfigError("s-step", "must be finite and >= 0");
  if (mesh < 64 || mesh > (1 << 16)) throw ConfigError("mesh", "must be in [64, 65536]");
  if (out.empty()) throw ConfigError("out", "must name a directory");
  for (double k : kappa)
    if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("kappa", "entries must be positive");
  if (!(tol > 0.0)) throw ConfigError("tol", "must be > 0");
  if (threads < 0 || threads > 1024) throw ConfigError("threads", "must be in [0, 1024]");
  if (n_max < 8 || n_max > 1000) throw ConfigError("n-max", "must be in [8, 1000]");
  if (hadamard_m < 1 || hadamard_m > 400) throw ConfigError("hadamard-m", "must be in [1, 400]");
}

nlohmann::json RunConfig::to_json() const {
  return {{"command", command}, {"problem_file", problem}, {"count", count},
          {"s_min", s_min},     {"s_max", s_max},          {"s_step", s_step},
          {"mesh", mesh},       {"kappa", kappa},          {"tol", tol},
          {"n_max", n_max},     {"hadamard_m", hadamard_m}};
}

namespace {

struct Context {
  RunConfig cfg;
  ProblemSpec spec;
  nlohmann::json config;  // resolved config embedded in every output
  std::filesystem::path out;
  std::ostream& log;
};

std::string path_in(const Context& c, const char* name) { return (c.out / name).string(); }

int cmd_spectrum(Context& c) {
  SpectrumOptions so;
  so.s_step = c.cfg.s_step;
  if (c.cfg.s_max > 0.0) so.max_s = c.cfg.s_max;
  const auto shooting = find_spectrum(c.spec, c.cfg.count, so);
  const auto fd = fd_oracle_spectrum(c.spec, c.cfg.mesh, c.cfg.count);
  const auto diff = spectrum_diff(shooting, fd, c.cfg.count);

  write_file(path_in(c, "spectrum_shooting.csv"), spectrum_csv(shooting, c.config));
  write_file(path_in(c, "spectrum_fd.csv"), spectrum_csv(fd, c.config));
  write_file(path_in(c, "spectrum_diff.csv"), spectrum_diff_csv(diff, c.config));
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : diff)
    rows.push_back({{"index", r.index},
                    {"lambda_shooting", r.shooting},
                    {"lambda_fd", r.fd},
                    {"difference", r.difference},
                    {"fd_band", r.band}});
  const nlohmann::json doc = {
      {"config", c.config}, {"shooting", to_json(shooting)}, {"fd_oracle", to_json(fd)}, {"diff", rows}};
  write_file(path_in(c, "spectrum.json"), doc.dump(2) + "\n");

  c.log << "spectrum: " << shooting.total_multiplicity() << " shooting / "
        << fd.total_multiplicity() << " fd eigenvalues written to " << c.out.string() << "\n";
  return kExitOk;
}

int cmd_charfn(Context& c) {
  const double step = c.cfg.s_step > 0.0 ? c.cfg.s_step : 0.05;
  const double s_max = c.cfg.s_max > 0.0 ? c.cfg.s_max : 30.0;
  const double s_min = c.cfg.s_min > 0.0 ? c.cfg.s_min : step;
  if (s_min > s_max) throw ConfigError("s-max", "empty s-range (s-min > s-max)");
  std::vector<double> grid;
  for (long k = 0;; ++k) {
    const double s = s_min + static_cast<double>(k) * step;
    if (s > s_max * (1.0 + 1e-12)) break;
    grid.push_back(s);
    if (grid.size() > 2000000) throw ConfigError("s-step", "grid exceeds 2e6 points");
  }
  const CharacteristicFunction omega(c.spec);
  write_file(path_in(c, "charfn.csv"), charfn_csv(charfn_table(omega, grid), c.config));
  c.log << "charfn: " << grid.size() << " samples written to " << path_in(c, "charfn.csv") << "\n";
  return kExitOk;
}

double asymptotic_band(double kappa) {
  if (kappa >= 60.0) return 0.03;
  if (kappa >= 30.0) return 0.1;
  return 0.0;
}

int cmd_verify(Context& c) {
  const auto spec0 = c.spec.with_zero_potential();
  CompareOptions co;
  co.count = c.cfg.count;
  co.tol = c.cfg.tol;
  co.shooting.s_step = c.cfg.s_step;
  co.fd_mesh = c.cfg.mesh;
  const auto report = compare_spectra(c.spec, spec0, co);

  const CharacteristicFunction omega(c.spec);
  const auto sampling = sampling_diagnostic(omega, c.cfg.n_max);

  nlohmann::json checks = nlohmann::json::array();
  auto check = [&](const std::string& name, double value, double bound, bool pass) {
    checks.push_back({{"name", name}, {"value", value}, {"bound", bound}, {"pass", pass}});
  };

  nlohmann::json asym = nlohmann::json::array();
  for (double kappa : c.cfg.kappa) {
    const auto r = asymptotic_ratio(omega, kappa);
    const double band = asymptotic_band(kappa);
    nlohmann::json row = {{"kappa", kappa},
                          {"log_abs_omega", r.log_abs_omega},
                          {"sign", r.sign},
                          {"ratio", r.ratio},
                          {"ratio_exact_constant", r.ratio_exact_constant}};
    if (band > 0.0) {
      row["band"] = band;
      row["within_band"] = std::abs(r.ratio - 1.0) <= band;
      check("asymptotic_ratio_kappa_" + format_double(kappa), r.ratio, band,
            std::abs(r.ratio - 1.0) <= band);
    }
    asym.push_back(row);
  }

  double worst_rayleigh = 0.0;
  for (const auto& v : report.rayleigh)
    worst_rayleigh = std::max(worst_rayleigh, std::abs(v.closed_form - v.quadrature) /
                                                  std::max(1.0, std::abs(v.quadrature)));
  check("rayleigh_closed_form_vs_quadrature", worst_rayleigh, 1e-9, worst_rayleigh <= 1e-9);

  const CharacteristicFunction omega0(spec0);
  const auto sigma0 = find_spectrum(spec0, c.cfg.hadamard_m);
  const double kappa_h = c.cfg.kappa.empty() ? 30.0 : c.cfg.kappa.front();
  const auto hc = hadamard_check(omega0, sigma0, c.cfg.hadamard_m, kappa_h, -10.0, 50.0, 0.2, 601,
                                 [&](Complex l) { return omega0_exact(spec0, l); });
  check("hadamard_reconstruction", hc.max_rel_error, 0.05, hc.max_rel_error <= 0.05);
  if (c.spec.potential->is_zero())
    check("reflexive_consistency", report.max_distance, report.tol,
          report.verdict == Verdict::ConsistentWithZeroPotential);

  const nlohmann::json doc = {{"config", c.config},
                              {"ambarzumyan", to_json(report)},
                              {"sampling", to_json(sampling)},
                              {"asymptotic", asym},
                              {"hadamard", to_json(hc)},
                              {"checks", checks}};
  write_file(path_in(c, "verify.json"), doc.dump(2) + "\n");

  std::string text = "# config: " + c.config.dump() + "\n\n" + to_text(report) + "\n";
  char buf[192];
  for (const auto& a : asym) {
    std::snprintf(buf, sizeof buf, "asymptotic kappa=%-8g ratio=%.12e exact_constant_ratio=%.12e\n",
                  a["kappa"].get<double>(), a["ratio"].get<double>(),
                  a["ratio_exact_constant"].get<double>());
    text += buf;
  }
  std::snprintf(buf, sizeof buf, "hadamard M=%d kappa=%g max_rel_error=%.12e\n", c.cfg.hadamard_m,
                kappa_h, hc.max_rel_error);
  text += buf;
  for (const auto& ch : checks) {
    std::snprintf(buf, sizeof buf, "check %-40s %s value=%.12e bound=%.12e\n",
                  ch["name"].get<std::string>().c_str(), ch["pass"].get<bool>() ? "PASS" : "FAIL",
                  ch["value"].get<double>(), ch["bound"].get<double>());
    text += buf;
  }
  write_file(path_in(c, "verify.txt"), text);

  c.log << "verify: verdict " << to_string(report.verdict) << ", report in "
        << path_in(c, "verify.json") << "\n";
  return kExitOk;
}

int cmd_oracle_compare(Context& c) {
  SpectrumOptions so;
  so.s_step = c.cfg.s_step;
  if (c.cfg.s_max > 0.0) so.max_s = c.cfg.s_max;
  const auto shooting = find_spectrum(c.spec, c.cfg.count, so);
  const auto fd = fd_oracle_spectrum(c.spec, c.cfg.mesh, c.cfg.count);
  const auto diff = spectrum_diff(shooting, fd, c.cfg.count);

  bool agree = static_cast<int>(diff.size()) == c.cfg.count;
  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : diff) {
    const double bound = std::max(1e-4, r.band);
    const bool ok = std::abs(r.difference) <= bound;
    agree = agree && ok;
    worst = std::max(worst, std::abs(r.difference));
    rows.push_back({{"index", r.index},
                    {"lambda_shooting", r.shooting},
                    {"lambda_fd", r.fd},
                    {"difference", r.difference},
                    {"bound", bound},
                    {"within_bound", ok}});
  }
  write_file(path_in(c, "oracle_compare.csv"), spectrum_diff_csv(diff, c.config));
  const nlohmann::json doc = {{"config", c.config},
                              {"rows", rows},
                              {"max_abs_difference", worst},
                              {"agree", agree},
                              {"shooting_diagnostics", shooting.resolution.diagnostics},
                              {"fd_diagnostics", fd.resolution.diagnostics}};
  write_file(path_in(c, "oracle_compare.json"), doc.dump(2) + "\n");
  c.log << "oracle-compare: " << (agree ? "agree" : "DISAGREE") << ", max |difference| "
        << format_double(worst) << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra and characteristic functions of the impulsive matrix Sturm-Liouville problem"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--problem", cfg.problem, "Problem definition file (JSON)")->required();
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = hardware concurrency)");
    sub->add_option("--s-step", cfg.s_step, "Grid step in s");
    sub->add_option("--s-max", cfg.s_max, "Upper end of the s range");
    sub->add_option("--tol", cfg.tol, "Tolerance");
  };

  auto* spectrum = app.add_subcommand("spectrum", "Shooting and FD-oracle spectra with differences");
  add_common(spectrum);
  spectrum->add_option("--count", cfg.count, "Eigenvalue count (with multiplicity)");
  spectrum->add_option("--mesh", cfg.mesh, "FD nodes per half (coarse mesh)");

  auto* charfn = app.add_subcommand("charfn", "Samples of omega along lambda = s^2");
  add_common(charfn);
  charfn->add_option("--s-min", cfg.s_min, "Lower end of the s range (0 = s-step)");

  auto* verify = app.add_subcommand("verify", "Trace, Rayleigh, sampling, asymptotic and Hadamard checks");
  add_common(verify);
  int verify_count = 20;
  verify->add_option("--count", verify_count, "Compared eigenvalue count");
  verify->add_option("--mesh", cfg.mesh, "FD nodes per half for the cross-check");
  verify->add_option("--kappa", cfg.kappa, "Imaginary-axis kappa values")->delimiter(',');
  verify->add_option("--n-max", cfg.n_max, "Length of the sampling sequences");
  verify->add_option("--hadamard-m", cfg.hadamard_m, "Truncation of the Hadamard product");

  auto* oracle = app.add_subcommand("oracle-compare", "Agreement of shooting and FD oracle");
  add_common(oracle);
  oracle->add_option("--count", cfg.count, "Eigenvalue count (with multiplicity)");
  oracle->add_option("--mesh", cfg.mesh, "FD nodes per half (coarse mesh)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "verify") cfg.count = verify_count;

  try {
    cfg.validate();
    if (cfg.threads > 0) set_worker_count(cfg.threads);
    auto spec = load_problem_file(cfg.problem);
    nlohmann::json config = cfg.to_json();
    config["problem"] = spec.to_json();
    std::filesystem::path dir(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("out", "cannot create directory: " + ec.message());
    Context ctx{cfg, std::move(spec), std::move(config), dir, out};
    if (cfg.command == "spectrum") return cmd_spectrum(ctx);
    if (cfg.command == "charfn") return cmd_charfn(ctx);
    if (cfg.command == "verify") return cmd_verify(ctx);
    return cmd_oracle_compare(ctx);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MultiplicityError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace isl::cli
