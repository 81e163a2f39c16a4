// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance --only k   run criterion k (exit status 1 if it fails)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "isl/ambarzumyan.hpp"
#include "isl/cli.hpp"
#include "isl/matshoot.hpp"
#include "isl/spectrum.hpp"

using namespace isl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ProblemSpec zero_spec(int n, double alpha, double a) {
  return ProblemSpec::make(n, alpha, a, PotentialField::zero(n));
}

ProblemSpec const_spec(int n, double alpha, double a, double c) {
  return ProblemSpec::make(n, alpha, a, PotentialField::constant(c * Matrix::Identity(n, n)));
}

ProblemSpec sin_spec(int n, double alpha, double a) {
  std::vector<double> coeffs;
  for (int i = 0; i < n; ++i) coeffs.push_back(1.0 - 0.5 * i);
  return ProblemSpec::make(n, alpha, a,
                           PotentialField::builtin("sin2x_diag", {{"coeffs", coeffs}}, n));
}

double envelope(int n, double alpha, double a, double s) {
  return std::pow(std::abs(s) * (alpha * a + 1.0 / a), n);
}

std::vector<double> band_expanded(const Spectrum& sp) {
  std::vector<double> out;
  for (const auto& e : sp.entries)
    for (int k = 0; k < e.multiplicity; ++k) out.push_back(e.residual);
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

Outcome criterion_1() {
  Timer timer;
  const auto spec = zero_spec(1, 1.0, 1.0);
  const auto sh = find_spectrum(spec, 6).expanded(6);
  const auto fd_sp = fd_oracle_spectrum(spec, 512, 6);
  const auto fd = fd_sp.expanded(6);
  const auto bands = band_expanded(fd_sp);
  Outcome o;
  double sh_err = 0, fd_excess = -1e300;
  if (sh.size() != 6 || fd.size() != 6) return {false, "fewer than 6 eigenvalues"};
  for (int n = 0; n < 6; ++n) {
    sh_err = std::max(sh_err, std::abs(sh[n] - n * n));
    fd_excess = std::max(fd_excess, std::abs(fd[n] - n * n) - bands[n]);
  }
  const double t = timer.seconds();
  o.pass = sh_err <= 1e-8 && fd_excess <= 0.0 && t < 5.0;
  o.detail = fmt("shooting max error %.3e, fd max(error - band) %.3e, %.2f s", sh_err, fd_excess, t);
  return o;
}

Outcome criterion_2() {
  Timer timer;
  double worst = 0.0;
  std::string where;
  for (int n : {1, 2, 3})
    for (double alpha : {0.5, 0.8})
      for (double a : {0.5, 2.0}) {
        const CharacteristicFunction w(zero_spec(n, alpha, a));
        std::vector<double> s(200);
        for (int k = 0; k < 200; ++k) s[k] = 0.1 + (30.0 - 0.1) * k / 199.0;
        for (double sk : s) {
          const Complex got = w(Complex{sk * sk, 0.0}).value();
          const double err =
              std::abs(got - omega0_exact_s(n, alpha, a, sk)) / envelope(n, alpha, a, sk);
          if (err > worst) {
            worst = err;
            where = fmt("N=%d alpha=%g a=%g s=%.3f", n, alpha, a, sk);
          }
        }
      }
  const double t = timer.seconds();
  return {worst <= 1e-8 && t < 30.0,
          fmt("max envelope-relative error %.3e at %s, %.2f s", worst, where.c_str(), t)};
}

Outcome criterion_3() {
  Timer timer;
  int total = 0, failed = 0, failed_n1 = 0;
  double worst30 = 0, worst60 = 0, worst_exact60 = 0;
  for (int n : {1, 2, 3})
    for (double alpha : {0.5, std::sqrt(0.5), 0.8})
      for (double a : {0.5, 1.0, 2.0})
        for (int qk = 0; qk < 3; ++qk) {
          const auto spec = qk == 0 ? zero_spec(n, alpha, a)
                            : qk == 1 ? const_spec(n, alpha, a, 0.5)
                                      : sin_spec(n, alpha, a);
          const CharacteristicFunction w(spec);
          const auto r30 = asymptotic_ratio(w, 30.0), r60 = asymptotic_ratio(w, 60.0);
          const bool ok = std::abs(r30.ratio - 1.0) <= 0.1 && std::abs(r60.ratio - 1.0) <= 0.03;
          ++total;
          if (!ok) {
            ++failed;
            if (n == 1) ++failed_n1;
          }
          worst30 = std::max(worst30, std::abs(r30.ratio - 1.0));
          worst60 = std::max(worst60, std::abs(r60.ratio - 1.0));
          worst_exact60 = std::max(worst_exact60, std::abs(r60.ratio_exact_constant - 1.0));
        }
  const double t = timer.seconds();
  return {failed == 0 && t < 20.0,
          fmt("%d of %d specs outside the bands (%d with N=1); max |ratio-1| %.3e at kappa=30, "
              "%.3e at kappa=60; with ((alpha a + 1/a)/4)^N the kappa=60 max is %.3e; %.2f s",
              failed, total, failed_n1, worst30, worst60, worst_exact60, t)};
}

Outcome criterion_4() {
  Outcome o;
  std::ostringstream d;
  for (int n : {1, 2, 3})
    for (double alpha : {0.5, 0.8})
      for (double a : {0.5, 2.0}) {
        const auto spec = zero_spec(n, alpha, a);
        const auto sh = find_spectrum(spec, n + 1);
        const auto fd = fd_oracle_spectrum(spec, 256, n + 1);
        const bool ok = std::abs(sh.entries[0].lambda) <= 1e-9 && sh.entries[0].multiplicity == n &&
                        std::abs(fd.entries[0].lambda) <= 1e-9 && fd.entries[0].multiplicity == n;
        if (!ok) {
          o.pass = false;
          d << fmt("[N=%d alpha=%g a=%g: shooting %.2e x%d, fd %.2e x%d] ", n, alpha, a,
                   sh.entries[0].lambda, sh.entries[0].multiplicity, fd.entries[0].lambda,
                   fd.entries[0].multiplicity);
        }
      }
  o.detail = o.pass ? "lambda_0 = 0 with multiplicity N from winding and FD clusters, 12 specs"
                    : d.str();
  return o;
}

Outcome criterion_5() {
  std::mt19937 rng(55);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_real_distribution<double> al(0.3, 1.0), aa(0.4, 2.5);
  std::normal_distribution<double> g;
  double worst_quad = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = dim(rng);
    nlohmann::json terms = nlohmann::json::array();
    for (int k = 0; k <= 4; ++k) {
      std::vector<double> c(n * n), s(n * n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          c[i * n + j] = c[j * n + i] = g(rng);
          s[i * n + j] = s[j * n + i] = g(rng);
        }
      terms.push_back({{"k", k}, {"cos", c}, {"sin", s}});
    }
    const auto spec = ProblemSpec::make(n, al(rng), aa(rng),
                                        PotentialField::builtin("fourier", {{"terms", terms}}, n));
    for (int i = 1; i <= n; ++i) {
      const auto r = rayleigh_quotient(spec, i);
      worst_quad = std::max(worst_quad, std::abs(r.closed_form - r.quadrature) /
                                            std::max(1.0, std::abs(r.quadrature)));
    }
  }
  const double c = 0.5;
  double worst_target = 0.0, worst_target_a1 = 0.0, worst_true = 0.0;
  for (double a : {0.5, 1.0, 2.0})
    for (double alpha : {0.5, 0.8}) {
      const auto r = rayleigh_quotient(const_spec(2, alpha, a, c), 1);
      const double target = c * (1 + a * a) / (1 + alpha * alpha * a);
      const double truth = c * (1 + a * a) / (1 + alpha * alpha * a * a);
      worst_target = std::max(worst_target, std::abs(r.closed_form - target));
      if (a == 1.0) worst_target_a1 = std::max(worst_target_a1, std::abs(r.closed_form - target));
      worst_true = std::max(worst_true, std::abs(r.quadrature - truth));
    }
  return {worst_quad <= 1e-9 && worst_target <= 1e-10,
          fmt("closed form vs quadrature %.3e over 20 random Q; Q=cI vs c(1+a^2)/(1+alpha^2 a): "
              "%.3e over a in {1/2,1,2} (%.3e at a=1); quadrature vs c(1+a^2)/(1+alpha^2 a^2): %.3e",
              worst_quad, worst_target, worst_target_a1, worst_true)};
}

Outcome criterion_6() {
  Outcome o;
  std::ostringstream d;
  for (auto [n, alpha, a] : {std::tuple{1, 0.5, 1.0}, std::tuple{2, 0.5, 2.0}, std::tuple{3, 0.8, 0.5}}) {
    CompareOptions opts;
    opts.count = 12;
    const auto r = compare_spectra(const_spec(n, alpha, a, 0.5), zero_spec(n, alpha, a), opts);
    const bool ok = r.traces_nonzero && r.max_distance > 1e-3 && r.verdict == Verdict::Inconsistent;
    o.pass &= ok;
    d << fmt("N=%d alpha=%g a=%g: traces (%.4f, %.4f), max distance %.4e; ", n, alpha, a,
             r.traces.trace_q1, r.traces.trace_q2, r.max_distance);
  }
  o.detail = d.str();
  return o;
}

Outcome criterion_7() {
  const auto spec = ProblemSpec::make(
      2, 0.5, 1.0, PotentialField::builtin("sin2x_diag", {{"coeffs", {0.3, -0.3}}}, 2));
  const auto spec0 = zero_spec(2, 0.5, 1.0);
  const auto traces = trace_conditions(spec);
  const auto sh = find_spectrum(spec, 12).expanded(12);
  const auto sh0 = find_spectrum(spec0, 12).expanded(12);
  const auto fd = fd_oracle_spectrum(spec, 512, 12).expanded(12);
  const auto fd0 = fd_oracle_spectrum(spec0, 512, 12).expanded(12);
  if (sh.size() < 12 || fd.size() < 12 || sh0.size() < 12 || fd0.size() < 12)
    return {false, "fewer than 12 eigenvalues"};
  double d_sh = 0, d_fd = 0, agree = 0;
  for (int k = 0; k < 12; ++k) {
    d_sh = std::max(d_sh, std::abs(sh[k] - sh0[k]));
    d_fd = std::max(d_fd, std::abs(fd[k] - fd0[k]));
    agree = std::max(agree, std::abs(sh[k] - fd[k]));
  }
  const bool traces_zero = std::abs(traces.trace_q1) < 1e-12 && std::abs(traces.trace_q2) < 1e-12;
  return {traces_zero && d_sh > 1e-3 && d_fd > 1e-3 && agree <= 1e-4,
          fmt("traces (%.1e, %.1e); max distance to sigma(0): shooting %.4e, fd %.4e; "
              "shooting vs fd %.3e",
              traces.trace_q1, traces.trace_q2, d_sh, d_fd, agree)};
}

Outcome criterion_8() {
  const auto spec = zero_spec(1, 1.0, 1.0);
  const CharacteristicFunction w(spec);
  const auto sp = find_spectrum(spec, 60);
  const auto h = hadamard_check(w, sp, 40, 30.0, -10.0, 50.0, 0.2, 601,
                                [&](Complex l) { return omega0_exact(spec, l); });
  return {h.max_rel_error <= 0.05,
          fmt("M=40, kappa=30: max relative error %.3e at lambda=%.3f (%d samples, %d excluded)",
              h.max_rel_error, h.worst_lambda, h.samples, h.excluded)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_9() {
  std::ostringstream d;
  bool pass = true;

  // Wronskian, scaled by the frame magnitude.
  const auto field = std::make_shared<const PotentialField>(PotentialField::builtin(
      "fourier",
      {{"terms", {{{"k", 1}, {"cos", {0.4, 0.3, 0.3, -0.2}}}, {{"k", 3}, {"sin", {1.0, -0.5, -0.5, 0.7}}}}}},
      2));
  const HalfPotential left(field, Half::Left);
  double wr = 0.0;
  for (double mu : {-900.0, -3.0, 0.5, 40.0, 400.0}) {
    PropagateOptions opts;
    opts.observer = [&](const ShootingFrame& f) {
      const double scale = std::max(f.phi.cwiseAbs().maxCoeff(), f.dphi.cwiseAbs().maxCoeff());
      wr = std::max(wr, f.wronskian().cwiseAbs().maxCoeff() / (scale * scale));
    };
    propagate(left, {mu, 0.0}, default_steps({mu, 0.0}, 2.0), opts);
  }
  pass &= wr <= 1e-9;
  d << fmt("wronskian %.2e; ", wr);

  // Realness on the real axis.
  const CharacteristicFunction w(ProblemSpec::make(2, 0.8, 0.5, PotentialField(*field)));
  double re = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double lambda = -200.0 + 10.0 * k;
    const auto v = w(Complex{lambda, 0.0});
    if (v.raw) re = std::max(re, std::abs(v.raw->imag()) / std::abs(*v.raw));
  }
  pass &= re <= 1e-9;
  d << fmt("realness %.2e; ", re);

  // RK4 order.
  {
    const HalfPotential q(std::make_shared<const PotentialField>(
                              PotentialField::constant(Matrix::Constant(1, 1, 2.0))),
                          Half::Left);
    const double om = std::sqrt(28.0), exact = std::cos(om * kHalfPi);
    std::vector<double> lh, le;
    for (int steps : {32, 64, 128, 256}) {
      const auto f = propagate(q, {30.0, 0.0}, steps);
      lh.push_back(std::log(kHalfPi / steps));
      le.push_back(std::log(std::abs(f.scaled_phi()(0, 0).real() - exact)));
    }
    const double slope = fit_slope(lh, le);
    pass &= slope >= 3.7 && slope <= 4.3;
    d << fmt("RK4 slope %.3f; ", slope);
  }

  // FD order.
  {
    const auto spec = zero_spec(1, 1.0, 1.0);
    std::vector<double> lh, le;
    for (int m : {32, 64, 128, 256}) {
      const auto ev = fd_eigenvalues(spec, m, 5);
      lh.push_back(std::log(kHalfPi / m));
      le.push_back(std::log(std::abs(ev[4] - 16.0)));
    }
    const double slope = fit_slope(lh, le);
    pass &= slope >= 1.7 && slope <= 2.3;
    d << fmt("FD slope %.3f; ", slope);
  }

  // CLI determinism.
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("isl_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "p.json")
      << R"({"N":2,"alpha":0.5,"a":2,"potential":{"type":"builtin","name":"sin2x_diag","params":{"coeffs":[0.3,-0.3]}}})";
  auto run = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "isl");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  bool same = true;
  int files = 0;
  for (const char* out : {"r1", "r2"}) {
    const std::string dir = (root / out).string(), problem = (root / "p.json").string();
    same &= run({"spectrum", "--problem", problem, "--count", "8", "--mesh", "128", "--out", dir}) == 0;
    same &= run({"charfn", "--problem", problem, "--s-max", "6", "--out", dir}) == 0;
    same &= run({"oracle-compare", "--problem", problem, "--count", "6", "--mesh", "128", "--out", dir}) == 0;
  }
  for (const auto& entry : fs::directory_iterator(root / "r1")) {
    ++files;
    same &= slurp(entry.path()) == slurp(root / "r2" / entry.path().filename());
  }
  fs::remove_all(root);
  pass &= same && files > 0;
  d << fmt("CLI reruns byte-identical over %d files: %s", files, same ? "yes" : "no");
  return {pass, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"classical-limit spectrum", criterion_1},
      {"zero-potential closed-form agreement", criterion_2},
      {"imaginary-axis asymptotic", criterion_3},
      {"first eigenvalue and multiplicity", criterion_4},
      {"Rayleigh closed form", criterion_5},
      {"trace-condition necessity", criterion_6},
      {"trace-free contrapositive", criterion_7},
      {"Hadamard reconstruction", criterion_8},
      {"property suites", criterion_9},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "--only must be in 1..%zu\n", criteria.size());
    return 2;
  }
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<int>(k) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %zu (%s): %s: %s\n", k + 1, criteria[k].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
