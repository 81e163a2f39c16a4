#include "isl/ambarzumyan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "isl/parallel.hpp"

namespace isl {

Eigen::VectorXd TestVectorField::left() const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  e(index - 1) = 1.0;
  return e;
}

Eigen::VectorXd TestVectorField::right() const { return a * left(); }

Eigen::VectorXd TestVectorField::operator()(double x) const { return x < kHalfPi ? left() : right(); }

double TestVectorField::value_jump_residual() const { return (right() - a * left()).norm(); }

TraceConditions trace_conditions(const HalfPotentials& halves) {
  return {halves.avg_q1.value.trace(), halves.avg_q2.value.trace()};
}

TraceConditions trace_conditions(const ProblemSpec& spec) {
  return trace_conditions(reflect_potential(spec));
}

namespace {

// Composite 5-point Gauss-Legendre over [lo, hi] with panel doubling.
template <class F>
double gauss_legendre(F&& f, const std::vector<double>& cuts, double rel_tol = 1e-14) {
  static constexpr double kX[5] = {0.0, -0.5384693101056831, 0.5384693101056831,
                                   -0.9061798459386640, 0.9061798459386640};
  static constexpr double kW[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                   0.2369268850561891, 0.2369268850561891};
  auto rule = [&](int panels) {
    double total = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double h = (cuts[c + 1] - cuts[c]) / panels;
      for (int p = 0; p < panels; ++p) {
        const double mid = cuts[c] + (p + 0.5) * h;
        for (int k = 0; k < 5; ++k) total += 0.5 * h * kW[k] * f(mid + 0.5 * h * kX[k]);
      }
    }
    return total;
  };
  double prev = rule(8);
  for (int panels = 16; panels <= (1 << 14); panels *= 2) {
    const double cur = rule(panels);
    if (std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

std::vector<double> cuts_of(const PotentialField& q, Half side) {
  std::vector<double> cuts{side == Half::Left ? 0.0 : kHalfPi};
  for (double b : q.breakpoints(side)) cuts.push_back(b);
  cuts.push_back(side == Half::Left ? kHalfPi : kPi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

}  // namespace

RayleighValue rayleigh_quotient(const ProblemSpec& spec, int i) {
  if (i < 1 || i > spec.dim) throw ConfigError("i", "test vector index must be in 1..N");
  const auto halves = reflect_potential(spec);
  const double a = spec.a, al = spec.alpha;
  const auto k = static_cast<Eigen::Index>(i - 1);
  const double num = 2.0 * halves.avg_q1.value(k, k) + 2.0 * a * a * halves.avg_q2.value(k, k);

  RayleighValue r;
  r.index = i;
  r.closed_form = num / (kHalfPi * (1.0 + al * al * a * a));
  r.printed_formula = num / (kHalfPi * (1.0 + al * al * a));

  const TestVectorField y{i, spec.dim, a};
  const auto& q = *spec.potential;
  Matrix m;
  double energy = 0.0, mass = 0.0;
  for (Half side : {Half::Left, Half::Right}) {
    const Eigen::VectorXd v = side == Half::Left ? y.left() : y.right();
    const double rho = side == Half::Left ? 1.0 : al * al;
    const auto cuts = cuts_of(q, side);
    energy += gauss_legendre(
        [&](double x) {
          q.evaluate_into(x, side, m);
          return v.dot(m * v);
        },
        cuts);
    mass += gauss_legendre([&](double) { return rho * v.squaredNorm(); }, cuts);
  }
  r.quadrature = energy / mass;
  return r;
}

SamplingReport sampling_diagnostic(const CharacteristicFunction& omega, int n_max,
                                   double trace_tol) {
  if (n_max < 8) throw ConfigError("n_max", "must be >= 8");
  const auto& spec = omega.spec();
  const int dim = spec.dim;
  const double al = spec.alpha, a = spec.a;
  const auto model = AsymptoticModel::from(spec, omega.halves());

  SamplingReport rep;
  rep.traces = trace_conditions(omega.halves());
  rep.trace_q2_nonzero = std::abs(rep.traces.trace_q2) > trace_tol;
  {
    int e = 0;
    const double mant = std::frexp(al, &e);
    const auto num = static_cast<long long>(std::ldexp(mant, 53));
    long long n = num;
    int shift = 53 - e;
    while (shift > 0 && n % 2 == 0) {
      n /= 2;
      --shift;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "alpha = %.17g is the binary rational %lld/2^%d", al, n, shift);
    rep.alpha_note = buf;
  }

  auto run = [&](std::string name, std::string model_text, auto s_of, auto model_of) {
    SamplingSequence seq;
    seq.name = std::move(name);
    seq.model = std::move(model_text);
    seq.points.resize(static_cast<std::size_t>(n_max));
    auto pts = parallel_map(static_cast<std::size_t>(n_max), [&](std::size_t k) {
      const int n = static_cast<int>(k) + 1;
      SamplingPoint p;
      p.n = n;
      p.s = s_of(n);
      const Complex lambda{p.s * p.s, 0.0};
      const double w = omega(lambda).value().real();
      const double w0 = omega0_paper(spec, lambda).real();
      p.residual = (w - w0) / ipow(p.s, dim - 1);
      p.model = model_of(n);
      p.g = asym_ABG(model, lambda).G.real();
      p.residual_minus_model = p.residual - p.model;
      p.residual_minus_g = p.residual - p.g;
      return p;
    });
    seq.points = std::move(pts);
    for (std::size_t k = seq.points.size() / 2; k < seq.points.size(); ++k) {
      seq.max_abs_model_tail = std::max(seq.max_abs_model_tail, std::abs(seq.points[k].model));
      seq.max_abs_residual_minus_g_tail =
          std::max(seq.max_abs_residual_minus_g_tail, std::abs(seq.points[k].residual_minus_g));
    }
    rep.sequences.push_back(std::move(seq));
  };

  const double t2 = rep.traces.trace_q2;
  run("s=2n", "a tr[Q2] cos(n pi alpha) (2 sin(n pi alpha))^(N-1)", [](int n) { return 2.0 * n; },
      [&](int n) {
        return a * t2 * std::cos(n * kPi * al) * ipow(2.0 * std::sin(n * kPi * al), dim - 1);
      });
  if (al == 0.5)
    run("s=8n+1", "a^-1 tr[Q2]", [](int n) { return 8.0 * n + 1.0; },
        [&](int) { return t2 / a; });
  return rep;
}

const char* to_string(Verdict v) {
  return v == Verdict::ConsistentWithZeroPotential ? "consistent-with-zero-potential"
                                                   : "inconsistent";
}

AmbarzumyanReport compare_spectra(const ProblemSpec& spec_q, const ProblemSpec& spec0,
                                  const CompareOptions& opts) {
  if (spec_q.dim != spec0.dim || spec_q.alpha != spec0.alpha || spec_q.a != spec0.a)
    throw ConfigError("spec0", "must share N, alpha and a with the tested problem");
  if (opts.count < 1) throw ConfigError("count", "must be >= 1");

  AmbarzumyanReport r;
  r.count = opts.count;
  r.tol = opts.tol;
  r.trace_tol = opts.trace_tol;
  r.traces = trace_conditions(spec_q);
  for (int i = 1; i <= spec_q.dim; ++i) r.rayleigh.push_back(rayleigh_quotient(spec_q, i));

  const auto sq = find_spectrum(spec_q, opts.count, opts.shooting);
  const auto s0 = find_spectrum(spec0, opts.count, opts.shooting);
  r.sigma_q = sq.expanded(opts.count);
  r.sigma_0 = s0.expanded(opts.count);
  for (const auto& d : sq.resolution.diagnostics) r.diagnostics.push_back("sigma(Q): " + d);
  for (const auto& d : s0.resolution.diagnostics) r.diagnostics.push_back("sigma(0): " + d);

  const std::size_t n = std::min(r.sigma_q.size(), r.sigma_0.size());
  if (n < static_cast<std::size_t>(opts.count))
    r.diagnostics.push_back("compared only " + std::to_string(n) + " of " +
                            std::to_string(opts.count) + " entries");
  for (std::size_t k = 0; k < n; ++k) {
    const double d = std::abs(r.sigma_q[k] - r.sigma_0[k]);
    r.distances.push_back(d);
    if (d > r.max_distance || r.max_distance_index < 0) {
      r.max_distance = d;
      r.max_distance_index = static_cast<int>(k);
    }
  }

  if (opts.fd_mesh > 0) {
    r.fd_sigma_q = fd_oracle_spectrum(spec_q, opts.fd_mesh, opts.count).expanded(opts.count);
    r.fd_sigma_0 = fd_oracle_spectrum(spec0, opts.fd_mesh, opts.count).expanded(opts.count);
    const std::size_t m = std::min(r.fd_sigma_q.size(), r.fd_sigma_0.size());
    for (std::size_t k = 0; k < m; ++k) r.fd_distances.push_back(std::abs(r.fd_sigma_q[k] - r.fd_sigma_0[k]));
    double dis = 0.0;
    for (std::size_t k = 0; k < std::min(r.fd_sigma_q.size(), r.sigma_q.size()); ++k)
      dis = std::max(dis, std::abs(r.fd_sigma_q[k] - r.sigma_q[k]));
    r.method_disagreement = dis;
  }

  r.traces_nonzero =
      std::abs(r.traces.trace_q1) > opts.trace_tol || std::abs(r.traces.trace_q2) > opts.trace_tol;
  r.spectra_differ = r.max_distance > opts.tol;
  if (!r.sigma_q.empty())
    for (const auto& rv : r.rayleigh)
      if (r.sigma_q.front() > rv.closed_form + 1e-8 * (1.0 + std::abs(rv.closed_form)))
        r.variational_bound_holds = false;
  r.verdict = (r.traces_nonzero || r.spectra_differ) ? Verdict::Inconsistent
                                                     : Verdict::ConsistentWithZeroPotential;
  return r;
}

HadamardCheck hadamard_check(const CharacteristicFunction& omega, const Spectrum& spectrum, int M,
                             double kappa, double lo, double hi, double disk, int samples,
                             const std::function<Complex(Complex)>& reference) {
  if (samples < 2) throw ConfigError("samples", "must be >= 2");
  HadamardCheck out;
  out.model = hadamard_reconstruct(spectrum, M, -kappa * kappa, omega);
  const auto zeros = spectrum.expanded();
  for (int k = 0; k < samples; ++k) {
    const double lambda = lo + (hi - lo) * k / (samples - 1);
    const bool near = std::any_of(zeros.begin(), zeros.end(),
                                  [&](double z) { return std::abs(lambda - z) < disk; });
    if (near) {
      ++out.excluded;
      continue;
    }
    ++out.samples;
    const Complex ref = reference(Complex{lambda, 0.0});
    const double err = std::abs(out.model(Complex{lambda, 0.0}) - ref) / std::abs(ref);
    if (err > out.max_rel_error) {
      out.max_rel_error = err;
      out.worst_lambda = lambda;
    }
  }
  return out;
}

nlohmann::json to_json(const TraceConditions& t) {
  return {{"trace_q1", t.trace_q1}, {"trace_q2", t.trace_q2}};
}

nlohmann::json to_json(const RayleighValue& r) {
  return {{"index", r.index},
          {"closed_form", r.closed_form},
          {"quadrature", r.quadrature},
          {"printed_formula", r.printed_formula}};
}

nlohmann::json to_json(const SamplingReport& r) {
  nlohmann::json seqs = nlohmann::json::array();
  for (const auto& s : r.sequences) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : s.points)
      pts.push_back({{"n", p.n},
                     {"s", p.s},
                     {"residual", p.residual},
                     {"model", p.model},
                     {"G", p.g},
                     {"residual_minus_model", p.residual_minus_model},
                     {"residual_minus_G", p.residual_minus_g}});
    seqs.push_back({{"name", s.name},
                    {"model", s.model},
                    {"max_abs_model_tail", s.max_abs_model_tail},
                    {"max_abs_residual_minus_G_tail", s.max_abs_residual_minus_g_tail},
                    {"points", pts}});
  }
  return {{"traces", to_json(r.traces)},
          {"trace_q2_nonzero", r.trace_q2_nonzero},
          {"alpha_note", r.alpha_note},
          {"sequences", seqs}};
}

nlohmann::json to_json(const AmbarzumyanReport& r) {
  nlohmann::json ray = nlohmann::json::array();
  for (const auto& v : r.rayleigh) ray.push_back(to_json(v));
  nlohmann::json j = {{"count", r.count},
                      {"tol", r.tol},
                      {"trace_tol", r.trace_tol},
                      {"traces", to_json(r.traces)},
                      {"rayleigh", ray},
                      {"sigma_q", r.sigma_q},
                      {"sigma_0", r.sigma_0},
                      {"distances", r.distances},
                      {"max_distance", r.max_distance},
                      {"max_distance_index", r.max_distance_index},
                      {"traces_nonzero", r.traces_nonzero},
                      {"spectra_differ", r.spectra_differ},
                      {"variational_bound_holds", r.variational_bound_holds},
                      {"verdict", to_string(r.verdict)},
                      {"diagnostics", r.diagnostics}};
  if (r.method_disagreement) {
    j["fd_sigma_q"] = r.fd_sigma_q;
    j["fd_sigma_0"] = r.fd_sigma_0;
    j["fd_distances"] = r.fd_distances;
    j["method_disagreement"] = *r.method_disagreement;
  }
  return j;
}

nlohmann::json to_json(const HadamardCheck& h) {
  return {{"truncation", h.model.truncation},
          {"zero_order", h.model.zero_order},
          {"constant_c_re", h.model.constant_c.real()},
          {"constant_c_im", h.model.constant_c.imag()},
          {"normalization_point", h.model.normalization_point},
          {"tail_density", h.model.tail_density},
          {"tail_start", h.model.tail_start},
          {"sensitivity", h.model.sensitivity},
          {"c_limit_formula", h.model.c_limit_formula},
          {"samples", h.samples},
          {"excluded", h.excluded},
          {"max_rel_error", h.max_rel_error},
          {"worst_lambda", h.worst_lambda}};
}

std::string to_text(const AmbarzumyanReport& r) {
  std::ostringstream os;
  auto row = [&](const std::string& k, const std::string& v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-26s", k.c_str());
    os << buf << v << '\n';
  };
  row("verdict", to_string(r.verdict));
  row("count", std::to_string(r.count));
  row("tol", fmt(r.tol));
  row("trace_tol", fmt(r.trace_tol));
  row("trace_q1", fmt(r.traces.trace_q1));
  row("trace_q2", fmt(r.traces.trace_q2));
  row("traces_nonzero", r.traces_nonzero ? "true" : "false");
  row("spectra_differ", r.spectra_differ ? "true" : "false");
  row("max_distance", fmt(r.max_distance));
  row("max_distance_index", std::to_string(r.max_distance_index));
  row("variational_bound_holds", r.variational_bound_holds ? "true" : "false");
  if (r.method_disagreement) row("method_disagreement", fmt(*r.method_disagreement));
  os << '\n';
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-6s %-20s %-20s %-20s\n", "i", "rayleigh", "quadrature",
                "printed_formula");
  os << buf;
  for (const auto& v : r.rayleigh) {
    std::snprintf(buf, sizeof buf, "%-6d %-20.12e %-20.12e %-20.12e\n", v.index, v.closed_form,
                  v.quadrature, v.printed_formula);
    os << buf;
  }
  os << '\n';
  const bool fd = r.method_disagreement.has_value();
  std::snprintf(buf, sizeof buf, "%-6s %-20s %-20s %-20s", "n", "lambda_n(Q)", "lambda_n(0)",
                "distance");
  os << buf;
  if (fd) {
    std::snprintf(buf, sizeof buf, " %-20s %-20s %-20s", "fd_lambda_n(Q)", "fd_lambda_n(0)",
                  "fd_distance");
    os << buf;
  }
  os << '\n';
  for (std::size_t k = 0; k < r.distances.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%-6zu %-20.12e %-20.12e %-20.12e", k, r.sigma_q[k], r.sigma_0[k],
                  r.distances[k]);
    os << buf;
    if (fd && k < r.fd_distances.size()) {
      std::snprintf(buf, sizeof buf, " %-20.12e %-20.12e %-20.12e", r.fd_sigma_q[k], r.fd_sigma_0[k],
                    r.fd_distances[k]);
      os << buf;
    }
    os << '\n';
  }
  if (!r.diagnostics.empty()) {
    os << '\n';
    for (const auto& d : r.diagnostics) os << "note: " << d << '\n';
  }
  return os.str();
}

}  // namespace isl
