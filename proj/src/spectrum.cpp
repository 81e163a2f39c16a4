#include "isl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "isl/parallel.hpp"

namespace isl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Sample {
  double t = 0.0;
  double log_mag = 0.0;
  int sign = 0;
};

Sample sample_at(const CharacteristicFunction& w, double t) {
  const auto v = w(Complex{lambda_of_t(t), 0.0});
  return {t, v.log_mag, v.sign()};
}

std::vector<Sample> sample_grid(const CharacteristicFunction& w, const std::vector<double>& ts) {
  return parallel_map(ts.size(), [&](std::size_t i) { return sample_at(w, ts[i]); });
}

// Golden-section minimization of log|omega| over t in [lo, hi].
Sample golden_min(const CharacteristicFunction& w, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = hi - kInvPhi * (hi - lo), d = lo + kInvPhi * (hi - lo);
  Sample fc = sample_at(w, c), fd = sample_at(w, d);
  while (hi - lo > tol) {
    if (fc.log_mag == kNegInf) return fc;
    if (fd.log_mag == kNegInf) return fd;
    if (fc.log_mag < fd.log_mag) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = sample_at(w, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = sample_at(w, d);
    }
  }
  return fc.log_mag < fd.log_mag ? fc : fd;
}

struct Candidate {
  Bracket bracket;
  double log_scale = 0.0;  // larger log|omega| of the bracket ends
};

void detect(const CharacteristicFunction& w, const std::vector<Sample>& g, const ScanOptions& o,
            int depth, std::vector<Candidate>& out) {
  const std::size_t n = g.size();
  auto end_scale = [&](std::size_t i, std::size_t j) { return std::max(g[i].log_mag, g[j].log_mag); };
  for (std::size_t k = 0; k < n; ++k) {
    if (g[k].sign != 0) continue;
    const std::size_t lo = k > 0 ? k - 1 : k, hi = k + 1 < n ? k + 1 : k;
    out.push_back({{g[lo].t, g[hi].t, BracketKind::ExactZero, g[k].t}, end_scale(lo, hi)});
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (g[k].sign == 0 || g[k + 1].sign == 0 || g[k].sign == g[k + 1].sign) continue;
    out.push_back({{g[k].t, g[k + 1].t, BracketKind::SignChange, 0.5 * (g[k].t + g[k + 1].t)},
                   end_scale(k, k + 1)});
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const auto &p = g[k - 1], &c = g[k], &q = g[k + 1];
    if (p.sign == 0 || c.sign == 0 || q.sign == 0) continue;
    if (p.sign != c.sign || c.sign != q.sign) continue;
    if (!(c.log_mag < p.log_mag && c.log_mag < q.log_mag)) continue;
    const double scale = 0.5 * (p.log_mag + q.log_mag);
    const Sample m = golden_min(w, p.t, q.t, 1e-10 * std::max(1.0, std::abs(c.t)));
    const double ratio = m.log_mag - scale;
    if (m.log_mag == kNegInf || ratio < std::log(o.dip_threshold)) {
      out.push_back({{p.t, q.t, BracketKind::Dip, m.t}, std::max(p.log_mag, q.log_mag)});
    } else if (ratio < std::log(o.rescan_threshold) && depth < o.max_rescan_depth) {
      constexpr int kSub = 32;
      std::vector<double> ts(kSub + 1);
      for (int i = 0; i <= kSub; ++i) ts[static_cast<std::size_t>(i)] = p.t + (q.t - p.t) * i / kSub;
      detect(w, sample_grid(w, ts), o, depth + 1, out);
    }
  }
}

std::vector<Candidate> scan_candidates(const CharacteristicFunction& w, double t_min, double s_max,
                                       double s_step, const ScanOptions& opts) {
  const auto k_lo = static_cast<long>(std::ceil(t_min / s_step - 1e-9));
  const auto k_hi = static_cast<long>(std::floor(s_max / s_step + 1e-9));
  std::vector<double> ts;
  for (long k = k_lo; k <= k_hi; ++k) ts.push_back(static_cast<double>(k) * s_step);
  std::vector<Candidate> out;
  if (ts.size() < 2) return out;
  detect(w, sample_grid(w, ts), opts, 0, out);
  std::sort(out.begin(), out.end(),
            [](const Candidate& x, const Candidate& y) { return x.bracket.t_hint < y.bracket.t_hint; });
  return out;
}

// Bisection down to `tol`, then one linear interpolation inside the final bracket.
double bisect(const CharacteristicFunction& w, double lo, double hi, double tol) {
  Sample flo = sample_at(w, lo), fhi = sample_at(w, hi);
  if (flo.sign == 0) return lo;
  if (fhi.sign == 0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const Sample fm = sample_at(w, mid);
    if (fm.sign == 0) return mid;
    if (fm.sign == flo.sign) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  const double top = std::max(flo.log_mag, fhi.log_mag);
  const double wlo = std::exp(flo.log_mag - top), whi = std::exp(fhi.log_mag - top);
  return lo + (hi - lo) * wlo / (wlo + whi);
}

std::vector<SpectrumEntry> refine_impl(const Bracket& target, std::span<const Bracket> neighbours,
                                       double log_scale, const CharacteristicFunction& w,
                                       const CharacteristicFunction& coarse, double s_step,
                                       const RefineOptions& opts, int depth);

}  // namespace

std::vector<Bracket> scan_zeros(const CharacteristicFunction& omega, double s_max, double s_step,
                                const ScanOptions& opts) {
  const double guard = 0.05 * std::min(omega.spec().alpha, 1.0);
  if (!(s_step > 0.0) || s_step > guard * (1.0 + 1e-12))
    throw ConfigError("s-step", "must satisfy 0 < s_step <= 0.05 * min(alpha, 1) = " +
                                    std::to_string(guard));
  std::vector<Bracket> out;
  for (const auto& c : scan_candidates(omega, opts.t_min, s_max, s_step, opts))
    out.push_back(c.bracket);
  return out;
}

double locate_root(const Bracket& b, const CharacteristicFunction& omega, const RefineOptions& opts) {
  switch (b.kind) {
    case BracketKind::ExactZero:
      return b.t_hint;
    case BracketKind::SignChange:
      return bisect(omega, b.t_lo, b.t_hi, opts.tolerance);
    case BracketKind::Dip: {
      // Tighten around the scan minimum.
      const double half = std::max(1e-6, 1e-3 * (b.t_hi - b.t_lo));
      const double lo = std::max(b.t_lo, b.t_hint - half), hi = std::min(b.t_hi, b.t_hint + half);
      auto m = golden_min(omega, lo, hi, opts.tolerance);
      const auto at_hint = sample_at(omega, b.t_hint);
      return at_hint.log_mag <= m.log_mag ? b.t_hint : m.t;
    }
  }
  return b.t_hint;
}

WindingResult winding_number(const CharacteristicFunction& omega, Complex center, double radius,
                             const RefineOptions& opts) {
  auto phase_at = [&](int j, int total) {
    const double theta = 2.0 * std::numbers::pi * j / total;
    const auto v = omega(center + radius * Complex{std::cos(theta), std::sin(theta)});
    return v.is_zero() ? Complex{0.0, 0.0} : v.phase;
  };
  auto total_winding = [](const std::vector<Complex>& ph) {
    double acc = 0.0;
    for (std::size_t j = 0; j < ph.size(); ++j) acc += std::arg(ph[(j + 1) % ph.size()] / ph[j]);
    return acc / (2.0 * std::numbers::pi);
  };

  int k = opts.winding_points;
  std::vector<Complex> ph = parallel_map(static_cast<std::size_t>(k),
                                         [&](std::size_t j) { return phase_at(static_cast<int>(j), k); });
  double prev = total_winding(ph);
  WindingResult r{prev, static_cast<int>(std::lround(prev)), k};
  while (2 * k <= opts.max_winding_points) {
    auto odd = parallel_map(static_cast<std::size_t>(k), [&](std::size_t j) {
      return phase_at(static_cast<int>(2 * j + 1), 2 * k);
    });
    std::vector<Complex> merged(static_cast<std::size_t>(2 * k));
    for (int j = 0; j < k; ++j) {
      merged[static_cast<std::size_t>(2 * j)] = ph[static_cast<std::size_t>(j)];
      merged[static_cast<std::size_t>(2 * j + 1)] = odd[static_cast<std::size_t>(j)];
    }
    ph = std::move(merged);
    k *= 2;
    const double cur = total_winding(ph);
    r = {cur, static_cast<int>(std::lround(cur)), k};
    if (std::abs(cur - prev) < 1e-3 && std::abs(cur - std::round(cur)) <= opts.snap_tolerance)
      return r;
    prev = cur;
  }
  return r;
}

namespace {

std::vector<SpectrumEntry> refine_impl(const Bracket& target, std::span<const Bracket> neighbours,
                                       double log_scale, const CharacteristicFunction& w,
                                       const CharacteristicFunction& coarse, double s_step,
                                       const RefineOptions& opts, int depth) {
  const double t = locate_root(target, w, opts);
  const double lambda = lambda_of_t(t);

  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& b : neighbours) {
    if (&b == &target || b.t_hint == target.t_hint) continue;
    nearest = std::min(nearest, std::abs(lambda_of_t(b.t_hint) - lambda));
  }
  const double cell = 2.0 * std::abs(t) * s_step + s_step * s_step;
  const double radius = std::max(std::min(0.5 * nearest, 0.5 * cell), 1e-9 * (1.0 + std::abs(lambda)));

  // The coarse evaluator carries ~1e-5 relative error; only trust it on contours
  // large enough for |omega| there to dominate that error.
  const bool use_coarse = radius > 1e-2 * (1.0 + std::abs(t));
  const auto wn = winding_number(use_coarse ? coarse : w, Complex{lambda, 0.0}, radius, opts);
  if (std::abs(wn.raw - std::round(wn.raw)) > opts.snap_tolerance)
    throw MultiplicityError(lambda, wn.raw);
  if (wn.winding <= 0) return {};

  if (wn.winding >= 2 && target.kind != BracketKind::ExactZero && depth < 3) {
    // Look for separable simple roots on progressively narrower windows centred
    // on the located root. Below a relative width of 1e-6 the zero is treated
    // as genuinely multiple.
    constexpr int kSub = 64;
    const double full_lo = t_of_lambda(lambda - radius), full_hi = t_of_lambda(lambda + radius);
    for (double half = 0.5 * (full_hi - full_lo); half >= 1e-6 * (1.0 + std::abs(t)); half /= 16.0) {
      const double t_lo = std::max(full_lo, t - half), t_hi = std::min(full_hi, t + half);
      std::vector<double> ts(kSub + 1);
      for (int i = 0; i <= kSub; ++i) ts[static_cast<std::size_t>(i)] = t_lo + (t_hi - t_lo) * i / kSub;
      const auto g = sample_grid(w, ts);
      std::vector<Bracket> subs;
      for (std::size_t k = 0; k + 1 < g.size(); ++k)
        if (g[k].sign != 0 && g[k + 1].sign != 0 && g[k].sign != g[k + 1].sign)
          subs.push_back({g[k].t, g[k + 1].t, BracketKind::SignChange, 0.5 * (g[k].t + g[k + 1].t)});
      if (subs.size() < 2) continue;
      // Contour radii come from the distances between the located roots.
      for (auto& sb : subs) sb.t_hint = locate_root(sb, w, opts);
      std::vector<SpectrumEntry> split;
      int total = 0;
      for (const auto& sb : subs) {
        auto part = refine_impl(sb, subs, log_scale, w, coarse, (t_hi - t_lo) / kSub, opts, depth + 1);
        for (const auto& e : part) total += e.multiplicity;
        split.insert(split.end(), part.begin(), part.end());
      }
      if (total == wn.winding) return split;
      break;
    }
  }

  const auto at = w(Complex{lambda, 0.0});
  const double residual = at.is_zero() ? 0.0 : std::exp(at.log_mag - log_scale);
  return {SpectrumEntry{lambda, wn.winding, residual}};
}

}  // namespace

std::vector<SpectrumEntry> refine_root(const Bracket& target, std::span<const Bracket> neighbours,
                                       const CharacteristicFunction& omega, double s_step,
                                       const RefineOptions& opts) {
  const CharacteristicFunction coarse(omega.spec(), opts.winding_steps);
  auto ends = [&](double tt) { return sample_at(omega, tt).log_mag; };
  const double a = ends(target.t_lo), b = ends(target.t_hi);
  const double log_scale = std::max(a, b);
  return refine_impl(target, neighbours, log_scale, omega, coarse, s_step, opts, 0);
}

double spectrum_lower_bound(const ProblemSpec& spec) {
  const auto& q = *spec.potential;
  if (q.is_zero()) return 0.0;
  double lo = 0.0;
  Matrix m;
  constexpr int kSamples = 512;
  for (Half side : {Half::Left, Half::Right}) {
    const double x0 = side == Half::Left ? 0.0 : kHalfPi;
    const double rho = side == Half::Left ? 1.0 : spec.alpha * spec.alpha;
    for (int k = 0; k <= kSamples; ++k) {
      q.evaluate_into(x0 + kHalfPi * k / kSamples, side, m);
      const double e =
          Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
      lo = std::min(lo, e / rho);
    }
  }
  return lo;
}

Spectrum find_spectrum(const ProblemSpec& spec, int count, const SpectrumOptions& opts) {
  if (count < 1) throw ConfigError("count", "must be >= 1");
  const double h = opts.s_step > 0.0 ? opts.s_step : 0.05 * std::min(spec.alpha, 1.0);
  const CharacteristicFunction w(spec, opts.steps);
  const CharacteristicFunction coarse(spec, opts.refine.winding_steps);

  ScanOptions scan = opts.scan;
  const double lower = spectrum_lower_bound(spec);
  scan.t_min = std::min(scan.t_min, -(1.05 * std::sqrt(-lower) + 2.0 * h));

  double s_max = 2.0 * count / (spec.dim * (1.0 + spec.alpha)) + 2.0;
  Spectrum out;
  out.method = SpectrumMethod::Shooting;
  std::vector<SpectrumEntry> entries;
  for (;;) {
    if (s_max > opts.max_s) s_max = opts.max_s;
    const auto cands = scan_candidates(w, scan.t_min, s_max, h, scan);
    std::vector<Bracket> brackets;
    for (const auto& c : cands) brackets.push_back(c.bracket);
    auto parts = parallel_map(cands.size(), [&](std::size_t i) {
      return refine_impl(cands[i].bracket, brackets, cands[i].log_scale, w, coarse, h, opts.refine, 0);
    });
    entries.clear();
    for (auto& p : parts) entries.insert(entries.end(), p.begin(), p.end());
    std::sort(entries.begin(), entries.end(),
              [](const SpectrumEntry& x, const SpectrumEntry& y) { return x.lambda < y.lambda; });
    // Rescans can report the same root twice.
    std::vector<SpectrumEntry> unique;
    for (const auto& e : entries) {
      if (!unique.empty() &&
          std::abs(unique.back().lambda - e.lambda) <= 1e-9 * (1.0 + std::abs(e.lambda))) {
        out.resolution.diagnostics.push_back("merged duplicate root at lambda = " +
                                             std::to_string(e.lambda));
        continue;
      }
      unique.push_back(e);
    }
    entries = std::move(unique);
    int total = 0;
    for (const auto& e : entries) total += e.multiplicity;
    if (total >= count || s_max >= opts.max_s) break;
    s_max *= 1.5;
  }

  int total = 0;
  for (const auto& e : entries) {
    if (total >= count) break;
    out.entries.push_back(e);
    total += e.multiplicity;
  }
  if (total < count)
    out.resolution.diagnostics.push_back("only " + std::to_string(total) +
                                         " eigenvalues found below s = " + std::to_string(s_max));
  for (const auto& e : out.entries)
    if (e.multiplicity > spec.dim)
      out.resolution.diagnostics.push_back("multiplicity " + std::to_string(e.multiplicity) +
                                           " exceeds N at lambda = " + std::to_string(e.lambda));
  out.resolution.s_step = h;
  out.resolution.tolerance = opts.refine.tolerance;
  out.resolution.s_max = s_max;
  out.resolution.steps = opts.steps;
  return out;
}

}  // namespace isl
