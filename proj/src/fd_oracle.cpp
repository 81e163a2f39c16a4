// Finite-difference oracle on the original interval (0, pi).
//
// Unknowns: left nodes u_0..u_m at x_i = i h and right nodes v_1..v_m at
// pi/2 + j h, h = (pi/2)/m. The right limit at pi/2 is eliminated by the value
// jump v_0 = a u_m; the derivative jump is the natural interface condition of
// the quadratic form
//
//   E(Y) = sum over edges |Y_{k+1} - Y_k|^2 / h + sum over nodes w_k Y_k^T Q_k Y_k,
//   M(Y) = sum over nodes w_k rho_k |Y_k|^2,
//
// with trapezoid weights w_k (h/2 at the two ends of each half). Neumann ends
// need no ghost rows in this form. The node u_m carries both one-sided halves:
// mass h/2 + alpha^2 a^2 h/2 and potential (h/2) Q(pi/2-) + a^2 (h/2) Q(pi/2+).
// The symmetric pencil (K, M) with diagonal M becomes the banded standard
// problem M^{-1/2} K M^{-1/2}, solved by LAPACK dsbevx.

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isl/spectrum.hpp"

namespace isl {

namespace {

struct Banded {
  int n = 0;
  int kd = 0;
  std::vector<double> ab;  // column-major upper band storage, ldab = kd + 1
  double& at(int i, int j) {
    if (i > j) std::swap(i, j);
    return ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * (kd + 1)];
  }
};

struct DiscreteSpectrum {
  std::vector<double> values;
  double norm = 0.0;  // max absolute row sum of the scaled matrix
};

DiscreteSpectrum solve_lowest(const ProblemSpec& spec, int m, int count) {
  const int dim = spec.dim;
  const int nodes = 2 * m + 1;
  const int n = nodes * dim;
  if (count > n) throw std::invalid_argument("fd_eigenvalues: count exceeds the discrete dimension");
  const double h = kHalfPi / m;
  const double a = spec.a, al2 = spec.alpha * spec.alpha;

  Banded k{n, 2 * dim - 1, std::vector<double>(static_cast<std::size_t>(2 * dim) * n, 0.0)};
  std::vector<double> mass(static_cast<std::size_t>(nodes), 0.0);
  Matrix q;

  auto add_edge = [&](int p, int r, double cp, double cr) {
    // |cr Y_r - cp Y_p|^2 / h, per component
    for (int c = 0; c < dim; ++c) {
      k.at(p * dim + c, p * dim + c) += cp * cp / h;
      k.at(r * dim + c, r * dim + c) += cr * cr / h;
      k.at(p * dim + c, r * dim + c) -= cp * cr / h;
    }
  };
  auto add_potential = [&](int p, double w, double x, Half side) {
    spec.potential->evaluate_into(x, side, q);
    for (int r = 0; r < dim; ++r)
      for (int c = r; c < dim; ++c) k.at(p * dim + r, p * dim + c) += w * q(r, c);
  };

  // Node p: 0..m left (x = p h), m+1..2m right (x = pi/2 + (p - m) h).
  for (int p = 0; p < m; ++p) add_edge(p, p + 1, 1.0, 1.0);
  add_edge(m, m + 1, a, 1.0);
  for (int p = m + 1; p < 2 * m; ++p) add_edge(p, p + 1, 1.0, 1.0);

  for (int p = 0; p <= m; ++p) {
    const double w = (p == 0 || p == m) ? h / 2 : h;
    add_potential(p, w, p * h, Half::Left);
    mass[static_cast<std::size_t>(p)] = w;
  }
  add_potential(m, a * a * h / 2, kHalfPi, Half::Right);
  mass[static_cast<std::size_t>(m)] += al2 * a * a * h / 2;
  for (int p = m + 1; p <= 2 * m; ++p) {
    const double w = p == 2 * m ? h / 2 : h;
    add_potential(p, w, kHalfPi + (p - m) * h, Half::Right);
    mass[static_cast<std::size_t>(p)] = al2 * w;
  }

  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - k.kd); i <= j; ++i)
      k.at(i, j) /= std::sqrt(mass[static_cast<std::size_t>(i / dim)] *
                              mass[static_cast<std::size_t>(j / dim)]);

  std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - k.kd); i <= j; ++i) {
      const double v = std::abs(k.at(i, j));
      row_sum[static_cast<std::size_t>(i)] += v;
      if (i != j) row_sum[static_cast<std::size_t>(j)] += v;
    }
  const double norm = *std::max_element(row_sum.begin(), row_sum.end());

  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
  double qdummy = 0.0, zdummy = 0.0;
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsbevx(
      LAPACK_COL_MAJOR, 'N', 'I', 'U', n, k.kd, k.ab.data(), k.kd + 1, &qdummy, 1, 0.0, 0.0, 1,
      count, 2.0 * LAPACKE_dlamch('S'), &found, w.data(), &zdummy, 1, ifail.data());
  if (info != 0 || found != count)
    throw NumericError("fd oracle: dsbevx failed (info " + std::to_string(info) + ", found " +
                       std::to_string(found) + " of " + std::to_string(count) + ")");
  w.resize(static_cast<std::size_t>(count));
  return {std::move(w), norm};
}

}  // namespace

std::vector<double> fd_eigenvalues(const ProblemSpec& spec, int mesh, int count) {
  if (mesh < 4) throw ConfigError("mesh", "must be >= 4");
  if (count < 1) throw ConfigError("count", "must be >= 1");
  return solve_lowest(spec, mesh, count).values;
}

Spectrum fd_oracle_spectrum(const ProblemSpec& spec, int mesh, int count, const FdOptions& opts) {
  if (mesh < 64) throw ConfigError("mesh", "must be >= 64 nodes per half");
  if (count < 1) throw ConfigError("count", "must be >= 1");

  // Extra values so the last cluster is complete.
  const int want = count + spec.dim;
  const auto [coarse, coarse_norm] = solve_lowest(spec, mesh, want);
  std::vector<double> values = coarse, bands(coarse.size(), 0.0);
  double eps_term = 16.0 * std::numeric_limits<double>::epsilon() * coarse_norm;
  if (opts.richardson) {
    const auto [fine, fine_norm] = solve_lowest(spec, 2 * mesh, want);
    eps_term = 16.0 * std::numeric_limits<double>::epsilon() * fine_norm;
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
      bands[i] = std::abs(fine[i] - coarse[i]) / 3.0 + eps_term;
    }
  } else {
    for (auto& b : bands) b = eps_term;
  }

  Spectrum out;
  out.method = SpectrumMethod::FdOracle;
  out.resolution.mesh = mesh;
  std::size_t i = 0;
  while (i < values.size() && out.total_multiplicity() < count) {
    std::size_t j = i + 1;
    double hi = values[i] + bands[i];
    while (j < values.size() && values[j] - bands[j] <= hi) {
      hi = std::max(hi, values[j] + bands[j]);
      ++j;
    }
    double sum = 0.0, band = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      sum += values[k];
      band = std::max(band, bands[k]);
    }
    const double mean = sum / static_cast<double>(j - i);
    band += 0.5 * (values[j - 1] - values[i]);
    out.entries.push_back({mean, static_cast<int>(j - i), band});
    if (j < values.size()) {
      const double dist = values[j] - values[j - 1];
      const double scale = bands[j - 1] + bands[j];
      if (dist <= opts.ambiguity_factor * scale)
        out.resolution.diagnostics.push_back("ambiguous cluster gap after lambda = " +
                                             std::to_string(mean) + " (gap " +
                                             std::to_string(dist) + ", bands " +
                                             std::to_string(scale) + ")");
    }
    i = j;
  }
  return out;
}

}  // namespace isl
