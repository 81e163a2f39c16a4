#pragma once

// Eigenvalues of L(Q) as real zeros of omega_Q, plus an independent
// finite-difference oracle.
//
// The root scan runs in the signed variable t with lambda = t|t|: t = s = sqrt(lambda)
// for lambda >= 0 and t = -kappa for lambda = -kappa^2 < 0. Zeros are asymptotically
// equispaced in t, and t is monotone in lambda, so sign changes in t are sign changes
// in lambda.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "isl/charfn.hpp"
#include "isl/spectrum_types.hpp"

namespace isl {

/// The argument-principle winding failed to settle on an integer.
class MultiplicityError : public std::runtime_error {
 public:
  MultiplicityError(double lambda, double raw_winding)
      : std::runtime_error("multiplicity undetermined near lambda = " + std::to_string(lambda) +
                           " (winding " + std::to_string(raw_winding) + ")"),
        lambda_(lambda),
        raw_(raw_winding) {}
  double lambda() const noexcept { return lambda_; }
  double raw_winding() const noexcept { return raw_; }

 private:
  double lambda_;
  double raw_;
};

inline double lambda_of_t(double t) { return t * std::abs(t); }
inline double t_of_lambda(double lambda) {
  return lambda >= 0 ? std::sqrt(lambda) : -std::sqrt(-lambda);
}

enum class BracketKind { SignChange, Dip, ExactZero };

struct Bracket {
  double t_lo = 0.0;
  double t_hi = 0.0;
  BracketKind kind = BracketKind::SignChange;
  double t_hint = 0.0;  // grid zero, dip minimum, or bracket midpoint

  bool odd() const { return kind == BracketKind::SignChange; }
};

struct ScanOptions {
  /// Lower end of the scan in t (negative to cover lambda < 0).
  double t_min = 0.0;
  /// |omega| at a dip must fall below this times the geometric mean of the
  /// neighbouring grid values to count as an even-order zero.
  double dip_threshold = 1e-6;
  /// Dips between dip_threshold and this ratio trigger a finer local rescan.
  double rescan_threshold = 1e-2;
  int max_rescan_depth = 3;
};

/// Scans omega on t in [opts.t_min, s_max] with step s_step. Requires
/// s_step <= 0.05 * min(alpha, 1). Empty result is valid.
std::vector<Bracket> scan_zeros(const CharacteristicFunction& omega, double s_max, double s_step,
                                const ScanOptions& opts = {});

struct RefineOptions {
  double tolerance = 1e-10;       // in t
  double snap_tolerance = 0.05;   // |winding - round(winding)|
  int winding_points = 64;
  int max_winding_points = 4096;
  /// RK4 step scale for the winding contour (coarser than the scan is enough
  /// to resolve the phase).
  int winding_steps = 512;
};

struct WindingResult {
  double raw = 0.0;
  int winding = 0;
  int points = 0;
};

/// Winding number of omega around |lambda - center| = radius.
WindingResult winding_number(const CharacteristicFunction& omega, Complex center, double radius,
                             const RefineOptions& opts = {});

/// Root location inside a bracket, in t.
double locate_root(const Bracket& b, const CharacteristicFunction& omega,
                   const RefineOptions& opts = {});

/// Locates the zero of `target` and assigns its multiplicity by winding number.
/// `neighbours` are the other candidates (their hints set the contour radius,
/// half the distance to the nearest one, capped at half a scan cell in lambda).
/// A candidate with winding 0 yields an empty result. A winding >= 2 is searched
/// for separable sign changes on windows narrowing down to a relative width of
/// 1e-6 in t; if they account for the whole winding the roots are split.
std::vector<SpectrumEntry> refine_root(const Bracket& target, std::span<const Bracket> neighbours,
                                       const CharacteristicFunction& omega, double s_step,
                                       const RefineOptions& opts = {});

struct SpectrumOptions {
  double s_step = 0.0;  // 0 = 0.05 * min(alpha, 1)
  int steps = 0;        // fixed RK4 steps, 0 = default rule
  ScanOptions scan;
  RefineOptions refine;
  double max_s = 400.0;
};

/// Lowest `count` eigenvalues (multiplicity-expanded) by scanning and refining
/// zeros of omega, extending the scan until enough are found.
Spectrum find_spectrum(const ProblemSpec& spec, int count, const SpectrumOptions& opts = {});

/// Lower bound for lambda_0: min over x of lambda_min(Q(x)) / rho(x) (sampled), capped at 0.
double spectrum_lower_bound(const ProblemSpec& spec);

struct FdOptions {
  /// Combine meshes m and 2m by Richardson extrapolation; otherwise mesh m only.
  bool richardson = true;
  /// Gaps within (1, ambiguity_factor] times the combined band are reported.
  double ambiguity_factor = 10.0;
};

/// Lowest `count` eigenvalues of the second-order finite-difference discretization
/// with `mesh` cells per half (single mesh, no extrapolation).
std::vector<double> fd_eigenvalues(const ProblemSpec& spec, int mesh, int count);

/// FD oracle spectrum: meshes m and 2m, Richardson-extrapolated values, error
/// bands and clustering into multiplicities. Requires mesh >= 64.
Spectrum fd_oracle_spectrum(const ProblemSpec& spec, int mesh, int count,
                            const FdOptions& opts = {});

}  // namespace isl
