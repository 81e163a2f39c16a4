#pragma once

// Characteristic function
//
//   omega_Q(lambda) = det [ a Phi1(pi/2)       -Phi2(pi/2)  ]
//                         [ a^{-1} Phi1'(pi/2)  Phi2'(pi/2) ]
//
// together with its zero-potential closed forms, the first-order asymptotic
// model (A, B, G), and the Hadamard product reconstruction from the spectrum.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>

#include "isl/core.hpp"
#include "isl/matshoot.hpp"
#include "isl/spectrum_types.hpp"

namespace isl {

/// omega = phase * exp(log_mag). An exactly singular determinant has
/// log_mag = -inf and raw = 0.
struct CharFnValue {
  double log_mag = 0.0;
  Complex phase{1.0, 0.0};
  std::optional<Complex> raw;     // only when |log_mag| < 300
  SpectralParameter lambda;

  bool is_zero() const;
  Complex value() const;
  /// Sign of the real part (0 for an exact zero).
  int sign() const;
};

/// Numeric omega_Q bound to one problem. Immutable after construction and
/// safe to call from several threads.
class CharacteristicFunction {
 public:
  /// fixed_steps = 0 selects default_steps() per half and per lambda.
  explicit CharacteristicFunction(ProblemSpec spec, int fixed_steps = 0);

  const ProblemSpec& spec() const noexcept { return spec_; }
  const HalfPotentials& halves() const noexcept { return *halves_; }
  int fixed_steps() const noexcept { return fixed_steps_; }

  CharFnValue operator()(Complex lambda) const;
  /// Frames of both halves at pi/2: left with lambda, right with lambda*alpha^2.
  std::pair<ShootingFrame, ShootingFrame> frames(Complex lambda) const;
  /// Steps the evaluator would use for an effective parameter mu on one half.
  int steps_for(Complex mu) const;

 private:
  std::shared_ptr<const SampledHalf> sampled(Half half, int steps) const;

  ProblemSpec spec_;
  std::shared_ptr<const HalfPotentials> halves_;
  int fixed_steps_;
  double q_max_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const SampledHalf>> cache_;
};

/// Determinant of the interface matrix from two rescaled frames.
CharFnValue assemble_determinant(const ShootingFrame& left, const ShootingFrame& right,
                                 double a, Complex lambda);

CharFnValue omega_numeric(const ProblemSpec& spec, Complex lambda);

/// The zero-potential form as displayed with the decomposition
/// omega_Q = omega_0 + s^{N-1} (G + psi):
///   s^N [ (-alpha a/2)^N (sin(s pi(alpha+1)/2) + sin(s pi(alpha-1)/2))^N
///       + (-1/(2a))^N    (sin(s pi(alpha+1)/2) - sin(s pi(alpha-1)/2))^N ].
Complex omega0_paper(const ProblemSpec& spec, Complex lambda);
Complex omega0_paper_s(int dim, double alpha, double a, Complex s);

/// Exact determinant for Q = 0:
///   s^N (-1)^N (alpha a sin(s pi alpha/2) cos(s pi/2) + a^{-1} cos(s pi alpha/2) sin(s pi/2))^N.
/// Equals omega0_paper for N = 1 only.
Complex omega0_exact(const ProblemSpec& spec, Complex lambda);
Complex omega0_exact_s(int dim, double alpha, double a, Complex s);

struct AsymptoticModel {
  int dim = 1;
  double alpha = 1.0;
  double a = 1.0;
  double trace_q1 = 0.0;
  double trace_q2 = 0.0;

  static AsymptoticModel from(const ProblemSpec& spec);
  static AsymptoticModel from(const ProblemSpec& spec, const HalfPotentials& halves);

  /// (alpha a/4)^N + (a^{-1}/4)^N, the constant of the imaginary-axis asymptotic.
  double leading_constant() const;
  /// ((alpha a + a^{-1})/4)^N, the constant of the exact Q = 0 determinant.
  double exact_leading_constant() const;
};

struct ABG {
  Complex A;
  Complex B;
  Complex G;
};

ABG asym_ABG(const AsymptoticModel& model, Complex lambda);

struct AsymptoticRatio {
  double kappa = 0.0;
  double log_abs_omega = 0.0;
  int sign = 0;
  /// omega(-kappa^2) / (kappa^N e^{kappa N pi (1+alpha)/2} leading_constant())
  double ratio = 0.0;
  /// Same with exact_leading_constant().
  double ratio_exact_constant = 0.0;
};

AsymptoticRatio asymptotic_ratio(const CharacteristicFunction& omega, double kappa);

struct HadamardOptions {
  /// Multiply the truncated product by a continuum estimate of the omitted
  /// factors, using the asymptotic zero density N(1+alpha)/2 per unit of s and
  /// a counting-function offset fitted to the included zeros.
  bool tail_correction = true;
  double zero_tolerance = 1e-8;
  /// Re-fit distance for the sensitivity estimate.
  double sensitivity_shift = 10.0;
};

/// omega(lambda) ~ C lambda^m prod_{n < M, lambda_n != 0} (1 - lambda/lambda_n) * tail(lambda).
class HadamardModel {
 public:
  Complex constant_c{0.0, 0.0};
  int zero_order = 0;
  int truncation = 0;
  std::vector<double> zeros;  // nonzero eigenvalues, multiplicity-expanded
  double normalization_point = 0.0;
  double tail_density = 0.0;  // 0 when the tail correction is off
  double tail_start = 0.0;
  /// |C(kappa + shift) / C(kappa) - 1|
  double sensitivity = 0.0;
  /// (-1)^m [leading constant] kappa^{N-2m} e^{kappa N pi(1+alpha)/2} / prod(1 + kappa^2/lambda_n),
  /// evaluated at the normalization point with the same tail.
  double c_limit_formula = 0.0;

  /// log of the product part without C: m log(lambda) + sum log(1 - lambda/lambda_n) + log tail.
  Complex log_product(Complex lambda) const;
  Complex operator()(Complex lambda) const;
};

/// Throws std::invalid_argument on an empty spectrum, M larger than the
/// available multiplicity-expanded count, or a normalization point that
/// coincides with an eigenvalue.
HadamardModel hadamard_reconstruct(const Spectrum& spectrum, int truncation,
                                   double normalization_point,
                                   const CharacteristicFunction& omega,
                                   const HadamardOptions& opts = {});

}  // namespace isl
