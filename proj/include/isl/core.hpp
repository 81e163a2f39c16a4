#pragma once

// Problem model for the vector Sturm-Liouville operator with an impulse at pi/2:
//
//   -Y'' + Q(x) Y = lambda rho(x) Y,   x in (0, pi/2) u (pi/2, pi)
//   Y(pi/2+0) = a Y(pi/2-0),  Y'(pi/2+0) = a^{-1} Y'(pi/2-0),  Y'(0) = Y'(pi) = 0
//
// with rho = 1 on the left half and alpha^2 on the right half.

#include <complex>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace isl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Invalid user input. `field()` is the dotted path of the offending field
/// (e.g. "potential.values[3]") when one is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Non-finite or otherwise unusable numeric data (bad samples, blow-up).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which one-sided limit to take at x = pi/2.
enum class Half { Left, Right };

/// Real symmetric N x N matrix-valued potential on (0, pi).
///
/// Representations: zero, constant, piecewise-linear sampled grid, and the
/// builtin families "sin2x_diag", "fourier" and "half_constant" (see README).
/// Every evaluation returns an exactly symmetric matrix.
class PotentialField {
 public:
  struct Zero {};
  struct Constant {
    Matrix value;
  };
  struct Grid {
    std::vector<double> nodes;   // strictly increasing, uniform, inside (0, pi)
    std::vector<Matrix> values;  // one symmetric matrix per node
  };
  struct FourierTerm {
    int k = 0;
    Matrix cos_coeff;
    Matrix sin_coeff;
  };
  struct Fourier {
    std::vector<FourierTerm> terms;  // Q(x) = sum_k C_k cos(kx) + S_k sin(kx)
  };
  struct HalfConstant {
    Matrix left;
    Matrix right;
  };
  struct Builtin {
    std::string name;
    nlohmann::json params;
    std::variant<Fourier, HalfConstant> family;
    bool reflected = false;
  };
  using Representation = std::variant<Zero, Constant, Grid, Builtin>;

  static PotentialField zero(int dim);
  static PotentialField constant(Matrix value);
  static PotentialField grid(std::vector<double> nodes, std::vector<Matrix> values);
  /// Builtin family by name; throws ConfigError citing `field` on bad params.
  static PotentialField builtin(const std::string& name, const nlohmann::json& params,
                                int dim, const std::string& field = "potential");
  static PotentialField sin2x_diag(std::vector<double> coeffs);

  int dim() const noexcept { return dim_; }
  const Representation& representation() const noexcept { return rep_; }
  bool is_zero() const noexcept { return std::holds_alternative<Zero>(rep_); }
  std::string kind() const;

  /// Q(x) for x in [0, pi]; at x = pi/2 the one-sided limit from `side`.
  Matrix operator()(double x, Half side) const;
  void evaluate_into(double x, Half side, Matrix& out) const;

  /// Q(pi - x) as a field in its own right (sides swap).
  PotentialField reflected() const;

  /// Kinks of the representation strictly inside the given half, in original
  /// coordinates. Used to align quadrature panels.
  std::vector<double> breakpoints(Half side) const;

  /// Lower bound of min_x lambda_min(Q(x)) over sample points (for scan limits).
  double min_eigenvalue_estimate() const;
  /// max_x ||Q(x)||_max over sample points.
  double max_abs_estimate() const;

  nlohmann::json to_json() const;

 private:
  PotentialField(int dim, Representation rep) : dim_(dim), rep_(std::move(rep)) {}
  int dim_ = 1;
  Representation rep_;
};

/// One half of the reflected problem on [0, pi/2]:
///   Q1(x) = Q(x) (left),   Q2(x) = Q(pi - x) (right, reflected).
class HalfPotential {
 public:
  HalfPotential(std::shared_ptr<const PotentialField> field, Half half)
      : field_(std::move(field)), half_(half) {}

  int dim() const noexcept { return field_->dim(); }
  Half half() const noexcept { return half_; }
  const PotentialField& field() const noexcept { return *field_; }

  Matrix operator()(double x) const;
  void evaluate_into(double x, Matrix& out) const;
  /// Breakpoints mapped into [0, pi/2] coordinates, sorted.
  std::vector<double> breakpoints() const;

 private:
  std::shared_ptr<const PotentialField> field_;
  Half half_;
};

struct MatrixAverage {
  Matrix value;                // 1/2 int_0^{pi/2} Q_j
  std::string rule;            // quadrature description
  int panels = 0;              // Simpson panels per sub-interval at acceptance
  double error_estimate = 0;   // Richardson estimate, max-entry norm
};

struct HalfPotentials {
  HalfPotential q1;
  HalfPotential q2;
  MatrixAverage avg_q1;
  MatrixAverage avg_q2;
};

/// ½ ∫_0^{π/2} Q_j(x) dx by composite Simpson with Richardson refinement.
/// Throws NumericError on non-finite samples.
MatrixAverage matrix_average(const HalfPotential& qj, double rel_tol = 1e-10);

struct ProblemSpec;
HalfPotentials reflect_potential(const ProblemSpec& spec);

struct SpectralParameter {
  Complex lambda;
  Complex s;        // principal sqrt(lambda)
  double kappa = 0; // s = i kappa when lambda is real and negative, else 0
  double tau = 0;   // |Im s|

  static SpectralParameter from_lambda(Complex lambda);
  static SpectralParameter from_s(Complex s);
};

struct ProblemSpec {
  int dim = 1;
  double alpha = 1.0;
  double a = 1.0;
  std::shared_ptr<const PotentialField> potential;

  /// Validates and builds. Throws ConfigError naming `N`, `alpha`, `a`, `potential`.
  static ProblemSpec make(int dim, double alpha, double a, PotentialField potential);

  double weight(double x) const { return x < kHalfPi ? 1.0 : alpha * alpha; }
  bool classical_limit() const { return alpha == 1.0 && a == 1.0; }
  /// Same (N, alpha, a) with Q = 0.
  ProblemSpec with_zero_potential() const;
  nlohmann::json to_json() const;
};

}  // namespace isl
