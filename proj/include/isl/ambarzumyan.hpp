#pragma once

// Verification harness for the inverse-spectral statement
//
//   lambda_n(Q) = lambda_n(0) for all n   =>   Q = 0 a.e.,
//
// checked in the contrapositive at finite count: trace conditions on the
// matrix averages, the variational bound with piecewise-constant test vectors,
// the sampling sequences of the residual omega_Q - omega_0, a spectral distance
// report, and the Hadamard reconstruction of omega_0 from sigma(0).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isl/charfn.hpp"
#include "isl/spectrum.hpp"

namespace isl {

/// Y_i = e_i on (0, pi/2) and a e_i on (pi/2, pi); constant on each half, so
/// Y_i' = 0 away from pi/2 and both jump conditions hold exactly.
struct TestVectorField {
  int index = 1;  // 1-based
  int dim = 1;
  double a = 1.0;

  Eigen::VectorXd left() const;
  Eigen::VectorXd right() const;
  Eigen::VectorXd operator()(double x) const;
  /// |Y(pi/2+) - a Y(pi/2-)|, zero by construction.
  double value_jump_residual() const;
};

struct TraceConditions {
  double trace_q1 = 0.0;
  double trace_q2 = 0.0;
};

TraceConditions trace_conditions(const ProblemSpec& spec);
TraceConditions trace_conditions(const HalfPotentials& halves);

/// The variational quotient of Y_i.
///   closed_form:    (2[Q1]_ii + 2 a^2 [Q2]_ii) / ((pi/2)(1 + alpha^2 a^2))
///   quadrature:     int Y^T Q Y / int rho |Y|^2 by composite Gauss-Legendre on (0, pi)
///   printed_formula: same numerator over (pi/2)(1 + alpha^2 a), which differs
///                   from the quotient whenever a != 1
struct RayleighValue {
  int index = 1;
  double closed_form = 0.0;
  double quadrature = 0.0;
  double printed_formula = 0.0;
};

/// Throws ConfigError("i") unless 1 <= i <= N.
RayleighValue rayleigh_quotient(const ProblemSpec& spec, int i);

struct SamplingPoint {
  int n = 0;
  double s = 0.0;
  /// (omega_numeric - omega0_paper) / s^(N-1) at lambda = s^2
  double residual = 0.0;
  /// Literal model term of the sequence.
  double model = 0.0;
  /// G(s^2) from the first-order model.
  double g = 0.0;
  double residual_minus_model = 0.0;
  double residual_minus_g = 0.0;
};

struct SamplingSequence {
  std::string name;   // "s=2n" or "s=8n+1"
  std::string model;  // formula of the model column
  std::vector<SamplingPoint> points;
  double max_abs_model_tail = 0.0;  // max |model| over the upper half of n
  double max_abs_residual_minus_g_tail = 0.0;
};

struct SamplingReport {
  TraceConditions traces;
  std::vector<SamplingSequence> sequences;
  bool trace_q2_nonzero = false;
  /// The exact binary rational that alpha is.
  std::string alpha_note;
};

/// Requires n_max >= 8. The s = 8n+1 sequence is added when alpha == 0.5.
SamplingReport sampling_diagnostic(const CharacteristicFunction& omega, int n_max,
                                   double trace_tol = 1e-10);

enum class Verdict { ConsistentWithZeroPotential, Inconsistent };
const char* to_string(Verdict v);

struct CompareOptions {
  int count = 20;
  double tol = 1e-3;        // spectral distance tolerance
  double trace_tol = 1e-8;
  SpectrumOptions shooting;
  /// Also compute both spectra with the FD oracle at this mesh (0 = skip).
  int fd_mesh = 0;
};

struct AmbarzumyanReport {
  int count = 0;
  double tol = 0.0;
  double trace_tol = 0.0;
  TraceConditions traces;
  std::vector<RayleighValue> rayleigh;
  std::vector<double> sigma_q;  // multiplicity-expanded
  std::vector<double> sigma_0;
  std::vector<double> distances;
  double max_distance = 0.0;
  int max_distance_index = -1;
  bool traces_nonzero = false;
  bool spectra_differ = false;
  /// lambda_0(Q) <= min_i Rayleigh(i)
  bool variational_bound_holds = true;
  Verdict verdict = Verdict::ConsistentWithZeroPotential;
  std::vector<double> fd_sigma_q;
  std::vector<double> fd_sigma_0;
  std::vector<double> fd_distances;
  /// max_n |shooting lambda_n(Q) - fd lambda_n(Q)|, when fd_mesh > 0
  std::optional<double> method_disagreement;
  std::vector<std::string> diagnostics;
};

/// `spec0` must share (N, alpha, a) with `spec_q`.
AmbarzumyanReport compare_spectra(const ProblemSpec& spec_q, const ProblemSpec& spec0,
                                  const CompareOptions& opts = {});

struct HadamardCheck {
  HadamardModel model;
  int samples = 0;
  int excluded = 0;
  double max_rel_error = 0.0;
  double worst_lambda = 0.0;
};

/// Reconstructs omega from the first M eigenvalues of `spec` normalized at
/// lambda = -kappa^2, and compares it with `reference` on an evenly spaced
/// lambda grid over [lo, hi], skipping points within `disk` of an eigenvalue.
HadamardCheck hadamard_check(const CharacteristicFunction& omega, const Spectrum& spectrum, int M,
                             double kappa, double lo, double hi, double disk, int samples,
                             const std::function<Complex(Complex)>& reference);

nlohmann::json to_json(const TraceConditions& t);
nlohmann::json to_json(const RayleighValue& r);
nlohmann::json to_json(const SamplingReport& r);
nlohmann::json to_json(const AmbarzumyanReport& r);
nlohmann::json to_json(const HadamardCheck& h);
/// Aligned plain-text rendering with every report field.
std::string to_text(const AmbarzumyanReport& r);

}  // namespace isl
