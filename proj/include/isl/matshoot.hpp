#pragma once

// Matrix shooting on [0, pi/2]:  -Phi'' + Q_j(x) Phi = mu Phi,  Phi(0) = I, Phi'(0) = 0,
// where mu = lambda on the left half and lambda * alpha^2 on the reflected right half.

#include <functional>
#include <vector>

#include "isl/core.hpp"

namespace isl {

/// (Phi, Phi') at position x. The true solution is exp(log_scale) * (phi, dphi).
struct ShootingFrame {
  CMatrix phi;
  CMatrix dphi;
  double log_scale = 0.0;
  double x = 0.0;

  CMatrix scaled_phi() const { return std::exp(log_scale) * phi; }
  CMatrix scaled_dphi() const { return std::exp(log_scale) * dphi; }
  /// Phi^T Phi' - Phi'^T Phi of the stored (rescaled) matrices.
  CMatrix wronskian() const { return phi.transpose() * dphi - dphi.transpose() * phi; }
};

/// Potential values at the RK4 abscissae x_k = k * h / 2, k = 0..2*steps.
class SampledHalf {
 public:
  SampledHalf(const HalfPotential& q, int steps);

  int dim() const noexcept { return dim_; }
  int steps() const noexcept { return steps_; }
  double step() const noexcept { return kHalfPi / steps_; }
  bool is_zero() const noexcept { return zero_; }
  const Matrix& at(int k) const { return samples_[static_cast<std::size_t>(k)]; }

 private:
  int dim_;
  int steps_;
  bool zero_;
  std::vector<Matrix> samples_;
};

struct PropagateOptions {
  double window_lo = 1e-2;
  double window_hi = 1e2;
  /// Called with the frame after every step (and once at x = 0).
  std::function<void(const ShootingFrame&)> observer;
};

/// Steps per half used when the caller does not fix one: 2048 up to an
/// effective frequency of 8, then growing like |s|^(5/4) so the RK4 phase
/// error stays near 1e-11. Rounded up to a multiple of 256 and capped at 2^18.
int default_steps(Complex mu, double q_max);

/// Fixed-step classical RK4 on the stacked (Phi, Phi') system. Renormalizes by
/// powers of two whenever the max entry leaves [window_lo, window_hi].
/// Throws NumericError naming the step index on a non-finite state.
ShootingFrame propagate(const SampledHalf& q, Complex mu, const PropagateOptions& opts = {});
ShootingFrame propagate(const HalfPotential& q, Complex mu, int steps,
                        const PropagateOptions& opts = {});

struct InterfaceResiduals {
  Eigen::VectorXcd value;       // a Y1(pi/2) - Y2(pi/2)
  Eigen::VectorXcd derivative;  // a^{-1} Y1'(pi/2) + Y2'(pi/2)
};

/// Residuals of the interface equations for Y1 = Phi1 C1, Y2 = Phi2 C2.
/// Throws std::invalid_argument on dimension mismatch.
InterfaceResiduals apply_jump(const ShootingFrame& left, const ShootingFrame& right, double a,
                              const Eigen::VectorXcd& c1, const Eigen::VectorXcd& c2);

}  // namespace isl
