#include "isl/matshoot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace isl {

SampledHalf::SampledHalf(const HalfPotential& q, int steps)
    : dim_(q.dim()), steps_(steps), zero_(q.field().is_zero()) {
  if (steps < 16) throw std::invalid_argument("propagate: steps must be >= 16");
  const double h = kHalfPi / steps;
  samples_.resize(static_cast<std::size_t>(2 * steps + 1));
  for (int k = 0; k <= 2 * steps; ++k) {
    const double x = k == 2 * steps ? kHalfPi : 0.5 * h * k;
    auto& m = samples_[static_cast<std::size_t>(k)];
    q.evaluate_into(x, m);
    if (!m.allFinite())
      throw NumericError("propagate: non-finite potential sample at x = " + std::to_string(x));
  }
}

int default_steps(Complex mu, double q_max) {
  constexpr int kBase = 2048;
  constexpr double kKnee = 8.0;
  constexpr double kCap = 1 << 18;
  const double s_eff = std::sqrt(std::abs(mu) + q_max);
  if (s_eff <= kKnee) return kBase;
  const double n = std::min(kCap, kBase * std::pow(s_eff / kKnee, 1.25));
  return static_cast<int>(std::ceil(n / 256.0)) * 256;
}

namespace {

template <class Scalar>
ShootingFrame run_rk4(const SampledHalf& q, Scalar mu, const PropagateOptions& opts) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = q.dim();
  const int steps = q.steps();
  const double h = q.step();

  M phi = M::Identity(n, n);
  M dphi = M::Zero(n, n);
  M a0(n, n), am(n, n), a1(n, n);
  M k1p(n, n), k1d(n, n), k2p(n, n), k2d(n, n), k3p(n, n), k3d(n, n), k4p(n, n), k4d(n, n);
  M tmp(n, n);
  double log_scale = 0.0;

  auto emit = [&](double x) {
    if (!opts.observer) return;
    ShootingFrame f{phi.template cast<Complex>(), dphi.template cast<Complex>(), log_scale, x};
    opts.observer(f);
  };
  auto shifted = [&](int k, M& out) {
    if (q.is_zero()) out.setZero(n, n);
    else out = q.at(k).template cast<Scalar>();
    out.diagonal().array() -= mu;
  };

  emit(0.0);
  for (int i = 0; i < steps; ++i) {
    shifted(2 * i, a0);
    shifted(2 * i + 1, am);
    shifted(2 * i + 2, a1);

    k1p = dphi;
    k1d.noalias() = a0 * phi;
    tmp = phi + (0.5 * h) * k1p;
    k2p = dphi + (0.5 * h) * k1d;
    k2d.noalias() = am * tmp;
    tmp = phi + (0.5 * h) * k2p;
    k3p = dphi + (0.5 * h) * k2d;
    k3d.noalias() = am * tmp;
    tmp = phi + h * k3p;
    k4p = dphi + h * k3d;
    k4d.noalias() = a1 * tmp;

    phi += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    dphi += (h / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);

    const double peak = std::max(phi.cwiseAbs().maxCoeff(), dphi.cwiseAbs().maxCoeff());
    if (!std::isfinite(peak))
      throw NumericError("propagate: integration blow-up at step " + std::to_string(i + 1) +
                         " of " + std::to_string(steps));
    if (peak > opts.window_hi || peak < opts.window_lo) {
      // Power-of-two rescale: exact in floating point.
      const int e = std::ilogb(peak);
      const double f = std::ldexp(1.0, -e);
      phi *= f;
      dphi *= f;
      log_scale += e * std::numbers::ln2;
    }
    emit(i + 1 == steps ? kHalfPi : (i + 1) * h);
  }
  return ShootingFrame{phi.template cast<Complex>(), dphi.template cast<Complex>(), log_scale,
                       kHalfPi};
}

}  // namespace

ShootingFrame propagate(const SampledHalf& q, Complex mu, const PropagateOptions& opts) {
  if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag()))
    throw NumericError("propagate: non-finite spectral parameter");
  if (mu.imag() == 0.0) return run_rk4<double>(q, mu.real(), opts);
  return run_rk4<Complex>(q, mu, opts);
}

ShootingFrame propagate(const HalfPotential& q, Complex mu, int steps,
                        const PropagateOptions& opts) {
  return propagate(SampledHalf(q, steps), mu, opts);
}

InterfaceResiduals apply_jump(const ShootingFrame& left, const ShootingFrame& right, double a,
                              const Eigen::VectorXcd& c1, const Eigen::VectorXcd& c2) {
  const auto n = left.phi.rows();
  if (right.phi.rows() != n || c1.size() != n || c2.size() != n || left.dphi.rows() != n ||
      right.dphi.rows() != n)
    throw std::invalid_argument("apply_jump: dimension mismatch");
  const double s1 = std::exp(left.log_scale), s2 = std::exp(right.log_scale);
  InterfaceResiduals r;
  r.value = a * s1 * (left.phi * c1) - s2 * (right.phi * c2);
  r.derivative = (s1 / a) * (left.dphi * c1) + s2 * (right.dphi * c2);
  return r;
}

}  // namespace isl
