#include "isl/charfn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace isl {

namespace {

Complex ipow(Complex z, int n) {
  Complex r{1.0, 0.0};
  for (int k = 0; k < n; ++k) r *= z;
  return r;
}

double ipow(double z, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= z;
  return r;
}

}  // namespace

bool CharFnValue::is_zero() const { return log_mag == -std::numeric_limits<double>::infinity(); }

Complex CharFnValue::value() const {
  if (is_zero()) return {0.0, 0.0};
  return phase * std::exp(log_mag);
}

int CharFnValue::sign() const {
  if (is_zero()) return 0;
  return phase.real() > 0.0 ? 1 : (phase.real() < 0.0 ? -1 : 0);
}

CharacteristicFunction::CharacteristicFunction(ProblemSpec spec, int fixed_steps)
    : spec_(std::move(spec)),
      halves_(std::make_shared<const HalfPotentials>(reflect_potential(spec_))),
      fixed_steps_(fixed_steps),
      q_max_(spec_.potential->max_abs_estimate()) {
  if (fixed_steps != 0 && fixed_steps < 16)
    throw std::invalid_argument("CharacteristicFunction: steps must be >= 16");
}

int CharacteristicFunction::steps_for(Complex mu) const {
  return fixed_steps_ > 0 ? fixed_steps_ : default_steps(mu, q_max_);
}

std::shared_ptr<const SampledHalf> CharacteristicFunction::sampled(Half half, int steps) const {
  const auto key = std::make_pair(half == Half::Left ? 0 : 1, steps);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const auto& hp = half == Half::Left ? halves_->q1 : halves_->q2;
  auto table = std::make_shared<const SampledHalf>(hp, steps);
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(key, std::move(table)).first->second;
}

std::pair<ShootingFrame, ShootingFrame> CharacteristicFunction::frames(Complex lambda) const {
  const Complex mu_right = lambda * (spec_.alpha * spec_.alpha);
  auto left = propagate(*sampled(Half::Left, steps_for(lambda)), lambda);
  auto right = propagate(*sampled(Half::Right, steps_for(mu_right)), mu_right);
  return {std::move(left), std::move(right)};
}

CharFnValue CharacteristicFunction::operator()(Complex lambda) const {
  const auto [left, right] = frames(lambda);
  return assemble_determinant(left, right, spec_.a, lambda);
}

CharFnValue assemble_determinant(const ShootingFrame& left, const ShootingFrame& right, double a,
                                 Complex lambda) {
  const auto n = left.phi.rows();
  CMatrix m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = a * left.phi;
  m.topRightCorner(n, n) = -right.phi;
  m.bottomLeftCorner(n, n) = left.dphi / a;
  m.bottomRightCorner(n, n) = right.dphi;

  Eigen::PartialPivLU<CMatrix> lu(m);
  const auto& u = lu.matrixLU();
  CharFnValue out;
  out.lambda = SpectralParameter::from_lambda(lambda);
  double log_mag = static_cast<double>(n) * (left.log_scale + right.log_scale);
  Complex phase{lu.permutationP().determinant() > 0 ? 1.0 : -1.0, 0.0};
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const Complex d = u(i, i);
    const double r = std::abs(d);
    if (r == 0.0) {
      out.log_mag = -std::numeric_limits<double>::infinity();
      out.phase = {1.0, 0.0};
      out.raw = Complex{0.0, 0.0};
      return out;
    }
    log_mag += std::log(r);
    phase *= d / r;
  }
  out.log_mag = log_mag;
  out.phase = phase / std::abs(phase);
  if (std::abs(log_mag) < 300.0) out.raw = out.phase * std::exp(log_mag);
  return out;
}

CharFnValue omega_numeric(const ProblemSpec& spec, Complex lambda) {
  return CharacteristicFunction(spec)(lambda);
}

Complex omega0_paper_s(int dim, double alpha, double a, Complex s) {
  const Complex sp = std::sin(s * kPi * (alpha + 1.0) / 2.0);
  const Complex sm = std::sin(s * kPi * (alpha - 1.0) / 2.0);
  return ipow(s, dim) * (ipow(-alpha * a / 2.0, dim) * ipow(sp + sm, dim) +
                         ipow(-1.0 / (2.0 * a), dim) * ipow(sp - sm, dim));
}

Complex omega0_paper(const ProblemSpec& spec, Complex lambda) {
  return omega0_paper_s(spec.dim, spec.alpha, spec.a, std::sqrt(lambda));
}

Complex omega0_exact_s(int dim, double alpha, double a, Complex s) {
  const Complex x = std::sin(s * kPi * alpha / 2.0) * std::cos(s * kHalfPi);
  const Complex y = std::cos(s * kPi * alpha / 2.0) * std::sin(s * kHalfPi);
  return ipow(-s, dim) * ipow(alpha * a * x + y / a, dim);
}

Complex omega0_exact(const ProblemSpec& spec, Complex lambda) {
  return omega0_exact_s(spec.dim, spec.alpha, spec.a, std::sqrt(lambda));
}

AsymptoticModel AsymptoticModel::from(const ProblemSpec& spec, const HalfPotentials& halves) {
  AsymptoticModel m;
  m.dim = spec.dim;
  m.alpha = spec.alpha;
  m.a = spec.a;
  m.trace_q1 = halves.avg_q1.value.trace();
  m.trace_q2 = halves.avg_q2.value.trace();
  return m;
}

AsymptoticModel AsymptoticModel::from(const ProblemSpec& spec) {
  return from(spec, reflect_potential(spec));
}

double AsymptoticModel::leading_constant() const {
  return ipow(alpha * a / 4.0, dim) + ipow(1.0 / (4.0 * a), dim);
}

double AsymptoticModel::exact_leading_constant() const {
  return ipow((alpha * a + 1.0 / a) / 4.0, dim);
}

ABG asym_ABG(const AsymptoticModel& m, Complex lambda) {
  const Complex s = std::sqrt(lambda);
  const double t1 = m.trace_q1, t2 = m.trace_q2, al = m.alpha, a = m.a;
  const Complex cp = std::cos(s * kPi * (al + 1.0) / 2.0);
  const Complex cm = std::cos(s * kPi * (al - 1.0) / 2.0);
  const Complex sp = std::sin(s * kPi * (al + 1.0) / 2.0);
  const Complex sm = std::sin(s * kPi * (al - 1.0) / 2.0);
  ABG r;
  r.A = (a * t2 + al * a * t1) / 2.0 * cp + (a * t2 - al * a * t1) / 2.0 * cm;
  r.B = (al / a * t1 + t2 / a) / (2.0 * al) * cp + (al / a * t1 - t2 / a) / (2.0 * al) * cm;
  r.G = r.A * ipow(-al * a / 2.0, m.dim - 1) * ipow(sp + sm, m.dim - 1) +
        r.B * ipow(-1.0 / (2.0 * a), m.dim - 1) * ipow(sp - sm, m.dim - 1);
  return r;
}

AsymptoticRatio asymptotic_ratio(const CharacteristicFunction& omega, double kappa) {
  const auto& spec = omega.spec();
  const auto model = AsymptoticModel::from(spec, omega.halves());
  const auto w = omega(Complex{-kappa * kappa, 0.0});
  const double log_envelope =
      spec.dim * std::log(kappa) + kappa * spec.dim * kPi * (1.0 + spec.alpha) / 2.0;
  AsymptoticRatio r;
  r.kappa = kappa;
  r.log_abs_omega = w.log_mag;
  r.sign = w.sign();
  r.ratio = r.sign * std::exp(w.log_mag - log_envelope - std::log(model.leading_constant()));
  r.ratio_exact_constant =
      r.sign * std::exp(w.log_mag - log_envelope - std::log(model.exact_leading_constant()));
  return r;
}

Complex HadamardModel::log_product(Complex lambda) const {
  Complex acc{0.0, 0.0};
  if (zero_order > 0) acc += static_cast<double>(zero_order) * std::log(lambda);
  for (double z : zeros) acc += std::log(1.0 - lambda / z);
  if (tail_density > 0.0) {
    // D * int_S^inf log(1 - lambda/s^2) ds in closed form; even in mu.
    const Complex mu = std::sqrt(lambda);
    const double S = tail_start;
    Complex integral = -S * std::log(1.0 - lambda / (S * S));
    if (std::abs(mu) > 0.0) integral -= mu * std::log((S + mu) / (S - mu));
    acc += tail_density * integral;
  }
  return acc;
}

Complex HadamardModel::operator()(Complex lambda) const {
  if (zero_order > 0 && lambda == Complex{0.0, 0.0}) return {0.0, 0.0};
  return constant_c * std::exp(log_product(lambda));
}

HadamardModel hadamard_reconstruct(const Spectrum& spectrum, int truncation,
                                   double normalization_point,
                                   const CharacteristicFunction& omega,
                                   const HadamardOptions& opts) {
  const auto values = spectrum.expanded();
  if (values.empty()) throw std::invalid_argument("hadamard_reconstruct: empty spectrum");
  if (truncation < 1 || truncation > static_cast<int>(values.size()))
    throw std::invalid_argument("hadamard_reconstruct: truncation exceeds available eigenvalues");

  const auto& spec = omega.spec();
  HadamardModel h;
  h.truncation = truncation;
  h.normalization_point = normalization_point;
  for (int k = 0; k < truncation; ++k) {
    const double v = values[static_cast<std::size_t>(k)];
    if (std::abs(v) <= opts.zero_tolerance) {
      ++h.zero_order;
      continue;
    }
    if (std::abs(v - normalization_point) <= 1e-12 * std::max(1.0, std::abs(v)))
      throw std::invalid_argument("hadamard_reconstruct: normalization point is an eigenvalue");
    h.zeros.push_back(v);
  }
  if (std::abs(normalization_point) <= opts.zero_tolerance && h.zero_order > 0)
    throw std::invalid_argument("hadamard_reconstruct: normalization point is an eigenvalue");

  const double last = values[static_cast<std::size_t>(truncation - 1)];
  if (opts.tail_correction && last > 0.0) {
    // Counting function n(s) ~ D s + c0; c0 is fitted on the upper half of the
    // included zeros and the continuum starts where D s + c0 reaches M.
    h.tail_density = spec.dim * (1.0 + spec.alpha) / 2.0;
    double c0 = 0.0;
    int used = 0;
    for (int k = truncation / 2; k < truncation; ++k) {
      const double v = values[static_cast<std::size_t>(k)];
      c0 += k + 0.5 - h.tail_density * (v > 0.0 ? std::sqrt(v) : 0.0);
      ++used;
    }
    c0 /= used;
    h.tail_start = std::max((truncation - c0) / h.tail_density, std::sqrt(last) + 1e-6);
  }

  auto fit = [&](double point) {
    const auto w = omega(Complex{point, 0.0});
    const Complex log_w = w.log_mag + Complex{0.0, std::arg(w.phase)};
    return std::exp(log_w - h.log_product(Complex{point, 0.0}));
  };
  h.constant_c = fit(normalization_point);

  if (normalization_point < 0.0) {
    const double kappa = std::sqrt(-normalization_point);
    const double shifted = -(kappa + opts.sensitivity_shift) * (kappa + opts.sensitivity_shift);
    h.sensitivity = std::abs(fit(shifted) / h.constant_c - 1.0);

    const auto model = AsymptoticModel::from(spec, omega.halves());
    const double m = h.zero_order;
    // log_product at -kappa^2 includes m log(-kappa^2) = m (2 log kappa + i pi); drop that part.
    const Complex rest = h.log_product(Complex{normalization_point, 0.0}) -
                         m * std::log(Complex{normalization_point, 0.0});
    const double log_c = std::log(model.leading_constant()) + (spec.dim - 2.0 * m) * std::log(kappa) +
                         kappa * spec.dim * kPi * (1.0 + spec.alpha) / 2.0 - rest.real();
    h.c_limit_formula = (h.zero_order % 2 ? -1.0 : 1.0) * std::exp(log_c);
  }
  return h;
}

}  // namespace isl
