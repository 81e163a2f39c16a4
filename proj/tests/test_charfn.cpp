#include <doctest.h>

#include <cmath>
#include <random>

#include "isl/ambarzumyan.hpp"
#include "isl/charfn.hpp"
#include "isl/spectrum.hpp"

using namespace isl;

namespace {

ProblemSpec zero_spec(int n, double alpha, double a) {
  return ProblemSpec::make(n, alpha, a, PotentialField::zero(n));
}

/// Scale of omega_0 on the real s axis: |s|^N (alpha a + 1/a)^N bounds the
/// closed form and does not vanish at its zeros.
double envelope(int n, double alpha, double a, double s) {
  return std::pow(std::abs(s) * (alpha * a + 1.0 / a), n);
}

PotentialField half_const(double left, double right) {
  return PotentialField::builtin("half_constant", {{"left", {left}}, {"right", {right}}}, 1);
}

}  // namespace

TEST_CASE("omega vanishes at lambda = 0 for Q = 0") {
  for (int n : {1, 2, 3}) {
    const CharacteristicFunction w(zero_spec(n, 0.5, 2.0));
    const auto v = w(Complex{0.0, 0.0});
    CHECK(v.is_zero());
    CHECK(v.value() == Complex{0.0, 0.0});
    CHECK(omega0_exact(w.spec(), 0.0) == Complex{0.0, 0.0});
    CHECK(omega0_paper(w.spec(), 0.0) == Complex{0.0, 0.0});
  }
}

TEST_CASE("N = 1 piecewise-constant potential against the trigonometric determinant") {
  // Phi1 = cos(w1 x), w1^2 = lambda - c1; Phi2 = cos(w2 x), w2^2 = alpha^2 lambda - c2.
  const double c1 = 0.7, c2 = -1.1, alpha = 0.8, a = 0.5;
  const auto spec = ProblemSpec::make(1, alpha, a, half_const(c1, c2));
  const CharacteristicFunction w(spec);
  double worst = 0.0;
  for (int k = 0; k < 120; ++k) {
    const double lambda = -20.0 + k * 0.9;
    const Complex w1 = std::sqrt(Complex{lambda - c1, 0.0});
    const Complex w2 = std::sqrt(Complex{alpha * alpha * lambda - c2, 0.0});
    const Complex p1 = std::cos(w1 * kHalfPi), d1 = -w1 * std::sin(w1 * kHalfPi);
    const Complex p2 = std::cos(w2 * kHalfPi), d2 = -w2 * std::sin(w2 * kHalfPi);
    const Complex t1 = a * p1 * d2, t2 = p2 * d1 / a;
    const Complex oracle = t1 + t2;
    const Complex got = w(Complex{lambda, 0.0}).value();
    worst = std::max(worst, std::abs(got - oracle) / std::max({std::abs(t1), std::abs(t2), 1.0}));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("two-power and exact zero-potential forms") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.1, 30.0);
  for (double alpha : {0.5, 0.8, 1.0})
    for (double a : {0.5, 2.0}) {
      for (int k = 0; k < 50; ++k) {
        const Complex s{u(rng), 0.0};
        const Complex pe = omega0_paper_s(1, alpha, a, s), ex = omega0_exact_s(1, alpha, a, s);
        CHECK(std::abs(pe - ex) <= 1e-12 * envelope(1, alpha, a, s.real()));
      }
    }
  // For N = 2 the two forms differ by the cross term 2xy.
  double max_diff = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const Complex s{0.3 * k, 0.0};
    max_diff = std::max(max_diff, std::abs(omega0_paper_s(2, 0.5, 2.0, s) -
                                           omega0_exact_s(2, 0.5, 2.0, s)) /
                                      envelope(2, 0.5, 2.0, s.real()));
  }
  CHECK(max_diff > 1e-2);
  // Classical limit: -s sin(s pi).
  for (double s : {0.3, 1.0, 2.5, 7.25}) {
    const Complex v = omega0_paper_s(1, 1.0, 1.0, s);
    CHECK(std::abs(v.real() + s * std::sin(s * kPi)) < 1e-13 * (1 + s));
  }
}

TEST_CASE("shooting matches omega0_exact across the zero-potential suite") {
  for (int n : {1, 2, 3})
    for (double alpha : {0.5, 0.8})
      for (double a : {0.5, 2.0}) {
        const CharacteristicFunction w(zero_spec(n, alpha, a));
        double worst = 0.0;
        for (int k = 0; k < 40; ++k) {
          const double s = 0.1 + k * (29.9 / 39);
          const Complex got = w(Complex{s * s, 0.0}).value();
          const Complex ex = omega0_exact_s(n, alpha, a, s);
          worst = std::max(worst, std::abs(got - ex) / envelope(n, alpha, a, s));
        }
        CHECK_MESSAGE(worst <= 1e-8, "N=" << n << " alpha=" << alpha << " a=" << a);
      }
}

TEST_CASE("A, B, G") {
  AsymptoticModel m;
  m.dim = 2;
  m.alpha = 0.5;
  m.a = 2.0;
  for (double lambda : {-4.0, 0.0, 3.0, 50.0}) {
    const auto abg = asym_ABG(m, lambda);
    CHECK(abg.A == Complex{0.0, 0.0});
    CHECK(abg.B == Complex{0.0, 0.0});
    CHECK(abg.G == Complex{0.0, 0.0});
  }
  const double c = 0.8;
  const auto spec = ProblemSpec::make(3, 0.5, 2.0, PotentialField::constant(c * Matrix::Identity(3, 3)));
  const auto model = AsymptoticModel::from(spec);
  CHECK(model.trace_q2 == doctest::Approx(3 * c * kPi / 4).epsilon(1e-12));
  const auto abg = asym_ABG(model, 0.0);
  CHECK(abg.A.real() == doctest::Approx(2.0 * 3 * c * kPi / 4).epsilon(1e-12));
  for (double lambda : {-9.0, 2.0, 77.0}) {
    const auto v = asym_ABG(model, lambda);
    CHECK(v.A.imag() == 0.0);
    CHECK(v.B.imag() == 0.0);
    CHECK(v.G.imag() == 0.0);
  }
}

TEST_CASE("realness, conjugate symmetry and raw consistency") {
  const auto spec = ProblemSpec::make(
      2, 0.8, 0.5,
      PotentialField::builtin(
          "fourier", {{"terms", {{{"k", 1}, {"cos", {1.0, 0.4, 0.4, -0.3}}}, {{"k", 2}, {"sin", {0.2, 0.5, 0.5, 0.9}}}}}},
          2));
  const CharacteristicFunction w(spec);
  for (double lambda : {-400.0, -5.0, 0.37, 12.0, 300.0}) {
    const auto v = w(Complex{lambda, 0.0});
    REQUIRE(v.raw.has_value());
    CHECK(std::abs(v.raw->imag()) <= 1e-9 * std::abs(*v.raw));
    CHECK(std::abs(*v.raw - v.phase * std::exp(v.log_mag)) <= 1e-12 * std::abs(*v.raw));
  }
  const Complex z{4.0, 1.5};
  const auto up = w(z).value(), down = w(std::conj(z)).value();
  CHECK(std::abs(up - std::conj(down)) <= 1e-10 * std::abs(up));
  // Evenness in s of the closed forms.
  for (double s : {0.7, 3.3, 11.0}) {
    CHECK(std::abs(omega0_exact_s(3, 0.8, 0.5, s) - omega0_exact_s(3, 0.8, 0.5, -s)) <=
          1e-13 * envelope(3, 0.8, 0.5, s));
    CHECK(std::abs(omega0_paper_s(2, 0.8, 0.5, s) - omega0_paper_s(2, 0.8, 0.5, -s)) <=
          1e-13 * envelope(2, 0.8, 0.5, s));
  }
  // Far down the negative axis the value only exists in log form.
  const auto deep = w(Complex{-1e6, 0.0});
  CHECK_FALSE(deep.raw.has_value());
  CHECK(std::isfinite(deep.log_mag));
}

TEST_CASE("Hadamard reconstruction of the classical determinant") {
  const auto spec = zero_spec(1, 1.0, 1.0);
  const CharacteristicFunction w(spec);
  const auto spec_all = find_spectrum(spec, 80);
  auto reference = [&](Complex l) { return omega0_exact(spec, l); };
  double prev = 1e300;
  for (int M : {10, 20, 40}) {
    const auto h = hadamard_check(w, spec_all, M, 30.0, -10.0, 50.0, 0.2, 601, reference);
    CHECK(h.model.zero_order == 1);
    CHECK(h.max_rel_error <= prev * (1 + 1e-9));
    prev = h.max_rel_error;
    if (M == 40) CHECK(h.max_rel_error <= 0.05);
  }
  CHECK_THROWS_AS(hadamard_reconstruct(Spectrum{}, 5, -900.0, w), std::invalid_argument);
  CHECK_THROWS_AS(hadamard_reconstruct(spec_all, 5, -0.0, w), std::invalid_argument);
}

TEST_CASE("zero order of the reconstruction is N") {
  for (int n : {2, 3}) {
    const auto spec = zero_spec(n, 0.5, 2.0);
    const CharacteristicFunction w(spec);
    const auto sp = find_spectrum(spec, 6 * n);
    const auto model = hadamard_reconstruct(sp, 4 * n, -400.0, w);
    CHECK(model.zero_order == n);
  }
}

TEST_CASE("block asymptotics of Phi1 stay bounded") {
  const auto spec = ProblemSpec::make(
      2, 0.5, 1.0, PotentialField::builtin("sin2x_diag", {{"coeffs", {0.5, -0.2}}}, 2));
  const CharacteristicFunction w(spec);
  const Matrix avg = w.halves().avg_q1.value;
  double lower = 0.0, upper = 0.0;
  for (int k = 0; k <= 95; ++k) {
    const double s = 5.0 + k;
    const auto [left, right] = w.frames(Complex{s * s, 0.0});
    const CMatrix phi = left.scaled_phi();
    const CMatrix model = std::cos(s * kHalfPi) * CMatrix::Identity(2, 2) +
                          (std::sin(s * kHalfPi) / s) * avg.cast<Complex>();
    const double r = s * (phi - model).norm();
    (s < 50 ? lower : upper) = std::max(s < 50 ? lower : upper, r);
  }
  MESSAGE("s |Phi1 - model| bound: " << lower << " on [5,50), " << upper << " on [50,100]");
  CHECK(std::isfinite(upper));
  CHECK(upper <= 2.0 * lower + 1e-3);
}

TEST_CASE("asymptotic ratio uses the log-scaled path") {
  const CharacteristicFunction w(zero_spec(1, 0.5, 2.0));
  const auto r60 = asymptotic_ratio(w, 60.0);
  CHECK(r60.sign == 1);
  CHECK(r60.ratio == doctest::Approx(1.0).epsilon(0.03));
  const auto r200 = asymptotic_ratio(w, 200.0);
  CHECK(std::isfinite(r200.log_abs_omega));
  CHECK(r200.ratio == doctest::Approx(1.0).epsilon(0.01));
}
