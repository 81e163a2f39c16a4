#include "isl/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isl {

namespace {

bool exactly_symmetric(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

void check_matrix(const Matrix& m, int dim, const std::string& field) {
  if (m.rows() != dim || m.cols() != dim)
    throw ConfigError(field, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
                                 " matrix");
  if (!m.allFinite()) throw ConfigError(field, "matrix has non-finite entries");
  if (!exactly_symmetric(m)) throw ConfigError(field, "matrix is not symmetric");
}

Matrix matrix_from_row_major(const nlohmann::json& j, int dim, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of N*N numbers");
  if (static_cast<int>(j.size()) != dim * dim)
    throw ConfigError(field, "expected " + std::to_string(dim * dim) + " entries, got " +
                                 std::to_string(j.size()));
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const auto& v = j[static_cast<std::size_t>(r * dim + c)];
      if (!v.is_number())
        throw ConfigError(field + "[" + std::to_string(r * dim + c) + "]", "expected a number");
      m(r, c) = v.get<double>();
    }
  check_matrix(m, dim, field);
  return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                         const std::string& field) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = std::any_of(allowed.begin(), allowed.end(),
                          [&](const char* k) { return it.key() == k; });
    if (!ok) throw ConfigError(field + "." + it.key(), "unknown key");
  }
}

// Linear interpolation on one half of a grid; extrapolates from the two
// nearest nodes of that half outside the node range.
void grid_eval(const PotentialField::Grid& g, double x, Half side, Matrix& out) {
  const auto mid = std::lower_bound(g.nodes.begin(), g.nodes.end(), kHalfPi);
  const auto first = side == Half::Left ? g.nodes.begin() : mid;
  const auto last = side == Half::Left ? mid : g.nodes.end();
  auto hi = std::upper_bound(first, last, x);
  if (hi == first) ++hi;
  if (hi == last) --hi;
  const auto lo = hi - 1;
  const double x0 = *lo, x1 = *hi;
  const auto& v0 = g.values[static_cast<std::size_t>(lo - g.nodes.begin())];
  const auto& v1 = g.values[static_cast<std::size_t>(hi - g.nodes.begin())];
  // Points within a few ulps of a node (such as pi - (pi - x_k)) return the
  // stored sample unchanged.
  constexpr double kSnap = 8.0 * std::numeric_limits<double>::epsilon() * kPi;
  if (std::abs(x - x0) <= kSnap) {
    out = v0;
    return;
  }
  if (std::abs(x - x1) <= kSnap) {
    out = v1;
    return;
  }
  const double w = (x - x0) / (x1 - x0);
  out = (1.0 - w) * v0 + w * v1;
}

void builtin_eval(const PotentialField::Builtin& b, int dim, double x, Half side, Matrix& out) {
  if (b.reflected) {
    x = kPi - x;
    side = side == Half::Left ? Half::Right : Half::Left;
  }
  if (const auto* f = std::get_if<PotentialField::Fourier>(&b.family)) {
    out.setZero(dim, dim);
    for (const auto& t : f->terms) {
      const double c = std::cos(t.k * x), s = std::sin(t.k * x);
      out += c * t.cos_coeff + s * t.sin_coeff;
    }
  } else {
    const auto& hc = std::get<PotentialField::HalfConstant>(b.family);
    out = side == Half::Left ? hc.left : hc.right;
  }
}

}  // namespace

PotentialField PotentialField::zero(int dim) {
  if (dim < 1) throw ConfigError("N", "dimension must be >= 1");
  return PotentialField(dim, Zero{});
}

PotentialField PotentialField::constant(Matrix value) {
  const int dim = static_cast<int>(value.rows());
  if (dim < 1) throw ConfigError("potential.matrix", "empty matrix");
  check_matrix(value, dim, "potential.matrix");
  return PotentialField(dim, Constant{std::move(value)});
}

PotentialField PotentialField::grid(std::vector<double> nodes, std::vector<Matrix> values) {
  if (nodes.size() != values.size())
    throw ConfigError("potential.values", "node and value counts differ");
  if (nodes.empty()) throw ConfigError("potential.nodes", "empty grid");
  const int dim = static_cast<int>(values.front().rows());
  std::size_t left = 0, right = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string f = "potential.nodes[" + std::to_string(i) + "]";
    if (!std::isfinite(nodes[i]) || nodes[i] <= 0.0 || nodes[i] >= kPi)
      throw ConfigError(f, "node must lie in the open interval (0, pi)");
    if (nodes[i] == kHalfPi) throw ConfigError(f, "pi/2 may not be a grid node");
    if (i > 0 && nodes[i] <= nodes[i - 1]) throw ConfigError(f, "nodes must increase");
    (nodes[i] < kHalfPi ? left : right) += 1;
    check_matrix(values[i], dim, "potential.values[" + std::to_string(i) + "]");
  }
  if (left < 3 || right < 3)
    throw ConfigError("potential.nodes", "grid too coarse: need at least 3 nodes per half");
  const double h = (nodes.back() - nodes.front()) / static_cast<double>(nodes.size() - 1);
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (std::abs((nodes[i] - nodes[i - 1]) - h) > 1e-9 * h)
      throw ConfigError("potential.nodes[" + std::to_string(i) + "]", "grid is not uniform");
  return PotentialField(dim, Grid{std::move(nodes), std::move(values)});
}

PotentialField PotentialField::sin2x_diag(std::vector<double> coeffs) {
  nlohmann::json params{{"coeffs", coeffs}};
  return builtin("sin2x_diag", params, static_cast<int>(coeffs.size()));
}

PotentialField PotentialField::builtin(const std::string& name, const nlohmann::json& params,
                                       int dim, const std::string& field) {
  if (dim < 1) throw ConfigError("N", "dimension must be >= 1");
  const std::string pf = field + ".params";
  if (!params.is_object()) throw ConfigError(pf, "expected an object");
  Builtin b;
  b.name = name;
  b.params = params;
  if (name == "sin2x_diag") {
    reject_unknown_keys(params, {"coeffs"}, pf);
    if (!params.contains("coeffs") || !params["coeffs"].is_array())
      throw ConfigError(pf + ".coeffs", "expected an array of N numbers");
    const auto& c = params["coeffs"];
    if (static_cast<int>(c.size()) != dim)
      throw ConfigError(pf + ".coeffs", "expected " + std::to_string(dim) + " entries");
    FourierTerm t{2, Matrix::Zero(dim, dim), Matrix::Zero(dim, dim)};
    for (int i = 0; i < dim; ++i) {
      if (!c[static_cast<std::size_t>(i)].is_number())
        throw ConfigError(pf + ".coeffs[" + std::to_string(i) + "]", "expected a number");
      t.sin_coeff(i, i) = c[static_cast<std::size_t>(i)].get<double>();
    }
    if (!t.sin_coeff.allFinite()) throw ConfigError(pf + ".coeffs", "non-finite coefficient");
    b.family = Fourier{{t}};
  } else if (name == "fourier") {
    reject_unknown_keys(params, {"terms"}, pf);
    if (!params.contains("terms") || !params["terms"].is_array())
      throw ConfigError(pf + ".terms", "expected an array of terms");
    Fourier f;
    for (std::size_t i = 0; i < params["terms"].size(); ++i) {
      const auto& tj = params["terms"][i];
      const std::string tf = pf + ".terms[" + std::to_string(i) + "]";
      if (!tj.is_object()) throw ConfigError(tf, "expected an object");
      reject_unknown_keys(tj, {"k", "cos", "sin"}, tf);
      if (!tj.contains("k") || !tj["k"].is_number_integer() || tj["k"].get<int>() < 0)
        throw ConfigError(tf + ".k", "expected a non-negative integer");
      FourierTerm t{tj["k"].get<int>(), Matrix::Zero(dim, dim), Matrix::Zero(dim, dim)};
      if (tj.contains("cos")) t.cos_coeff = matrix_from_row_major(tj["cos"], dim, tf + ".cos");
      if (tj.contains("sin")) t.sin_coeff = matrix_from_row_major(tj["sin"], dim, tf + ".sin");
      f.terms.push_back(std::move(t));
    }
    b.family = std::move(f);
  } else if (name == "half_constant") {
    reject_unknown_keys(params, {"left", "right"}, pf);
    if (!params.contains("left")) throw ConfigError(pf + ".left", "missing");
    if (!params.contains("right")) throw ConfigError(pf + ".right", "missing");
    b.family = HalfConstant{matrix_from_row_major(params["left"], dim, pf + ".left"),
                            matrix_from_row_major(params["right"], dim, pf + ".right")};
  } else {
    throw ConfigError(field + ".name", "unknown builtin family '" + name + "'");
  }
  return PotentialField(dim, std::move(b));
}

std::string PotentialField::kind() const {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Zero>) return "zero";
        else if constexpr (std::is_same_v<T, Constant>) return "constant";
        else if constexpr (std::is_same_v<T, Grid>) return "grid";
        else return "builtin:" + r.name + (r.reflected ? "(reflected)" : "");
      },
      rep_);
}

void PotentialField::evaluate_into(double x, Half side, Matrix& out) const {
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Zero>) out.setZero(dim_, dim_);
        else if constexpr (std::is_same_v<T, Constant>) out = r.value;
        else if constexpr (std::is_same_v<T, Grid>) grid_eval(r, x, side, out);
        else builtin_eval(r, dim_, x, side, out);
      },
      rep_);
}

Matrix PotentialField::operator()(double x, Half side) const {
  Matrix out;
  evaluate_into(x, side, out);
  return out;
}

PotentialField PotentialField::reflected() const {
  return std::visit(
      [&](const auto& r) -> PotentialField {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Grid>) {
          Grid g;
          g.nodes.reserve(r.nodes.size());
          for (auto it = r.nodes.rbegin(); it != r.nodes.rend(); ++it) g.nodes.push_back(kPi - *it);
          g.values.assign(r.values.rbegin(), r.values.rend());
          return PotentialField(dim_, std::move(g));
        } else if constexpr (std::is_same_v<T, Builtin>) {
          Builtin b = r;
          b.reflected = !b.reflected;
          return PotentialField(dim_, std::move(b));
        } else {
          return *this;
        }
      },
      rep_);
}

std::vector<double> PotentialField::breakpoints(Half side) const {
  std::vector<double> out;
  if (const auto* g = std::get_if<Grid>(&rep_))
    for (double x : g->nodes)
      if ((side == Half::Left) == (x < kHalfPi)) out.push_back(x);
  return out;
}

double PotentialField::min_eigenvalue_estimate() const {
  if (is_zero()) return 0.0;
  double lo = std::numeric_limits<double>::infinity();
  Matrix q;
  constexpr int kSamples = 256;
  for (Half side : {Half::Left, Half::Right}) {
    const double x0 = side == Half::Left ? 0.0 : kHalfPi;
    for (int k = 0; k <= kSamples; ++k) {
      evaluate_into(x0 + kHalfPi * k / kSamples, side, q);
      lo = std::min(lo, Eigen::SelfAdjointEigenSolver<Matrix>(q, Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .minCoeff());
    }
  }
  return lo;
}

double PotentialField::max_abs_estimate() const {
  if (is_zero()) return 0.0;
  double hi = 0.0;
  Matrix q;
  constexpr int kSamples = 256;
  for (Half side : {Half::Left, Half::Right}) {
    const double x0 = side == Half::Left ? 0.0 : kHalfPi;
    for (int k = 0; k <= kSamples; ++k) {
      evaluate_into(x0 + kHalfPi * k / kSamples, side, q);
      hi = std::max(hi, q.cwiseAbs().maxCoeff());
    }
  }
  return hi;
}

nlohmann::json PotentialField::to_json() const {
  return std::visit(
      [&](const auto& r) -> nlohmann::json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Zero>) {
          return {{"type", "zero"}};
        } else if constexpr (std::is_same_v<T, Constant>) {
          return {{"type", "constant"}, {"matrix", matrix_to_json(r.value)}};
        } else if constexpr (std::is_same_v<T, Grid>) {
          nlohmann::json vals = nlohmann::json::array();
          for (const auto& v : r.values) vals.push_back(matrix_to_json(v));
          return {{"type", "grid"}, {"nodes", r.nodes}, {"values", vals}};
        } else {
          nlohmann::json j{{"type", "builtin"}, {"name", r.name}, {"params", r.params}};
          if (r.reflected) j["reflected"] = true;
          return j;
        }
      },
      rep_);
}

Matrix HalfPotential::operator()(double x) const {
  Matrix out;
  evaluate_into(x, out);
  return out;
}

void HalfPotential::evaluate_into(double x, Matrix& out) const {
  if (half_ == Half::Left) field_->evaluate_into(x, Half::Left, out);
  else field_->evaluate_into(kPi - x, Half::Right, out);
}

std::vector<double> HalfPotential::breakpoints() const {
  auto bp = field_->breakpoints(half_);
  if (half_ == Half::Right)
    for (double& x : bp) x = kPi - x;
  std::sort(bp.begin(), bp.end());
  return bp;
}

MatrixAverage matrix_average(const HalfPotential& qj, double rel_tol) {
  const int dim = qj.dim();
  std::vector<double> cuts{0.0};
  for (double b : qj.breakpoints())
    if (b > 0.0 && b < kHalfPi) cuts.push_back(b);
  cuts.push_back(kHalfPi);

  Matrix f;
  double scale = 0.0;
  auto simpson = [&](int panels) {
    Matrix total = Matrix::Zero(dim, dim);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double lo = cuts[c], hi = cuts[c + 1];
      const double h = (hi - lo) / panels;
      for (int k = 0; k <= panels; ++k) {
        qj.evaluate_into(k == panels ? hi : lo + k * h, f);
        if (!f.allFinite())
          throw NumericError("matrix_average: non-finite potential sample at x = " +
                             std::to_string(lo + k * h));
        scale = std::max(scale, f.cwiseAbs().maxCoeff());
        const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        total += (w * h / 3.0) * f;
      }
    }
    return total;
  };

  MatrixAverage out;
  out.rule = "composite Simpson on breakpoint-aligned panels with Richardson refinement";
  Matrix coarse = simpson(16);
  for (int panels = 32; panels <= (1 << 16); panels *= 2) {
    Matrix fine = simpson(panels);
    const double est = (fine - coarse).cwiseAbs().maxCoeff() / 15.0;
    const Matrix extrapolated = fine + (fine - coarse) / 15.0;
    out.value = 0.5 * extrapolated;
    out.panels = panels;
    out.error_estimate = 0.5 * est;
    if (est <= rel_tol * std::max(extrapolated.cwiseAbs().maxCoeff(), scale * kHalfPi)) break;
    coarse = std::move(fine);
  }
  return out;
}

HalfPotentials reflect_potential(const ProblemSpec& spec) {
  HalfPotential q1(spec.potential, Half::Left);
  HalfPotential q2(spec.potential, Half::Right);
  auto avg1 = matrix_average(q1);
  auto avg2 = matrix_average(q2);
  return HalfPotentials{std::move(q1), std::move(q2), std::move(avg1), std::move(avg2)};
}

SpectralParameter SpectralParameter::from_lambda(Complex lambda) {
  SpectralParameter p;
  p.lambda = lambda;
  p.s = std::sqrt(lambda);
  if (lambda.imag() == 0.0 && lambda.real() < 0.0) p.kappa = std::sqrt(-lambda.real());
  p.tau = std::abs(p.s.imag());
  return p;
}

SpectralParameter SpectralParameter::from_s(Complex s) {
  auto p = from_lambda(s * s);
  return p;
}

ProblemSpec ProblemSpec::make(int dim, double alpha, double a, PotentialField potential) {
  if (dim < 1) throw ConfigError("N", "must be a positive integer");
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > 1.0)
    throw ConfigError("alpha", "must satisfy 0 < alpha <= 1");
  if (!std::isfinite(a) || a <= 0.0) throw ConfigError("a", "must be a positive real");
  if (potential.dim() != dim)
    throw ConfigError("potential", "potential dimension " + std::to_string(potential.dim()) +
                                       " does not match N = " + std::to_string(dim));
  ProblemSpec spec;
  spec.dim = dim;
  spec.alpha = alpha;
  spec.a = a;
  spec.potential = std::make_shared<const PotentialField>(std::move(potential));
  return spec;
}

ProblemSpec ProblemSpec::with_zero_potential() const {
  return make(dim, alpha, a, PotentialField::zero(dim));
}

nlohmann::json ProblemSpec::to_json() const {
  nlohmann::json j{{"N", dim}, {"alpha", alpha}, {"a", a}, {"potential", potential->to_json()}};
  if (classical_limit()) j["mode"] = "classical-limit";
  return j;
}

}  // namespace isl
