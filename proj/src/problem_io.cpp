#include "isl/problem_io.hpp"

#include <fstream>
#include <sstream>

namespace isl {

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "missing");
  return obj[key];
}

double require_number(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number()) throw ConfigError(path.empty() ? key : path + "." + key, "expected a number");
  return v.get<double>();
}

void only_keys(const nlohmann::json& obj, std::initializer_list<const char*> keys,
               const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

Matrix row_major(const nlohmann::json& arr, int dim, const std::string& path) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != dim * dim)
    throw ConfigError(path, "expected an array of " + std::to_string(dim * dim) + " numbers");
  Matrix m(dim, dim);
  for (int k = 0; k < dim * dim; ++k) {
    const auto& v = arr[static_cast<std::size_t>(k)];
    if (!v.is_number()) throw ConfigError(path + "[" + std::to_string(k) + "]", "expected a number");
    m(k / dim, k % dim) = v.get<double>();
  }
  return m;
}

PotentialField parse_potential(const nlohmann::json& p, int dim) {
  const std::string path = "potential";
  if (!p.is_object()) throw ConfigError(path, "expected an object");
  const auto& type = require(p, "type", path);
  if (!type.is_string()) throw ConfigError(path + ".type", "expected a string");
  const auto t = type.get<std::string>();
  if (t == "zero") {
    only_keys(p, {"type"}, path);
    return PotentialField::zero(dim);
  }
  if (t == "constant") {
    only_keys(p, {"type", "matrix"}, path);
    return PotentialField::constant(row_major(require(p, "matrix", path), dim, path + ".matrix"));
  }
  if (t == "grid") {
    only_keys(p, {"type", "nodes", "values"}, path);
    const auto& nodes = require(p, "nodes", path);
    const auto& values = require(p, "values", path);
    if (!nodes.is_array()) throw ConfigError(path + ".nodes", "expected an array");
    if (!values.is_array()) throw ConfigError(path + ".values", "expected an array");
    std::vector<double> xs;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i].is_number())
        throw ConfigError(path + ".nodes[" + std::to_string(i) + "]", "expected a number");
      xs.push_back(nodes[i].get<double>());
    }
    std::vector<Matrix> vs;
    for (std::size_t i = 0; i < values.size(); ++i)
      vs.push_back(row_major(values[i], dim, path + ".values[" + std::to_string(i) + "]"));
    return PotentialField::grid(std::move(xs), std::move(vs));
  }
  if (t == "builtin") {
    only_keys(p, {"type", "name", "params"}, path);
    const auto& name = require(p, "name", path);
    if (!name.is_string()) throw ConfigError(path + ".name", "expected a string");
    const nlohmann::json params = p.contains("params") ? p["params"] : nlohmann::json::object();
    return PotentialField::builtin(name.get<std::string>(), params, dim, path);
  }
  throw ConfigError(path + ".type", "unknown potential type '" + t + "'");
}

}  // namespace

ProblemSpec parse_problem(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("", "problem definition must be a JSON object");
  only_keys(doc, {"N", "alpha", "a", "potential"}, "");
  const auto& n = require(doc, "N", "");
  if (!n.is_number_integer() || n.get<long long>() < 1)
    throw ConfigError("N", "must be a positive integer");
  const int dim = n.get<int>();
  const double alpha = require_number(doc, "alpha", "");
  const double a = require_number(doc, "a", "");
  // Scalar checks first so the error names the scalar field rather than the potential.
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha", "must satisfy 0 < alpha <= 1");
  if (!(a > 0.0)) throw ConfigError("a", "must be a positive real");
  auto potential = parse_potential(require(doc, "potential", ""), dim);
  return ProblemSpec::make(dim, alpha, a, std::move(potential));
}

ProblemSpec parse_problem_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_problem(doc);
}

ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("problem", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str());
}

}  // namespace isl
