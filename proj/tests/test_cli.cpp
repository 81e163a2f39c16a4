#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "isl/charfn.hpp"
#include "isl/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("isl_cli_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "isl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = isl::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const char* kClassical = R"({"N":1,"alpha":1,"a":1,"potential":{"type":"zero"}})";

}  // namespace

TEST_CASE("spectrum command writes the classical spectrum") {
  TempDir dir("spectrum");
  const auto problem = dir.write("p.json", kClassical);
  const auto out = (dir.path / "out").string();
  const auto r = run({"spectrum", "--problem", problem.string(), "--count", "6", "--out", out});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const char* f : {"spectrum_shooting.csv", "spectrum_fd.csv", "spectrum_diff.csv", "spectrum.json"})
    CHECK_MESSAGE(fs::exists(fs::path(out) / f), f);
  const auto rows = csv_rows(fs::path(out) / "spectrum_shooting.csv");
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>{"index", "lambda", "multiplicity", "method", "residual"});
  for (int n = 0; n < 6; ++n) {
    CHECK(std::abs(std::stod(rows[n + 1][1]) - n * n) <= 1e-8);
    CHECK(rows[n + 1][3] == "shooting");
  }
  // Every file embeds the resolved config.
  const auto head = slurp(fs::path(out) / "spectrum_fd.csv");
  CHECK(head.rfind("# config: {", 0) == 0);
  const auto js = nlohmann::json::parse(slurp(fs::path(out) / "spectrum.json"));
  CHECK(js.contains("config"));
}

TEST_CASE("configuration errors exit with status 2") {
  TempDir dir("config");
  const auto bad_alpha =
      dir.write("bad.json", R"({"N":1,"alpha":1.5,"a":1,"potential":{"type":"zero"}})");
  auto r = run({"spectrum", "--problem", bad_alpha.string(), "--out", dir.path.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("alpha") != std::string::npos);

  const auto good = dir.write("p.json", kClassical);
  r = run({"spectrum", "--problem", good.string(), "--count", "0", "--out", dir.path.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("count") != std::string::npos);

  r = run({"charfn", "--problem", good.string(), "--s-min", "5", "--s-max", "4", "--out",
           dir.path.string()});
  CHECK(r.code == 2);

  r = run({"spectrum", "--problem", (dir.path / "missing.json").string()});
  CHECK(r.code == 2);

  r = run({"frobnicate"});
  CHECK(r.code == 2);

  r = run({"spectrum", "--problem", good.string(), "--mesh", "16", "--out", dir.path.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("mesh") != std::string::npos);
}

TEST_CASE("charfn sign alternates on the half-integer grid in the classical case") {
  TempDir dir("charfn");
  const auto problem = dir.write("p.json", kClassical);
  const auto r = run({"charfn", "--problem", problem.string(), "--s-min", "0.5", "--s-step", "1",
                      "--s-max", "20", "--out", dir.path.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = csv_rows(dir.path / "charfn.csv");
  REQUIRE(rows.size() == 21);
  CHECK(rows[0] == std::vector<std::string>{"lambda", "s", "log_abs_omega", "sign", "omega0_paper",
                                            "omega0_exact", "G"});
  for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::stoi(rows[k][3]) == -std::stoi(rows[k - 1][3]));
}

TEST_CASE("charfn columns agree with the closed form for Q = 0") {
  TempDir dir("charfn0");
  const auto problem =
      dir.write("p.json", R"({"N":2,"alpha":0.8,"a":0.5,"potential":{"type":"zero"}})");
  const auto r = run({"charfn", "--problem", problem.string(), "--s-step", "0.25", "--s-max", "15",
                      "--out", dir.path.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = csv_rows(dir.path / "charfn.csv");
  REQUIRE(rows.size() > 10);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double s = std::stod(rows[k][1]);
    const double numeric = std::stoi(rows[k][3]) * std::exp(std::stod(rows[k][2]));
    const double exact = std::stod(rows[k][5]);
    const double envelope = std::pow(s * (0.8 * 0.5 + 2.0), 2);
    CHECK(std::abs(numeric - exact) <= 1e-8 * envelope);
    CHECK(std::stod(rows[k][6]) == 0.0);
  }
}

TEST_CASE("identical configs give byte-identical files") {
  TempDir dir("determinism");
  const auto problem = dir.write(
      "p.json",
      R"({"N":2,"alpha":0.5,"a":2,"potential":{"type":"builtin","name":"sin2x_diag","params":{"coeffs":[0.3,-0.3]}}})");
  const auto a = (dir.path / "a").string(), b = (dir.path / "b").string();
  for (const auto& out : {a, b}) {
    REQUIRE(run({"spectrum", "--problem", problem.string(), "--count", "6", "--mesh", "128",
                 "--out", out, "--threads", out == a ? "1" : "2"})
                .code == 0);
    REQUIRE(run({"charfn", "--problem", problem.string(), "--s-max", "5", "--out", out}).code == 0);
  }
  for (const char* f : {"spectrum_shooting.csv", "spectrum_fd.csv", "spectrum_diff.csv", "charfn.csv"})
    CHECK_MESSAGE(slurp(fs::path(a) / f).size() > 0, f);
  for (const char* f : {"spectrum_shooting.csv", "spectrum_fd.csv", "spectrum_diff.csv", "charfn.csv"})
    CHECK_MESSAGE(slurp(fs::path(a) / f) == slurp(fs::path(b) / f), f);
  REQUIRE(run({"charfn", "--problem", problem.string(), "--s-max", "5", "--out", a}).code == 0);
  CHECK(slurp(fs::path(a) / "charfn.csv") == slurp(fs::path(b) / "charfn.csv"));
}

TEST_CASE("numeric failure exits with status 3") {
  TempDir dir("numeric");
  const auto problem = dir.write(
      "p.json", R"({"N":1,"alpha":0.5,"a":1,"potential":{"type":"constant","matrix":[1e300]}})");
  const auto r = run({"charfn", "--problem", problem.string(), "--s-max", "1", "--out",
                      dir.path.string()});
  CHECK(r.code == 3);
  CHECK(!r.err.empty());
}

TEST_CASE("verify on the zero potential") {
  TempDir dir("verify");
  const auto problem = dir.write("p.json", kClassical);
  const auto r = run({"verify", "--problem", problem.string(), "--count", "8", "--mesh", "128",
                      "--out", dir.path.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto js = nlohmann::json::parse(slurp(dir.path / "verify.json"));
  CHECK(js["ambarzumyan"]["verdict"] == "consistent-with-zero-potential");
  for (const auto& c : js["checks"]) CHECK_MESSAGE(c["pass"].get<bool>(), c.dump());
  CHECK(fs::exists(dir.path / "verify.txt"));
}
