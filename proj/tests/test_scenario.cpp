#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lipdiff/karcher.hpp"
#include "lipdiff/parallel.hpp"
#include "lipdiff/rng.hpp"
#include "lipdiff/scenario.hpp"

using namespace lipdiff;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_scenario(const char* name, const char* pipeline) {
  return json{{"schema", "lipdiff-scenario/1"},
              {"name", name},
              {"pipeline", pipeline},
              {"seed", 42}};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* tag) {
    path = fs::temp_directory_path() / (std::string("lipdiff_") + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("run_scenario: cube certify refutes with exit 2") {
  json s = base_scenario("cube-certify", "certify");
  s["map"] = {{"catalog", "cube"}};
  s["point"] = {0.0};
  const cli::RunResult r = cli::run_scenario_json(s, ".");
  CHECK(r.exit_code == 2);
  CHECK(r.envelope["verdict"] == "refuted(jacobian-singular)");
  CHECK(r.envelope["reports"]["certificate"]["jacobian_g"]["sigma_min"].get<double>() <=
        1e-10);
}

TEST_CASE("run_scenario: affine certify passes with exit 0") {
  json s = base_scenario("affine-certify", "certify");
  s["map"] = {{"catalog", "affine"}, {"A", {{2.0, 0.0}, {0.0, 3.0}}}, {"b", {0.0, 0.0}}};
  s["point"] = {0.0, 0.0};
  const cli::RunResult r = cli::run_scenario_json(s, ".");
  CHECK(r.exit_code == 0);
  CHECK(r.envelope["verdict"] == "certified");
}

TEST_CASE("run_scenario: karcher-mean from matrix files") {
  TempDir dir("karcher_files");
  Rng rng(13);
  for (int i = 0; i < 3; ++i) {
    Mat g(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) g(r, c) = rng.gauss();
    Mat m = g * g.transpose() + 0.5 * Mat::Identity(3, 3);
    spd::save_matrix((dir.path / ("a" + std::to_string(i) + ".mat")).string(), m);
  }
  json s = base_scenario("karcher-files", "karcher-mean");
  s["operands"] = {"a0.mat", "a1.mat", "a2.mat"};
  s["tol"] = 1e-10;
  const cli::RunResult r = cli::run_scenario_json(s, dir.path.string());
  CHECK(r.exit_code == 0);
  CHECK(r.envelope["reports"]["karcher_mean"]["final_residual"].get<double>() <= 1e-10);
}

TEST_CASE("run_scenario: derived-set on tsinlog emits bounded quotients") {
  json s = base_scenario("tsinlog-derived", "derived-set");
  s["map"] = "tsinlog";
  s["point"] = {0.0};
  s["direction"] = {1.0};
  s["schedule"] = {{"t0", 0.5}, {"ratio", 0.93}, {"count", 240}};
  s["cluster_tol"] = 0.05;
  const cli::RunResult r = cli::run_scenario_json(s, ".");
  REQUIRE(r.exit_code == 0);
  CHECK(r.envelope["verdict"] == "multivalued");
  for (const json& q : r.envelope["reports"]["derived_set"]["quotients"]) {
    const double v = q["q"][0].get<double>();
    CHECK(v >= -1.0 - 1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }

  TempDir dir("profiles_derived");
  const auto files = cli::emit_profiles(r.envelope, dir.path.string());
  REQUIRE(files.size() == 1);
  std::ifstream csv(files.front());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,q0");
  // Value column stays within [-1, 1].
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) {
    const double v = std::stod(line.substr(line.find(',') + 1));
    CHECK(v >= -1.0 - 1e-12);
    CHECK(v <= 1.0 + 1e-12);
    ++rows;
  }
  CHECK(rows == 240);
}

TEST_CASE("run_scenario: non-convergence exits 3") {
  json s = base_scenario("karcher-starved", "karcher-mean");
  s["operands_inline"] = {{{2.0, 0.2}, {0.2, 1.0}}, {{1.0, 0.0}, {0.0, 3.0}}};
  s["max_iter"] = 0;
  const cli::RunResult r = cli::run_scenario_json(s, ".");
  CHECK(r.exit_code == 3);
  CHECK(r.envelope["verdict"] == "no-convergence");
}

TEST_CASE("run_scenario: lipschitz pipeline classifies cbrt blowup") {
  json s = base_scenario("cbrt-lipschitz", "lipschitz");
  s["map"] = {{"catalog", "cube"}, {"component", "f"}};
  s["point"] = {0.0};
  s["radii"] = {1e-2, 1e-4, 1e-6};
  s["pairs"] = 128;
  const cli::RunResult r = cli::run_scenario_json(s, ".");
  CHECK(r.exit_code == 2);
  CHECK(r.envelope["verdict"] == "blowup");
}

TEST_CASE("run_scenario: density probe on exp-log passes, cube refutes") {
  json ok = base_scenario("density-exp", "density-probe");
  ok["map"] = {{"catalog", "exp-log"}};
  ok["point"] = {0.0};
  ok["w"] = {1.0};
  CHECK(cli::run_scenario_json(ok, ".").exit_code == 0);

  json bad = base_scenario("density-cube", "density-probe");
  bad["map"] = {{"catalog", "cube"}};
  bad["point"] = {0.0};
  bad["w"] = {1.0};
  const cli::RunResult r = cli::run_scenario_json(bad, ".");
  CHECK(r.exit_code == 2);
  CHECK(r.envelope["verdict"] == "lipschitz-bound-violated");
}

TEST_CASE("run_scenario: chain-rule pipeline on the tsinlog composite") {
  json s = base_scenario("chain-tsinlog", "chain-rule");
  s["map"] = {{"catalog", "tsinlog-composite"}};
  s["point"] = {0.0};
  s["direction"] = {1.0};
  s["schedule"] = {{"t0", 0.5}, {"ratio", 0.93}, {"count", 240}};
  s["cluster_tol"] = 0.05;
  const cli::RunResult r = cli::run_scenario_json(s, ".");
  CHECK(r.exit_code == 0);
  CHECK(r.envelope["reports"]["chain_rule"]["hull_gap"].get<double>() <= 0.05);
}

TEST_CASE("run_scenario: parse errors exit 1 with a structured object") {
  json no_seed = json{{"schema", "lipdiff-scenario/1"},
                      {"name", "x"},
                      {"pipeline", "certify"}};
  const cli::RunResult r1 = cli::run_scenario_json(no_seed, ".");
  CHECK(r1.exit_code == 1);
  CHECK(r1.envelope["error"]["type"] == "parse-error");

  json bad_pipe = base_scenario("x", "no-such-pipeline");
  CHECK(cli::run_scenario_json(bad_pipe, ".").exit_code == 1);

  json bad_tol = base_scenario("x", "certify");
  bad_tol["map"] = {{"catalog", "cube"}};
  bad_tol["point"] = {0.0};
  bad_tol["tolerances"] = {{"inverse", -1.0}};
  CHECK(cli::run_scenario_json(bad_tol, ".").exit_code == 1);

  json missing_file = base_scenario("x", "karcher-mean");
  missing_file["operands"] = {"does_not_exist.mat"};
  const cli::RunResult r4 = cli::run_scenario_json(missing_file, ".");
  CHECK(r4.exit_code == 1);
  CHECK(r4.envelope["error"]["type"] == "parse-error");

  json unknown_map = base_scenario("x", "certify");
  unknown_map["map"] = {{"catalog", "no-such"}};
  unknown_map["point"] = {0.0};
  const cli::RunResult r5 = cli::run_scenario_json(unknown_map, ".");
  CHECK(r5.exit_code == 1);
  CHECK(r5.envelope["error"]["type"] == "module-error");
}

TEST_CASE("run_scenario_file: missing and malformed files") {
  CHECK(cli::run_scenario_file("/nonexistent/scenario.json").exit_code == 1);
  TempDir dir("bad_json");
  const std::string path = (dir.path / "bad.json").string();
  std::ofstream(path) << "{ not json";
  const cli::RunResult r = cli::run_scenario_file(path);
  CHECK(r.exit_code == 1);
  CHECK(r.envelope["error"]["type"] == "parse-error");
}

TEST_CASE("determinism: identical scenario and seed give identical bytes") {
  json s = base_scenario("determinism", "certify");
  s["map"] = {{"catalog", "exp-log"}};
  s["point"] = {0.1};
  const std::string a =
      cli::strip_volatile(cli::run_scenario_json(s, ".").envelope).dump();
  const std::string b =
      cli::strip_volatile(cli::run_scenario_json(s, ".").envelope).dump();
  CHECK(a == b);

  // Thread count must not perturb any reported value.
  par::set_max_threads(1);
  const std::string serial =
      cli::strip_volatile(cli::run_scenario_json(s, ".").envelope).dump();
  par::set_max_threads(4);
  const std::string parallel =
      cli::strip_volatile(cli::run_scenario_json(s, ".").envelope).dump();
  par::set_max_threads(0);
  CHECK(serial == parallel);
  CHECK(serial == a);

  // A different seed must change the sampled diagnostics.
  json s2 = s;
  s2["seed"] = 43;
  const std::string c =
      cli::strip_volatile(cli::run_scenario_json(s2, ".").envelope).dump();
  CHECK(a != c);
}

TEST_CASE("emit_profiles: certify writes exactly three CSVs") {
  json s = base_scenario("exp-certify", "certify");
  s["map"] = {{"catalog", "exp-log"}};
  s["point"] = {0.0};
  const cli::RunResult r = cli::run_scenario_json(s, ".");
  REQUIRE(r.exit_code == 0);
  TempDir dir("profiles_certify");
  const auto files = cli::emit_profiles(r.envelope, dir.path.string());
  CHECK(files.size() == 3);
  for (const std::string& f : files) CHECK(fs::exists(f));
}

TEST_CASE("emit_profiles: karcher-mean writes one trace CSV") {
  json s = base_scenario("karcher-trace", "karcher-mean");
  s["operands_inline"] = {{{2.0, 0.2}, {0.2, 1.0}}, {{1.0, 0.0}, {0.0, 3.0}}};
  const cli::RunResult r = cli::run_scenario_json(s, ".");
  REQUIRE(r.exit_code == 0);
  TempDir dir("profiles_karcher");
  const auto files = cli::emit_profiles(r.envelope, dir.path.string());
  REQUIRE(files.size() == 1);
  std::ifstream csv(files.front());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "iteration,residual");
}

TEST_CASE("catalog_text lists the stable names") {
  const std::string text = cli::catalog_text();
  for (const char* name :
       {"cube", "exp-log", "affine", "poly2d", "karcher-pair", "tsinlog", "identity-n"}) {
    CAPTURE(name);
    CHECK(text.find(name) != std::string::npos);
  }
}
