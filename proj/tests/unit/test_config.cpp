#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tubelab/config.hpp"
#include "tubelab/plots.hpp"
#include "tubelab/run.hpp"

#include <unistd.h>

using namespace tubelab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> violations(const std::string& text, const std::string& experiment = "") {
  try {
    parse_config(text, experiment);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool has_prefix(const std::vector<std::string>& v, const std::string& prefix) {
  for (const auto& s : v)
    if (s.rfind(prefix, 0) == 0) return true;
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("tubelab_test_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kSmallConverge = R"({
  "experiment": "converge", "theorem": "P1",
  "ladder": {"epsilons": [0.2, 0.1, 0.05]},
  "grid": {"x_length": 10, "x_spacing": 0.1, "radial_cells": 8}
})";

}  // namespace

TEST_CASE("minimal attractive config gets delta = 0.3 and c = 2 kappa") {
  const ExperimentConfig c = parse_config(R"({"experiment": "converge", "theorem": "P1", "physics": {"kappa": 1.5}})");
  CHECK(c.physics.delta.value() == 0.3);
  CHECK(c.physics.c.value() == 3.0);
  CHECK(c.ladder == std::vector<double>{0.2, 0.1, 0.05, 0.025});
}

TEST_CASE("delta out of range") {
  const auto v = violations(R"({"experiment": "converge", "theorem": "P1", "physics": {"delta": 0.6}})");
  CHECK(std::find(v.begin(), v.end(), "delta-range: requires 0 < delta < 1/2") != v.end());
}

TEST_CASE("c must exceed kappa") {
  const auto v = violations(R"({"experiment": "converge", "theorem": "P1", "physics": {"kappa": 1, "c": 1}})");
  CHECK(std::find(v.begin(), v.end(), "shift-too-small: requires c > kappa") != v.end());
}

TEST_CASE("all violations are collected") {
  const auto v = violations(R"({
    "experiment": "converge", "theorem": "P1", "colour": "red",
    "physics": {"delta": 0.9, "c": 0.5, "spin": 1},
    "ladder": {"epsilons": [0.1, 0.2]},
    "geometry": {"shape": "rectangle"}
  })");
  CHECK(has_prefix(v, "unknown-key: colour"));
  CHECK(has_prefix(v, "unknown-key: physics.spin"));
  CHECK(has_prefix(v, "delta-range"));
  CHECK(has_prefix(v, "shift-too-small"));
  CHECK(has_prefix(v, "ladder-too-short"));
  CHECK(has_prefix(v, "ladder-order"));
  CHECK(has_prefix(v, "mode-conflict"));
  CHECK(v.size() >= 7);
}

TEST_CASE("type errors and malformed documents") {
  CHECK(has_prefix(violations(R"({"physics": {"kappa": "one"}})"), "type-error: physics.kappa"));
  CHECK(has_prefix(violations("{not json"), "parse-error"));
  CHECK(has_prefix(violations(R"({"experiment": "modes"})", "klaus"), "experiment-mismatch"));
  CHECK(has_prefix(violations(R"({"experiment": "converge"})"), "theorem-invalid"));
  CHECK(has_prefix(violations(R"({"experiment": "converge", "theorem": "T2", "physics": {"kappa": 1}})"),
                   "kappa-sign"));
  CHECK(has_prefix(violations(R"({"experiment": "qeps", "qeps": {"p": 0.5}})"), "p-range"));
  CHECK(has_prefix(violations(R"({"schema_version": 7})"), "schema-version"));
}

TEST_CASE("budget violations are caught before any computation") {
  const auto v = violations(R"({
    "experiment": "converge", "theorem": "P1",
    "geometry": {"shape": "rectangle", "width": 1, "height": 1, "resolution": 256},
    "grid": {"mode": "full_tensor"}, "solver": {"budget": 100000}
  })");
  CHECK(has_prefix(v, "grid-budget"));
}

TEST_CASE("schema round trip") {
  for (const auto& kind : experiment_kinds()) {
    ExperimentConfig c = default_config(kind);
    const std::string once = serialize(c);
    const ExperimentConfig back = parse_config(once);
    CHECK(serialize(back) == once);
    CHECK(experiment_id(back) == experiment_id(c));
  }
  const ExperimentConfig e = parse_config(R"({"experiment": "modes",
    "geometry": {"shape": "polygon", "vertices": [[-1, -1], [1, -1], [0, 1]], "resolution": 16}})");
  CHECK(serialize(parse_config(serialize(e))) == serialize(e));
}

TEST_CASE("experiment id is a content hash") {
  ExperimentConfig a = default_config("qeps");
  ExperimentConfig b = a;
  CHECK(experiment_id(a) == experiment_id(b));
  b.output.directory = "elsewhere";
  CHECK(experiment_id(a) == experiment_id(b));
  b.solver.seed = 1;
  CHECK(experiment_id(a) != experiment_id(b));
  CHECK(experiment_id(a).size() == 64);
  // SHA-256 of the empty string
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("T1-style pipeline writes a complete, verifiable run") {
  TempDir tmp;
  const ExperimentConfig cfg = parse_config(kSmallConverge);
  const RunManifest m = run_experiment(cfg, {tmp.path.string(), 1});
  CHECK(m.experiment_id == experiment_id(cfg));
  std::vector<std::string> names;
  for (const auto& a : m.artifacts) names.push_back(a.path);
  for (const char* expected : {"config.json", "modes.json", "rung_00.json", "rung_02.json", "report.json",
                               "report.csv", "plot_P1.py"})
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
  CHECK(verify_manifest(m.directory).empty());
  const json report = json::parse(slurp(fs::path(m.directory) / "report.json"));
  CHECK(report["theorem_tag"] == "P1");
  CHECK(report["distances"].size() == 3);
  CHECK(report["schema_version"] == kSchemaVersion);

  SUBCASE("tampering is detected") {
    std::ofstream(fs::path(m.directory) / "report.csv", std::ios::app) << "1,2,3\n";
    const auto problems = verify_manifest(m.directory);
    REQUIRE(problems.size() == 1);
    CHECK(problems[0] == "checksum-mismatch: report.csv");
  }
  SUBCASE("runs are immutable") {
    CHECK_THROWS_WITH(run_experiment(cfg, {tmp.path.string(), 1}), doctest::Contains("run-exists"));
  }
}

TEST_CASE("identical configs give bit-identical reports") {
  TempDir tmp;
  const ExperimentConfig cfg = parse_config(kSmallConverge);
  const RunManifest a = run_experiment(cfg, {(tmp.path / "a").string(), 1});
  const RunManifest b = run_experiment(cfg, {(tmp.path / "b").string(), 3});
  CHECK(a.experiment_id == b.experiment_id);
  CHECK(slurp(fs::path(a.directory) / "report.csv") == slurp(fs::path(b.directory) / "report.csv"));
  CHECK(strip_timing(json::parse(slurp(fs::path(a.directory) / "report.json"))) ==
        strip_timing(json::parse(slurp(fs::path(b.directory) / "report.json"))));
}

TEST_CASE("failing runs leave nothing behind") {
  TempDir tmp;
  ExperimentConfig cfg = parse_config(kSmallConverge);
  cfg.solver.power_iterations = 1;
  cfg.solver.power_tolerance = 1e-16;
  CHECK_THROWS(run_experiment(cfg, {tmp.path.string(), 1}));
  CHECK((!fs::exists(tmp.path) || fs::is_empty(tmp.path)));
  cfg = parse_config(kSmallConverge);
  cfg.solver.budget = 10;
  CHECK_THROWS_AS(run_experiment(cfg, {tmp.path.string(), 1}), ConfigError);
  CHECK((!fs::exists(tmp.path) || fs::is_empty(tmp.path)));
}

TEST_CASE("plot scripts carry the theoretical guide slope") {
  CHECK(guide_slope("P1", 0.3).value() == doctest::Approx(1.15));
  CHECK(guide_slope("P2", 0.3).value() == doctest::Approx(0.55));
  CHECK(guide_slope("Q1", 0.3, 0.9).value() == doctest::Approx(0.2));
  CHECK(guide_slope("Q2", 0.3).value() == doctest::Approx(-1.4));
  CHECK_FALSE(guide_slope("T2", 0.3));
  const json q2 = {{"theorem_tag", "Q2"}, {"delta", 0.3}, {"distances", {1, 2, 3}}};
  const std::string script = plot_script(q2, "report.csv");
  CHECK(script.find("slope = -1.3999999999999999") != std::string::npos);
  CHECK(script.find("report.csv") != std::string::npos);
  CHECK_THROWS_WITH(emit_plots({"/nonexistent/report.json"}), doctest::Contains("report-not-found"));
}

TEST_CASE("empty ladder cannot reach plotting") {
  const auto v = violations(R"({"experiment": "qeps", "ladder": {"epsilons": []}})");
  CHECK(has_prefix(v, "ladder-too-short"));
}
