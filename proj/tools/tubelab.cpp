#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tubelab/config.hpp"
#include "tubelab/plots.hpp"
#include "tubelab/run.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string theorem;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  app->add_option("--out", f.out, "parent directory for run outputs (default: output.directory)");
  app->add_option("--seed", f.seed, "overrides solver.seed");
  app->add_option("--jobs", f.jobs, "rungs solved concurrently")->check(CLI::PositiveNumber);
}

int run(const std::string& experiment, const Flags& f) {
  json doc = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      std::cerr << "error: parse-error: " << e.what() << "\n";
      return 2;
    }
  }
  if (!doc.is_object()) {
    std::cerr << "error: type-error: config root must be an object\n";
    return 2;
  }
  if (!f.theorem.empty()) doc["theorem"] = f.theorem;
  if (f.seed) doc["solver"]["seed"] = *f.seed;
  try {
    const tubelab::ExperimentConfig cfg = tubelab::parse_config(doc.dump(), experiment);
    const tubelab::RunManifest m = tubelab::run_experiment(cfg, {f.out, f.jobs});
    std::cout << "run " << m.experiment_id << " (" << m.tag << ")\n"
              << "directory " << m.directory << "\n";
    for (const auto& a : m.artifacts) std::cout << "  " << a.path << "  " << a.sha256.substr(0, 12) << "\n";
    std::cout << (m.pass ? "PASS" : "FAIL") << "\n";
    return m.pass ? 0 : 1;
  } catch (const tubelab::ConfigError& e) {
    for (const auto& v : e.violations()) std::cerr << "error: " << v << "\n";
    return 2;
  } catch (const tubelab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int report(const std::vector<std::string>& dirs) {
  int status = 0;
  for (const auto& d : dirs) {
    try {
      const auto problems = tubelab::verify_manifest(d);
      for (const auto& p : problems) std::cerr << d << ": " << p << "\n";
      std::ifstream in(fs::path(d) / "manifest.json");
      const json m = json::parse(in);
      const bool pass = m.value("pass", false) && problems.empty();
      std::cout << d << "  " << m.value("tag", "") << "  " << (pass ? "PASS" : "FAIL");
      if (fs::exists(fs::path(d) / "report.json")) {
        for (const auto& s : tubelab::emit_plots({(fs::path(d) / "report.json").string()})) std::cout << "  " << s;
      }
      std::cout << "\n";
      if (!problems.empty()) status = 2;
      else if (!pass && status == 0) status = 1;
    } catch (const tubelab::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      status = 2;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tubelab: thin-tube Coulomb limit experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tubelab::kToolVersion);
  Flags flags;
  std::vector<std::string> run_dirs;
  std::string chosen;

  const std::vector<std::pair<std::string, std::string>> kinds{
      {"modes", "transverse modes and C(S) of the cross-section"},
      {"spectrum-1d", "eigenvalues of the 1D Dirichlet limit operator"},
      {"boundary-data", "boundary values at the origin and extension membership"},
      {"tube-solve", "one resolvent solve on the tube"},
      {"converge", "epsilon-ladder convergence sweep"},
      {"klaus", "Klaus conditions for the effective potential"},
      {"qeps", "Q^eps quadrature sweep"},
      {"gamma", "Gamma-convergence trial checks"}};
  for (const auto& [name, help] : kinds) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    if (name == "converge")
      sub->add_option("--theorem", flags.theorem, "T1, T2, P1 or P2")
          ->check(CLI::IsMember({"T1", "T2", "P1", "P2"}))
          ->required();
    sub->callback([&chosen, n = name] { chosen = n; });
  }
  CLI::App* rep = app.add_subcommand("report", "verify run directories and emit plot scripts");
  rep->add_option("runs", run_dirs, "run directories")->required()->check(CLI::ExistingDirectory);
  rep->callback([&chosen] { chosen = "report"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (chosen == "report") return report(run_dirs);
  return run(chosen, flags);
}
