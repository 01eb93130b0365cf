#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "tubelab/config.hpp"

namespace tubelab {

struct Artifact {
  std::string path;  ///< relative to the run directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string experiment_id;
  std::string experiment;
  std::string tag;
  std::string tool_version = kToolVersion;
  std::string started;
  std::string finished;
  std::string directory;
  nlohmann::json config;
  std::vector<Artifact> artifacts;
  bool pass = false;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

struct RunOptions {
  /// Parent of the run directory; the config's output.directory when empty.
  std::string out_root;
  int jobs = 1;
};

/// Runs the configured pipeline and writes <out_root>/<experiment_id>/ in one
/// step: outputs are staged in a private directory and renamed into place, so
/// a failing run leaves nothing behind. Throws "run-exists" if the directory
/// is already present.
RunManifest run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Problems found when re-hashing the artifacts listed in <run_dir>/manifest.json.
std::vector<std::string> verify_manifest(const std::string& run_dir);

/// Report JSON with timing fields removed, for reproducibility comparisons.
nlohmann::json strip_timing(nlohmann::json report);

}  // namespace tubelab
