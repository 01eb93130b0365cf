#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tubelab/error.hpp"
#include "tubelab/geometry.hpp"
#include "tubelab/line.hpp"
#include "tubelab/qeps.hpp"
#include "tubelab/tube.hpp"

namespace tubelab {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct PhysicsBlock {
  double kappa = 1.0;
  std::optional<double> delta;
  std::optional<double> c;
  TwistProfile twist;
};

struct GridBlock {
  TubeMode mode = TubeMode::axisymmetric;
  double x_length = 40.0;
  double x_spacing = 0.05;
  int radial_cells = 16;
};

struct SolverBlock {
  double rtol = 1e-9;
  std::size_t budget = 3'000'000;
  std::uint64_t seed = 12345;
  int power_iterations = 30;
  double power_tolerance = 1e-4;
};

struct SpectrumBlock {
  int levels = 3;
  double length = 200.0;
  double spacing = 0.01;
};

struct SideBlock {
  double value = 0.0;
  double derivative = 1.0;
};

struct BoundaryBlock {
  double energy = -0.25;
  double start = 1.0;
  SideBlock plus{0.6065306597126334, 0.3032653298563167};
  SideBlock minus{0.6065306597126334, -0.3032653298563167};
  double r0 = 1e-8;
  int samples = 4;
  std::vector<double> extension{0.0, 0.0, 0.0, 0.0};
  double tolerance = 1e-6;
};

struct TubeSolveBlock {
  double epsilon = 0.1;
  double shift_re = -1.0;
  double shift_im = 0.0;
  std::string form = "a_dot";
  std::string theta = "L_smooth";
};

struct QepsBlock {
  QepsScenario scenario = QepsScenario::bounded_profile;
  double p = 0.9;
  double amplitude = 1.0;
};

struct GammaBlock {
  std::string profile = "x_gauss";
  bool grid_check = true;
};

struct KlausBlock {
  double threshold = -5.0;
  int samples = 50;
};

struct OutputBlock {
  std::string directory = "runs";
  std::vector<std::string> formats{"json", "csv"};
};

/// One experiment: kind plus every block, all validated before any computation.
struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string experiment = "modes";
  std::optional<std::string> theorem;
  CrossSectionSpec geometry = CrossSectionSpec::disk(1.0, 32);
  PhysicsBlock physics;
  std::vector<double> ladder{0.2, 0.1, 0.05, 0.025};
  GridBlock grid;
  SolverBlock solver;
  SpectrumBlock spectrum;
  BoundaryBlock boundary;
  TubeSolveBlock tube;
  QepsBlock qeps;
  GammaBlock gamma;
  KlausBlock klaus;
  OutputBlock output;

  double delta() const { return physics.delta.value_or(0.3); }
  double shift_c() const;
  TubeOperatorSpec tube_spec() const;
  std::string tag() const;
};

/// Thrown by parse_config with every violation found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

const std::vector<std::string>& experiment_kinds();

/// Parses a JSON document; `experiment_override` (from the CLI subcommand) fills
/// or must match the document's experiment field.
ExperimentConfig parse_config(const std::string& text, const std::string& experiment_override = "");
/// Defaults of the given experiment kind, validated.
ExperimentConfig default_config(const std::string& experiment);
/// Collects all constraint violations; empty when valid.
std::vector<std::string> validate(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
std::string serialize(const ExperimentConfig& cfg);

std::string sha256_hex(const std::string& data);
/// Content hash of the canonical serialization.
std::string experiment_id(const ExperimentConfig& cfg);

}  // namespace tubelab
