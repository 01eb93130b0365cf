#include "tubelab/config.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

namespace tubelab {

using nlohmann::json;

namespace {

const std::set<std::string> kTheorems{"T1", "T2", "P1", "P2"};

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

/// Reads typed fields out of a JSON object, recording every problem instead of stopping.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      errors_.push_back("type-error: " + path + " must be an object");
      return false;
    }
    for (auto it = j.begin(); it != j.end(); ++it)
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }) == allowed.end())
        errors_.push_back("unknown-key: " + (path.empty() ? "" : path + ".") + it.key());
    return true;
  }

  template <typename T>
  void read(const json& j, const std::string& path, const char* key, T& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    const std::string where = (path.empty() ? "" : path + ".") + key;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer() && !v.is_number_unsigned()) throw std::invalid_argument("integer");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("string");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      errors_.push_back("type-error: " + where + " has the wrong type (" + e.what() + ")");
    }
  }

  template <typename T>
  void read_opt(const json& j, const std::string& path, const char* key, std::optional<T>& out) {
    if (!j.contains(key)) return;
    T v{};
    const std::size_t before = errors_.size();
    read(j, path, key, v);
    if (errors_.size() == before) out = v;
  }

  void read_numbers(const json& j, const std::string& path, const char* key, std::vector<double>& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
      errors_.push_back("type-error: " + path + "." + key + " must be an array of numbers");
      return;
    }
    out = v.get<std::vector<double>>();
  }

 private:
  std::vector<std::string>& errors_;
};

void read_geometry(Reader& r, const json& j, CrossSectionSpec& g, std::vector<std::string>& errors) {
  if (!r.object(j, "geometry", {"shape", "radius", "semi_axes", "width", "height", "vertices", "center", "resolution"}))
    return;
  std::string shape = to_string(g.kind);
  r.read(j, "geometry", "shape", shape);
  try {
    g.kind = shape_from_string(shape);
  } catch (const Error& e) {
    errors.push_back(e.what());
  }
  r.read(j, "geometry", "radius", g.radius);
  r.read(j, "geometry", "width", g.width);
  r.read(j, "geometry", "height", g.height);
  r.read(j, "geometry", "resolution", g.resolution);
  std::vector<double> axes{g.semi_a, g.semi_b};
  r.read_numbers(j, "geometry", "semi_axes", axes);
  if (axes.size() != 2)
    errors.push_back("type-error: geometry.semi_axes needs 2 entries");
  else {
    g.semi_a = axes[0];
    g.semi_b = axes[1];
  }
  std::vector<double> c{g.center.x(), g.center.y()};
  r.read_numbers(j, "geometry", "center", c);
  if (c.size() != 2)
    errors.push_back("type-error: geometry.center needs 2 entries");
  else
    g.center = Eigen::Vector2d(c[0], c[1]);
  if (j.contains("vertices")) {
    const json& v = j.at("vertices");
    g.vertices.clear();
    bool ok = v.is_array();
    if (ok)
      for (const auto& p : v) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          ok = false;
          break;
        }
        g.vertices.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
    if (!ok) errors.push_back("type-error: geometry.vertices must be a list of [y1, y2] pairs");
  }
}

void read_twist(Reader& r, const json& j, TwistProfile& t, std::vector<std::string>& errors) {
  if (!r.object(j, "physics.twist", {"family", "rate", "amplitude", "support"})) return;
  std::string family = to_string(t.family);
  r.read(j, "physics.twist", "family", family);
  try {
    t.family = twist_from_string(family);
  } catch (const Error& e) {
    errors.push_back(e.what());
  }
  r.read(j, "physics.twist", "rate", t.rate);
  r.read(j, "physics.twist", "amplitude", t.amplitude);
  r.read(j, "physics.twist", "support", t.support);
}

bool uses_tube(const ExperimentConfig& c) { return c.experiment == "converge" || c.experiment == "tube-solve"; }

bool attractive(const ExperimentConfig& c) { return c.physics.kappa > 0; }

}  // namespace

double ExperimentConfig::shift_c() const { return physics.c.value_or(physics.kappa > 0 ? 2 * physics.kappa : 0.0); }

TubeOperatorSpec ExperimentConfig::tube_spec() const {
  TubeOperatorSpec s;
  s.kappa = physics.kappa;
  s.epsilon = ladder.empty() ? 1.0 : ladder.front();
  s.delta = delta();
  s.shift_c = shift_c();
  s.twist = physics.twist;
  s.cross_section = geometry;
  s.x_length = grid.x_length;
  s.x_spacing = grid.x_spacing;
  s.mode = grid.mode;
  s.radial_cells = grid.radial_cells;
  s.budget = solver.budget;
  return s;
}

std::string ExperimentConfig::tag() const {
  if (experiment == "converge") return theorem.value_or("T1");
  if (experiment == "klaus") return "KLAUS";
  if (experiment == "gamma") return "P4";
  if (experiment == "qeps") return qeps.scenario == QepsScenario::bounded_profile ? "Q1" : "Q2";
  return experiment;
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error("config-invalid", join(violations, "; ")), violations_(std::move(violations)) {}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"modes",      "spectrum-1d", "boundary-data", "tube-solve",
                                              "converge",   "klaus",       "qeps",          "gamma"};
  return kinds;
}

namespace {

// Defaults that depend on the experiment kind, applied before the document is overlaid.
ExperimentConfig base_config(const std::string& experiment, const std::optional<std::string>& theorem) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.theorem = theorem;
  if (experiment == "klaus") c.ladder = {1e-2, 1e-3, 1e-4};
  if (experiment == "gamma") {
    c.ladder = {0.1, 0.01, 1e-3};
    c.physics.kappa = -1.0;
  }
  if (experiment == "converge" && theorem && *theorem == "T2") {
    c.physics.kappa = -1.0;
    c.grid.x_length = 20.0;
    c.grid.x_spacing = 0.01;
  }
  return c;
}

void fill_defaults(ExperimentConfig& c) {
  if (!c.physics.delta) c.physics.delta = 0.3;
  if (!c.physics.c && c.physics.kappa > 0) c.physics.c = 2 * c.physics.kappa;
}

}  // namespace

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> v;
  if (c.schema_version != kSchemaVersion)
    v.push_back("schema-version: expected " + std::to_string(kSchemaVersion) + ", got " + std::to_string(c.schema_version));
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.experiment) == kinds.end())
    v.push_back("experiment-invalid: unknown experiment '" + c.experiment + "'");
  if (c.experiment == "converge") {
    if (!c.theorem || !kTheorems.count(*c.theorem)) v.push_back("theorem-invalid: converge needs theorem T1, T2, P1 or P2");
  } else if (c.theorem) {
    v.push_back("theorem-invalid: theorem is only meaningful for converge");
  }
  try {
    c.geometry.validate();
  } catch (const Error& e) {
    v.push_back(e.what());
  }
  const double delta = c.delta();
  if (!(delta > 0 && delta < 0.5)) v.push_back("delta-range: requires 0 < delta < 1/2");
  if (attractive(c) && !(c.shift_c() > c.physics.kappa)) v.push_back("shift-too-small: requires c > kappa");
  if (c.physics.twist.family == TwistFamily::compact_bump && !(c.physics.twist.support > 0))
    v.push_back("twist-invalid: bump support must be positive");

  const bool needs_ladder = c.experiment == "converge" || c.experiment == "klaus" || c.experiment == "qeps" ||
                            c.experiment == "gamma";
  if (needs_ladder) {
    if (c.ladder.size() < 3) v.push_back("ladder-too-short: at least 3 rungs are required");
    for (std::size_t i = 0; i < c.ladder.size(); ++i) {
      if (!(c.ladder[i] > 0 && c.ladder[i] <= 1)) v.push_back("epsilon-range: every eps must lie in (0, 1]");
      if (i > 0 && !(c.ladder[i] < c.ladder[i - 1])) v.push_back("ladder-order: ladder must be strictly decreasing");
    }
  }

  if (uses_tube(c)) {
    if (c.grid.mode == TubeMode::axisymmetric) {
      if (c.geometry.kind != ShapeKind::disk || c.geometry.center.norm() != 0)
        v.push_back("mode-conflict: axisymmetric mode requires a disk centred at the origin");
      if (!c.physics.twist.is_zero()) v.push_back("mode-conflict: axisymmetric mode requires zero twist");
      if (c.grid.radial_cells < 4) v.push_back("mesh-too-coarse: radial grid needs at least 4 cells");
    }
    try {
      const Grid1D g = make_grid(c.grid.x_length, c.grid.x_spacing);
      double ny = c.grid.radial_cells;
      if (c.grid.mode == TubeMode::full_tensor)
        ny = c.geometry.area() * c.geometry.resolution * c.geometry.resolution;
      if (ny * g.size() > static_cast<double>(c.solver.budget))
        v.push_back("grid-budget: about " + std::to_string(static_cast<long long>(ny * g.size())) +
                    " unknowns exceed budget " + std::to_string(c.solver.budget));
    } catch (const Error& e) {
      v.push_back(e.what());
    }
  }
  if (c.experiment == "converge" && c.theorem) {
    if (*c.theorem == "T2" && c.physics.kappa > 0) v.push_back("kappa-sign: T2 is the repulsive case (kappa <= 0)");
    if (*c.theorem != "T2" && !(c.physics.kappa > 0)) v.push_back("kappa-sign: " + *c.theorem + " needs kappa > 0");
  }
  if (c.experiment == "tube-solve") {
    if (!(c.tube.epsilon > 0 && c.tube.epsilon <= 1)) v.push_back("epsilon-range: tube.epsilon must lie in (0, 1]");
    if (c.tube.form != "b" && c.tube.form != "a" && c.tube.form != "a_dot")
      v.push_back("form-invalid: tube.form must be b, a or a_dot");
    if (c.tube.theta != "L_smooth" && c.tube.theta != "L_near_origin" && c.tube.theta != "L_perp")
      v.push_back("theta-invalid: tube.theta must be L_smooth, L_near_origin or L_perp");
  }
  if (c.experiment == "klaus") {
    if (!(c.physics.kappa > 0)) v.push_back("kappa-sign: Klaus checks need kappa > 0");
    if (c.klaus.samples < 2) v.push_back("klaus-samples: need at least 2 sample points");
  }
  if (c.experiment == "gamma") {
    if (c.physics.kappa > 0) v.push_back("kappa-sign: Gamma trial needs kappa <= 0");
    try {
      trial_function(c.gamma.profile);
    } catch (const Error& e) {
      v.push_back(e.what());
    }
  }
  if (c.experiment == "qeps" && c.qeps.scenario == QepsScenario::bounded_profile) {
    if (!(c.qeps.p > 0.75 && c.qeps.p < 1)) v.push_back("p-range: requires 3/4 < p < 1");
    else if (!(delta > 2 - 2 * c.qeps.p)) v.push_back("delta-range: scenario 1 requires 2 - 2p < delta < 1/2");
  }
  if (c.experiment == "boundary-data") {
    if (c.physics.kappa == 0) v.push_back("log-regularization-undefined: kappa = 0");
    if (c.boundary.samples < 3) v.push_back("need-3-points: at least 3 samples per side are required");
    if (!(c.boundary.r0 > 0 && c.boundary.r0 < c.boundary.start)) v.push_back("boundary-invalid: need 0 < r0 < start");
    if (c.boundary.extension.size() != 4) v.push_back("boundary-invalid: extension needs 4 angles");
  }
  if (c.experiment == "spectrum-1d") {
    if (c.spectrum.levels < 1) v.push_back("spectrum-invalid: levels must be >= 1");
    try {
      make_grid(c.spectrum.length, c.spectrum.spacing);
    } catch (const Error& e) {
      v.push_back(e.what());
    }
  }
  if (!(c.solver.rtol > 0 && c.solver.rtol <= 1e-3)) v.push_back("solver-invalid: rtol must lie in (0, 1e-3]");
  if (c.solver.power_iterations < 1) v.push_back("solver-invalid: power_iterations must be >= 1");
  if (c.solver.budget == 0) v.push_back("solver-invalid: budget must be positive");
  for (const auto& f : c.output.formats)
    if (f != "json" && f != "csv" && f != "nodal") v.push_back("output-invalid: unknown format '" + f + "'");
  return v;
}

ExperimentConfig parse_config(const std::string& text, const std::string& experiment_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("parse-error: ") + e.what()});
  }
  std::vector<std::string> errors;
  Reader r(errors);
  if (!r.object(doc, "", {"schema_version", "experiment", "theorem", "geometry", "physics", "ladder", "grid", "solver",
                          "spectrum", "boundary", "tube", "qeps", "gamma", "klaus", "output"}))
    throw ConfigError(errors);

  std::string experiment = experiment_override;
  if (doc.contains("experiment")) {
    std::string declared;
    r.read(doc, "", "experiment", declared);
    if (!experiment_override.empty() && declared != experiment_override)
      errors.push_back("experiment-mismatch: document declares '" + declared + "' but '" + experiment_override +
                       "' was requested");
    if (experiment.empty()) experiment = declared;
  }
  if (experiment.empty()) experiment = "modes";
  std::optional<std::string> theorem;
  r.read_opt(doc, "", "theorem", theorem);

  ExperimentConfig c = base_config(experiment, theorem);
  r.read(doc, "", "schema_version", c.schema_version);
  if (doc.contains("geometry")) read_geometry(r, doc["geometry"], c.geometry, errors);
  if (doc.contains("physics")) {
    const json& p = doc["physics"];
    if (r.object(p, "physics", {"kappa", "delta", "c", "twist"})) {
      r.read(p, "physics", "kappa", c.physics.kappa);
      r.read_opt(p, "physics", "delta", c.physics.delta);
      r.read_opt(p, "physics", "c", c.physics.c);
      if (p.contains("twist")) read_twist(r, p["twist"], c.physics.twist, errors);
    }
  }
  if (doc.contains("ladder")) {
    const json& l = doc["ladder"];
    if (r.object(l, "ladder", {"epsilons"})) r.read_numbers(l, "ladder", "epsilons", c.ladder);
  }
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (r.object(g, "grid", {"mode", "x_length", "x_spacing", "radial_cells"})) {
      std::string mode = to_string(c.grid.mode);
      r.read(g, "grid", "mode", mode);
      try {
        c.grid.mode = tube_mode_from_string(mode);
      } catch (const Error& e) {
        errors.push_back(e.what());
      }
      r.read(g, "grid", "x_length", c.grid.x_length);
      r.read(g, "grid", "x_spacing", c.grid.x_spacing);
      r.read(g, "grid", "radial_cells", c.grid.radial_cells);
    }
  }
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    if (r.object(s, "solver", {"rtol", "budget", "seed", "power_iterations", "power_tolerance"})) {
      r.read(s, "solver", "rtol", c.solver.rtol);
      r.read(s, "solver", "budget", c.solver.budget);
      r.read(s, "solver", "seed", c.solver.seed);
      r.read(s, "solver", "power_iterations", c.solver.power_iterations);
      r.read(s, "solver", "power_tolerance", c.solver.power_tolerance);
    }
  }
  if (doc.contains("spectrum")) {
    const json& s = doc["spectrum"];
    if (r.object(s, "spectrum", {"levels", "length", "spacing"})) {
      r.read(s, "spectrum", "levels", c.spectrum.levels);
      r.read(s, "spectrum", "length", c.spectrum.length);
      r.read(s, "spectrum", "spacing", c.spectrum.spacing);
    }
  }
  if (doc.contains("boundary")) {
    const json& b = doc["boundary"];
    if (r.object(b, "boundary", {"energy", "start", "plus", "minus", "r0", "samples", "extension", "tolerance"})) {
      r.read(b, "boundary", "energy", c.boundary.energy);
      r.read(b, "boundary", "start", c.boundary.start);
      r.read(b, "boundary", "r0", c.boundary.r0);
      r.read(b, "boundary", "samples", c.boundary.samples);
      r.read(b, "boundary", "tolerance", c.boundary.tolerance);
      r.read_numbers(b, "boundary", "extension", c.boundary.extension);
      for (auto [key, side] : {std::pair{"plus", &c.boundary.plus}, std::pair{"minus", &c.boundary.minus}}) {
        if (!b.contains(key)) continue;
        const std::string path = std::string("boundary.") + key;
        if (r.object(b[key], path, {"value", "derivative"})) {
          r.read(b[key], path, "value", side->value);
          r.read(b[key], path, "derivative", side->derivative);
        }
      }
    }
  }
  if (doc.contains("tube")) {
    const json& t = doc["tube"];
    if (r.object(t, "tube", {"epsilon", "shift", "form", "theta"})) {
      r.read(t, "tube", "epsilon", c.tube.epsilon);
      std::vector<double> shift{c.tube.shift_re, c.tube.shift_im};
      r.read_numbers(t, "tube", "shift", shift);
      if (shift.size() != 2)
        errors.push_back("type-error: tube.shift must be [re, im]");
      else {
        c.tube.shift_re = shift[0];
        c.tube.shift_im = shift[1];
      }
      r.read(t, "tube", "form", c.tube.form);
      r.read(t, "tube", "theta", c.tube.theta);
    }
  }
  if (doc.contains("qeps")) {
    const json& q = doc["qeps"];
    if (r.object(q, "qeps", {"scenario", "p", "amplitude"})) {
      std::string sc = to_string(c.qeps.scenario);
      r.read(q, "qeps", "scenario", sc);
      try {
        c.qeps.scenario = qeps_scenario_from_string(sc);
      } catch (const Error& e) {
        errors.push_back(e.what());
      }
      r.read(q, "qeps", "p", c.qeps.p);
      r.read(q, "qeps", "amplitude", c.qeps.amplitude);
    }
  }
  if (doc.contains("gamma")) {
    const json& g = doc["gamma"];
    if (r.object(g, "gamma", {"profile", "grid_check"})) {
      r.read(g, "gamma", "profile", c.gamma.profile);
      r.read(g, "gamma", "grid_check", c.gamma.grid_check);
    }
  }
  if (doc.contains("klaus")) {
    const json& k = doc["klaus"];
    if (r.object(k, "klaus", {"threshold", "samples"})) {
      r.read(k, "klaus", "threshold", c.klaus.threshold);
      r.read(k, "klaus", "samples", c.klaus.samples);
    }
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    if (r.object(o, "output", {"directory", "formats"})) {
      r.read(o, "output", "directory", c.output.directory);
      if (o.contains("formats")) {
        if (o["formats"].is_array() && std::all_of(o["formats"].begin(), o["formats"].end(),
                                                    [](const json& e) { return e.is_string(); }))
          c.output.formats = o["formats"].get<std::vector<std::string>>();
        else
          errors.push_back("type-error: output.formats must be a list of strings");
      }
    }
  }
  fill_defaults(c);
  for (auto& e : validate(c)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

ExperimentConfig default_config(const std::string& experiment) {
  std::optional<std::string> theorem;
  if (experiment == "converge") theorem = "T1";
  ExperimentConfig c = base_config(experiment, theorem);
  fill_defaults(c);
  const auto v = validate(c);
  if (!v.empty()) throw ConfigError(v);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["experiment"] = c.experiment;
  if (c.theorem) j["theorem"] = *c.theorem;
  json g;
  g["shape"] = to_string(c.geometry.kind);
  switch (c.geometry.kind) {
    case ShapeKind::disk: g["radius"] = c.geometry.radius; break;
    case ShapeKind::ellipse: g["semi_axes"] = {c.geometry.semi_a, c.geometry.semi_b}; break;
    case ShapeKind::rectangle:
      g["width"] = c.geometry.width;
      g["height"] = c.geometry.height;
      break;
    case ShapeKind::polygon: {
      json v = json::array();
      for (const auto& p : c.geometry.vertices) v.push_back({p.x(), p.y()});
      g["vertices"] = v;
      break;
    }
  }
  g["center"] = {c.geometry.center.x(), c.geometry.center.y()};
  g["resolution"] = c.geometry.resolution;
  j["geometry"] = g;
  json p;
  p["kappa"] = c.physics.kappa;
  if (c.physics.delta) p["delta"] = *c.physics.delta;
  if (c.physics.c) p["c"] = *c.physics.c;
  p["twist"] = {{"family", to_string(c.physics.twist.family)},
                {"rate", c.physics.twist.rate},
                {"amplitude", c.physics.twist.amplitude},
                {"support", c.physics.twist.support}};
  j["physics"] = p;
  j["ladder"] = {{"epsilons", c.ladder}};
  j["grid"] = {{"mode", to_string(c.grid.mode)},
               {"x_length", c.grid.x_length},
               {"x_spacing", c.grid.x_spacing},
               {"radial_cells", c.grid.radial_cells}};
  j["solver"] = {{"rtol", c.solver.rtol},
                 {"budget", c.solver.budget},
                 {"seed", c.solver.seed},
                 {"power_iterations", c.solver.power_iterations},
                 {"power_tolerance", c.solver.power_tolerance}};
  j["spectrum"] = {{"levels", c.spectrum.levels}, {"length", c.spectrum.length}, {"spacing", c.spectrum.spacing}};
  j["boundary"] = {{"energy", c.boundary.energy},
                   {"start", c.boundary.start},
                   {"plus", {{"value", c.boundary.plus.value}, {"derivative", c.boundary.plus.derivative}}},
                   {"minus", {{"value", c.boundary.minus.value}, {"derivative", c.boundary.minus.derivative}}},
                   {"r0", c.boundary.r0},
                   {"samples", c.boundary.samples},
                   {"extension", c.boundary.extension},
                   {"tolerance", c.boundary.tolerance}};
  j["tube"] = {{"epsilon", c.tube.epsilon},
               {"shift", {c.tube.shift_re, c.tube.shift_im}},
               {"form", c.tube.form},
               {"theta", c.tube.theta}};
  j["qeps"] = {{"scenario", to_string(c.qeps.scenario)}, {"p", c.qeps.p}, {"amplitude", c.qeps.amplitude}};
  j["gamma"] = {{"profile", c.gamma.profile}, {"grid_check", c.gamma.grid_check}};
  j["klaus"] = {{"threshold", c.klaus.threshold}, {"samples", c.klaus.samples}};
  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
  return j;
}

std::string serialize(const ExperimentConfig& cfg) { return to_json(cfg).dump(2); }

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    fail("hash-failed", "SHA-256 computation failed");
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

std::string experiment_id(const ExperimentConfig& cfg) {
  json j = to_json(cfg);
  // where results are written does not change what is computed
  j.erase("output");
  return sha256_hex(j.dump());
}

}  // namespace tubelab
