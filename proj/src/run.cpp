#include "tubelab/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

#include "tubelab/extensions.hpp"
#include "tubelab/lab.hpp"
#include "tubelab/plots.hpp"
#include "tubelab/resolvent.hpp"

namespace tubelab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using clock_type = std::chrono::steady_clock;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json cplx_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json fit_json(const std::optional<RateFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope}, {"intercept", f->intercept}, {"residual", f->residual}};
}

/// Everything a pipeline produces, held in memory until the single writer commits it.
struct Outcome {
  bool pass = true;
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
  void add_json(std::string name, const json& j) { add(std::move(name), j.dump(2) + "\n"); }
};

bool wants(const ExperimentConfig& cfg, const std::string& format) {
  return std::find(cfg.output.formats.begin(), cfg.output.formats.end(), format) != cfg.output.formats.end();
}

json base_report(const ExperimentConfig& cfg, const std::string& id) {
  return {{"schema_version", kSchemaVersion},
          {"experiment_id", id},
          {"experiment", cfg.experiment},
          {"theorem_tag", cfg.tag()},
          {"ladder", cfg.ladder},
          {"delta", cfg.delta()},
          {"kappa", cfg.physics.kappa}};
}

void add_report(Outcome& out, const ExperimentConfig& cfg, json report, const std::string& csv) {
  report["csv"] = "report.csv";
  if (wants(cfg, "json")) out.add_json("report.json", report);
  if (wants(cfg, "csv")) out.add("report.csv", csv);
  if (wants(cfg, "json") && wants(cfg, "csv") && report.contains("distances"))
    out.add("plot_" + report["theorem_tag"].get<std::string>() + ".py", plot_script(report, "report.csv"));
}

// --- transverse section --------------------------------------------------------

struct SectionRecord {
  TransverseBasis basis;
  json record;
  std::string nodal_csv;
};

SectionRecord section_record(const ExperimentConfig& cfg, bool force_cartesian = false) {
  SectionRecord s;
  if (!force_cartesian && cfg.grid.mode == TubeMode::axisymmetric && cfg.geometry.kind == ShapeKind::disk &&
      cfg.geometry.center.norm() == 0) {
    const RadialGrid g = build_radial_grid(cfg.geometry.radius, cfg.grid.radial_cells);
    const TransverseModes m = solve_radial_modes(g);
    s.basis = radial_basis(g);
    s.record = {{"lambda0", m.lambda0},         {"lambda1", m.lambda1},
                {"C_S", m.C_S},                 {"orthogonality_residual", m.orthogonality_residual},
                {"resolution", cfg.grid.radial_cells}, {"basis", "radial"}};
    std::ostringstream os;
    os << "r,u0\n";
    for (Eigen::Index j = 0; j < g.r.size(); ++j) os << num(g.r[j]) << ',' << num(m.u0[j]) << '\n';
    s.nodal_csv = os.str();
    return s;
  }
  const SectionSolution sol = solve_section(cfg.geometry);
  s.basis = cartesian_basis(sol.mesh, sol.modes);
  s.record = {{"lambda0", sol.modes.lambda0},
              {"lambda1", sol.modes.lambda1},
              {"C_S", sol.modes.C_S},
              {"orthogonality_residual", sol.modes.orthogonality_residual},
              {"resolution", sol.modes.resolution},
              {"basis", "cartesian"}};
  std::ostringstream os;
  os << "y1,y2,u0\n";
  for (Eigen::Index k = 0; k < sol.mesh.size(); ++k)
    os << num(sol.mesh.y1[k]) << ',' << num(sol.mesh.y2[k]) << ',' << num(sol.modes.u0[k]) << '\n';
  s.nodal_csv = os.str();
  return s;
}

LabOptions lab_options(const ExperimentConfig& cfg, int jobs) {
  LabOptions o;
  o.seed = cfg.solver.seed;
  o.jobs = jobs;
  o.power_iterations = cfg.solver.power_iterations;
  o.power_tolerance = cfg.solver.power_tolerance;
  o.rtol = cfg.solver.rtol;
  return o;
}

// --- pipelines -------------------------------------------------------------------

Outcome run_modes(const ExperimentConfig& cfg, const std::string&) {
  Outcome out;
  const SectionRecord s = section_record(cfg, true);
  out.add_json("modes.json", s.record);
  if (wants(cfg, "nodal")) out.add("modes_nodal.csv", s.nodal_csv);
  return out;
}

Outcome run_spectrum_1d(const ExperimentConfig& cfg, const std::string& id) {
  Outcome out;
  double C_S = 0;
  if (!cfg.physics.twist.is_zero()) C_S = solve_section(cfg.geometry).modes.C_S;
  const Grid1D grid = make_grid(cfg.spectrum.length, cfg.spectrum.spacing);
  const Operator1D op = assemble_HD(cfg.physics.kappa, grid, cfg.physics.twist, C_S);
  const std::vector<double> ev = op.eigenvalues(2 * cfg.spectrum.levels);
  const double k = cfg.physics.kappa;
  const double twist_shift =
      cfg.physics.twist.family == TwistFamily::constant_rate ? cfg.physics.twist.rate * cfg.physics.twist.rate * C_S : 0;
  const bool has_reference = k > 0 && cfg.physics.twist.family != TwistFamily::compact_bump;
  std::ostringstream csv;
  csv << "n,eigenvalue,analytic_reference,abs_error\n";
  json rows = json::array();
  double worst = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const int n = static_cast<int>(i / 2) + 1;
    const double ref = has_reference ? -k * k / (4.0 * n * n) + twist_shift : std::numeric_limits<double>::quiet_NaN();
    const double err = std::abs(ev[i] - ref);
    if (has_reference) worst = std::max(worst, err);
    if (!has_reference && k <= 0 && ev[i] < 0) out.pass = false;
    csv << n << ',' << num(ev[i]) << ',' << num(ref) << ',' << num(err) << '\n';
    rows.push_back({{"n", n}, {"eigenvalue", ev[i]}, {"analytic_reference", ref}, {"abs_error", err}});
  }
  if (has_reference) out.pass = worst <= 1e-3;
  json rep = base_report(cfg, id);
  rep["theorem_tag"] = "spectrum-1d";
  rep["levels"] = rows;
  rep["max_abs_error"] = worst;
  rep["tolerance"] = 1e-3;
  rep["pass"] = out.pass;
  add_report(out, cfg, rep, csv.str());
  return out;
}

Outcome run_boundary(const ExperimentConfig& cfg, const std::string& id) {
  Outcome out;
  const auto& b = cfg.boundary;
  BoundaryOptions opt;
  opt.r0 = b.r0;
  opt.samples = b.samples;
  const SideSamples plus = shoot_to_origin(cfg.physics.kappa, b.energy, b.start, b.plus.value, b.plus.derivative,
                                           sample_points(+1, opt));
  const SideSamples minus = shoot_to_origin(cfg.physics.kappa, b.energy, -b.start, b.minus.value,
                                            b.minus.derivative, sample_points(-1, opt));
  const BoundaryData data = boundary_data(plus, minus, cfg.physics.kappa, opt);
  const ExtensionMatrix ext = ExtensionMatrix::from_angles(b.extension[0], b.extension[1], b.extension[2], b.extension[3]);
  json rep = base_report(cfg, id);
  rep["theorem_tag"] = "boundary-data";
  auto entry = [](cplx v, bool div) -> json { return div ? json(nullptr) : cplx_json(v); };
  rep["phi_plus"] = entry(data.phi_plus, data.divergent[0]);
  rep["phi_minus"] = entry(data.phi_minus, data.divergent[1]);
  rep["phitilde_plus"] = entry(data.phitilde_plus, data.divergent[2]);
  rep["phitilde_minus"] = entry(data.phitilde_minus, data.divergent[3]);
  rep["flags"] = {{"divergent", data.divergent}};
  std::ostringstream csv;
  csv << "quantity,re,im,divergent\n";
  const char* names[4] = {"phi_plus", "phi_minus", "phitilde_plus", "phitilde_minus"};
  const cplx vals[4] = {data.phi_plus, data.phi_minus, data.phitilde_plus, data.phitilde_minus};
  for (int i = 0; i < 4; ++i)
    csv << names[i] << ',' << num(vals[i].real()) << ',' << num(vals[i].imag()) << ',' << data.divergent[i] << '\n';
  if (data.any_divergent()) {
    rep["extension_residual"] = nullptr;
    out.pass = false;
  } else {
    const MembershipResult m = check_extension_membership(data, ext, b.tolerance);
    rep["extension_residual"] = m.residual;
    rep["member"] = m.member;
    out.pass = m.member;
  }
  rep["pass"] = out.pass;
  add_report(out, cfg, rep, csv.str());
  return out;
}

Outcome run_tube_solve(const ExperimentConfig& cfg, const std::string& id) {
  Outcome out;
  TubeOperatorSpec spec = cfg.tube_spec();
  spec.epsilon = cfg.tube.epsilon;
  const TubeGrid grid = build_tube_grid(spec);
  SparseOperator op;
  if (cfg.tube.form == "b") {
    spec.delta.reset();
    spec.shift_c.reset();
    op = assemble_b_form(spec, grid);
  } else {
    auto forms = assemble_a_forms(spec, grid);
    op = cfg.tube.form == "a" ? forms.first : forms.second;
  }
  Vec psi;
  for (auto& t : standard_test_vectors(grid))
    if (t.name == cfg.tube.theta) psi = t.psi;
  const VecC theta = op.to_scaled(psi).cast<std::complex<double>>();
  const std::complex<double> z(cfg.tube.shift_re, cfg.tube.shift_im);
  const ResolventSolve s = apply_resolvent(op, z, theta, {cfg.solver.rtol, 200});
  json rep = base_report(cfg, id);
  rep["theorem_tag"] = "tube-solve";
  rep["epsilon"] = spec.epsilon;
  rep["shift"] = cplx_json(z);
  rep["iterations"] = s.iterations;
  rep["residual"] = s.residual;
  rep["norms"] = {{"theta", theta.norm()}, {"solution", s.psi.norm()}};
  rep["unknowns"] = grid.size();
  out.pass = s.residual <= cfg.solver.rtol;
  rep["pass"] = out.pass;
  std::ostringstream csv;
  csv << "iteration,relative_residual\n";
  for (std::size_t i = 0; i < s.history.size(); ++i) csv << i << ',' << num(s.history[i]) << '\n';
  add_report(out, cfg, rep, csv.str());
  if (wants(cfg, "nodal")) {
    const Vec w = grid.weights().cwiseSqrt();
    std::ostringstream nodal;
    nodal << "x,node,psi_re,psi_im\n";
    const Eigen::Index ny = grid.transverse.size();
    for (int i = 0; i < grid.x.size(); ++i)
      for (Eigen::Index k = 0; k < ny; ++k) {
        const Eigen::Index n = grid.index(i, static_cast<int>(k));
        nodal << num(grid.x.node(i)) << ',' << k << ',' << num(s.psi[n].real() / w[n]) << ','
              << num(s.psi[n].imag() / w[n]) << '\n';
      }
    out.add("solution_nodal.csv", nodal.str());
  }
  return out;
}

std::complex<double> pairing_shift(const std::string& tag, double eps, const ExperimentConfig& cfg) {
  if (tag == "P1") return 0;
  if (tag == "P2") return {cfg.shift_c() / std::pow(eps, cfg.delta()), 1.0};
  if (tag == "T1") return {0, 1.0};
  return -1.0;
}

Outcome run_converge(const ExperimentConfig& cfg, const std::string& id, int jobs) {
  Outcome out;
  const TubeOperatorSpec spec = cfg.tube_spec();
  const TubeGrid grid = build_tube_grid(spec);
  const SectionRecord sec = section_record(cfg);
  json modes = sec.record;
  modes["unknowns"] = grid.size();
  out.add_json("modes.json", modes);
  if (wants(cfg, "nodal")) out.add("modes_nodal.csv", sec.nodal_csv);

  const std::string tag = *cfg.theorem;
  const EpsilonLadder ladder{cfg.ladder, cfg.delta(), cfg.physics.kappa, cfg.shift_c()};
  const LabOptions opt = lab_options(cfg, jobs);
  ConvergenceReport rep;
  if (tag == "T2") {
    const Operator1D limit = limit_operator(cfg.physics.kappa, grid.x, spec.twist, grid.transverse.C_S);
    rep = strong_resolvent_sweep(ladder, spec, grid, standard_test_vectors(grid), limit, -1.0, opt);
  } else {
    const Pairing p = tag == "P1" ? Pairing::P1 : tag == "P2" ? Pairing::P2 : Pairing::T1;
    rep = norm_resolvent_sweep(ladder, spec, grid, p, opt);
  }
  out.pass = rep.pass;

  json j = base_report(cfg, id);
  json distances = json::array(), rungs = json::array();
  std::ostringstream csv;
  csv << "epsilon,distance,iterations";
  for (const auto& n : rep.vector_names) csv << ",d_" << n;
  csv << ",sector_bound\n";
  double runtime = 0;
  for (std::size_t i = 0; i < rep.rungs.size(); ++i) {
    const RungResult& r = rep.rungs[i];
    distances.push_back(r.distance);
    runtime += r.seconds;
    json rj = {{"schema_version", kSchemaVersion},
               {"experiment_id", id},
               {"rung", i},
               {"epsilon", r.epsilon},
               {"shift", cplx_json(pairing_shift(tag, r.epsilon, cfg))},
               {"iterations", r.iterations},
               {"residual_bound", cfg.solver.rtol},
               {"norms", {{"distance", r.distance}, {"per_vector", r.per_vector}}},
               {"rayleigh_history", r.history},
               {"sector_bound", r.sector_bound ? json(*r.sector_bound) : json(nullptr)},
               {"runtime_seconds", r.seconds}};
    rungs.push_back({{"epsilon", r.epsilon}, {"distance", r.distance}, {"per_vector", r.per_vector}});
    char name[32];
    std::snprintf(name, sizeof name, "rung_%02zu.json", i);
    out.add_json(name, rj);
    csv << num(r.epsilon) << ',' << num(r.distance) << ',' << r.iterations;
    for (double v : r.per_vector) csv << ',' << num(v);
    csv << ',' << (r.sector_bound ? num(*r.sector_bound) : "nan") << '\n';
  }
  j["distances"] = distances;
  j["rungs"] = rungs;
  j["fit"] = fit_json(rep.fit);
  j["theoretical_slope"] = rep.theoretical_slope ? json(*rep.theoretical_slope) : json(nullptr);
  j["monotone"] = rep.monotone;
  if (!rep.vector_names.empty()) {
    json vec = json::array();
    for (std::size_t k = 0; k < rep.vector_names.size(); ++k)
      vec.push_back({{"name", rep.vector_names[k]},
                     {"fit", fit_json(rep.vector_fits[k])},
                     {"monotone", static_cast<bool>(rep.vector_monotone[k])}});
    j["vectors"] = vec;
  }
  j["note"] = rep.note;
  j["pass"] = rep.pass;
  j["runtime_seconds"] = runtime;
  add_report(out, cfg, j, csv.str());
  return out;
}

Outcome run_klaus(const ExperimentConfig& cfg, const std::string& id) {
  Outcome out;
  const SectionRecord sec = section_record(cfg);
  const KlausReport k = klaus_check(cfg.physics.kappa, cfg.delta(), cfg.ladder, make_density(sec.basis),
                                    cfg.geometry.bounding_radius_sq(), cfg.klaus.threshold, cfg.klaus.samples);
  out.pass = k.pass;
  json j = base_report(cfg, id);
  json distances = json::array(), rungs = json::array();
  std::ostringstream csv;
  csv << "epsilon,integral,oracle_integral,envelope_ok,envelope_worst,l1_norm,l1_refined,pointwise_residual\n";
  for (const auto& r : k.rungs) {
    distances.push_back(r.integral);
    rungs.push_back({{"epsilon", r.epsilon},
                     {"envelope_ok", r.envelope_ok},
                     {"envelope_worst", r.envelope_worst},
                     {"l1_norm", r.l1_norm},
                     {"l1_refined", r.l1_refined},
                     {"pointwise_residual", r.pointwise_residual},
                     {"integral", r.integral},
                     {"oracle_integral", r.oracle_integral}});
    csv << num(r.epsilon) << ',' << num(r.integral) << ',' << num(r.oracle_integral) << ',' << r.envelope_ok << ','
        << num(r.envelope_worst) << ',' << num(r.l1_norm) << ',' << num(r.l1_refined) << ','
        << num(r.pointwise_residual) << '\n';
  }
  j["distances"] = distances;
  j["rungs"] = rungs;
  j["envelope"] = {{"g", k.g}, {"gamma", k.gamma}, {"beta", k.beta}};
  j["conditions"] = {{"i", k.condition_i}, {"ii", k.condition_ii}, {"iii", k.condition_iii},
                     {"iv", k.condition_iv}, {"v", k.condition_v}};
  j["threshold"] = k.threshold;
  j["max_gap_deviation"] = k.max_gap_deviation;
  j["ratio_v"] = k.ratio_v;
  j["fit"] = nullptr;
  j["pass"] = k.pass;
  add_report(out, cfg, j, csv.str());
  return out;
}

Outcome run_qeps(const ExperimentConfig& cfg, const std::string& id) {
  Outcome out;
  const QepsReport q =
      qeps_sweep(cfg.qeps.scenario, cfg.physics.kappa, cfg.ladder, cfg.delta(), {cfg.qeps.p, cfg.qeps.amplitude});
  out.pass = q.pass;
  json j = base_report(cfg, id);
  j["scenario"] = to_string(q.scenario);
  j["p"] = cfg.qeps.p;
  json distances = json::array(), bounds = json::array();
  std::ostringstream csv;
  csv << "epsilon,value,bound\n";
  for (const auto& e : q.entries) {
    distances.push_back(e.value);
    bounds.push_back(e.bound ? json(*e.bound) : json(nullptr));
    csv << num(e.epsilon) << ',' << num(e.value) << ',' << (e.bound ? num(*e.bound) : "nan") << '\n';
  }
  j["distances"] = distances;
  j["bounds"] = bounds;
  j["fit"] = fit_json(q.fit);
  j["theoretical_slope"] = q.theoretical_slope;
  j["bound_ok"] = q.bound_ok;
  j["monotone"] = q.monotone;
  j["pass"] = q.pass;
  add_report(out, cfg, j, csv.str());
  return out;
}

Outcome run_gamma(const ExperimentConfig& cfg, const std::string& id) {
  Outcome out;
  const SectionRecord sec = section_record(cfg);
  const TrialFunction w = trial_function(cfg.gamma.profile);
  const bool in_domain = w.w(0.0) == 0.0;
  const GammaReport g =
      in_domain ? gamma_trial_check(w, cfg.ladder, cfg.physics.kappa, sec.basis, cfg.physics.twist,
                                    cfg.gamma.grid_check, cfg.solver.seed)
                : gamma_divergence_check(w, cfg.ladder, cfg.physics.kappa, sec.basis, cfg.physics.twist);
  out.pass = in_domain ? g.pass : g.divergent;
  json j = base_report(cfg, id);
  j["profile"] = cfg.gamma.profile;
  j["in_limit_domain"] = in_domain;
  json distances = json::array();
  std::ostringstream csv;
  csv << "epsilon,value,grid_value,limit\n";
  for (std::size_t i = 0; i < g.epsilons.size(); ++i) {
    distances.push_back(in_domain ? std::abs(g.limit - g.values[i]) : g.values[i]);
    const double gv = i < g.grid_values.size() ? g.grid_values[i] : std::numeric_limits<double>::quiet_NaN();
    csv << num(g.epsilons[i]) << ',' << num(g.values[i]) << ',' << num(gv) << ',' << num(g.limit) << '\n';
  }
  j["distances"] = distances;
  j["values"] = g.values;
  j["grid_values"] = g.grid_values;
  j["limit"] = in_domain ? json(g.limit) : json(nullptr);
  j["monotone"] = g.monotone;
  j["relative_error"] = g.relative_error;
  j["liminf_ok"] = g.liminf_ok;
  j["divergent"] = g.divergent;
  j["fit"] = nullptr;
  j["pass"] = out.pass;
  add_report(out, cfg, j, csv.str());
  return out;
}

Outcome dispatch(const ExperimentConfig& cfg, const std::string& id, int jobs) {
  const std::string& e = cfg.experiment;
  if (e == "modes") return run_modes(cfg, id);
  if (e == "spectrum-1d") return run_spectrum_1d(cfg, id);
  if (e == "boundary-data") return run_boundary(cfg, id);
  if (e == "tube-solve") return run_tube_solve(cfg, id);
  if (e == "converge") return run_converge(cfg, id, jobs);
  if (e == "klaus") return run_klaus(cfg, id);
  if (e == "qeps") return run_qeps(cfg, id);
  if (e == "gamma") return run_gamma(cfg, id);
  fail("experiment-invalid", "unknown experiment '" + e + "'");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
  if (!f) fail("write-failed", "cannot write " + p.string());
}

}  // namespace

json RunManifest::to_json() const {
  json a = json::array();
  for (const auto& x : artifacts) a.push_back({{"path", x.path}, {"sha256", x.sha256}, {"bytes", x.bytes}});
  return {{"schema_version", kSchemaVersion},
          {"experiment_id", experiment_id},
          {"experiment", experiment},
          {"tag", tag},
          {"tool_version", tool_version},
          {"started", started},
          {"finished", finished},
          {"config", config},
          {"artifacts", a},
          {"pass", pass}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.experiment_id = j.at("experiment_id");
  m.experiment = j.at("experiment");
  m.tag = j.at("tag");
  m.tool_version = j.at("tool_version");
  m.started = j.at("started");
  m.finished = j.at("finished");
  m.config = j.at("config");
  m.pass = j.at("pass");
  for (const auto& a : j.at("artifacts")) m.artifacts.push_back({a.at("path"), a.at("sha256"), a.at("bytes")});
  return m;
}

RunManifest run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto violations = validate(cfg);
  if (!violations.empty()) throw ConfigError(violations);
  RunManifest m;
  m.experiment_id = experiment_id(cfg);
  m.experiment = cfg.experiment;
  m.tag = cfg.tag();
  m.config = to_json(cfg);
  const fs::path root = opt.out_root.empty() ? fs::path(cfg.output.directory) : fs::path(opt.out_root);
  const fs::path final_dir = root / m.experiment_id;
  if (fs::exists(final_dir)) fail("run-exists", final_dir.string() + " already exists; runs are immutable");

  m.started = utc_now();
  const Outcome out = dispatch(cfg, m.experiment_id, std::max(1, opt.jobs));
  m.finished = utc_now();
  m.pass = out.pass;

  fs::create_directories(root);
  const fs::path stage = root / ("." + m.experiment_id + ".partial-" + std::to_string(::getpid()));
  try {
    fs::remove_all(stage);
    fs::create_directory(stage);
    write_file(stage / "config.json", serialize(cfg) + "\n");
    m.artifacts.push_back({"config.json", sha256_hex(serialize(cfg) + "\n"), 0});
    for (const auto& [name, content] : out.files) {
      write_file(stage / name, content);
      m.artifacts.push_back({name, sha256_hex(content), 0});
    }
    for (auto& a : m.artifacts) a.bytes = fs::file_size(stage / a.path);
    write_file(stage / "manifest.json", m.to_json().dump(2) + "\n");
    std::error_code ec;
    fs::rename(stage, final_dir, ec);
    if (ec) {
      if (fs::exists(final_dir)) fail("run-exists", final_dir.string() + " already exists; runs are immutable");
      fail("write-failed", "cannot move run into place: " + ec.message());
    }
  } catch (...) {
    std::error_code ec;
    fs::remove_all(stage, ec);
    throw;
  }
  m.directory = final_dir.string();
  return m;
}

std::vector<std::string> verify_manifest(const std::string& run_dir) {
  std::vector<std::string> problems;
  const fs::path dir(run_dir);
  const fs::path mpath = dir / "manifest.json";
  if (!fs::exists(mpath)) fail("report-not-found", mpath.string() + " does not exist");
  RunManifest m;
  try {
    m = RunManifest::from_json(json::parse(read_file(mpath)));
  } catch (const json::exception& e) {
    fail("manifest-invalid", e.what());
  }
  for (const auto& a : m.artifacts) {
    const fs::path p = dir / a.path;
    if (!fs::exists(p)) {
      problems.push_back("missing: " + a.path);
      continue;
    }
    if (sha256_hex(read_file(p)) != a.sha256) problems.push_back("checksum-mismatch: " + a.path);
  }
  return problems;
}

json strip_timing(json report) {
  if (report.is_object()) {
    report.erase("runtime_seconds");
    for (auto& [k, v] : report.items()) v = strip_timing(v);
  } else if (report.is_array()) {
    for (auto& v : report) v = strip_timing(v);
  }
  return report;
}

}  // namespace tubelab
