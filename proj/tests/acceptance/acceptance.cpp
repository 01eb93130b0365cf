// Acceptance checks: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "tubelab/config.hpp"
#include "tubelab/geometry.hpp"
#include "tubelab/lab.hpp"
#include "tubelab/line.hpp"
#include "tubelab/qeps.hpp"
#include "tubelab/run.hpp"
#include "tubelab/tube.hpp"

using namespace tubelab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...) {
  std::printf("    ");
  va_list ap;
  va_start(ap, fmt);
  std::vprintf(fmt, ap);
  va_end(ap);
  std::printf("\n");
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// J0 by its power series, first zero by bisection.
double bessel_j0(double x) {
  double term = 1, sum = 1;
  for (int k = 1; k < 60; ++k) {
    term *= -(x * x / 4) / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

double first_j0_zero() {
  double lo = 2, hi = 3;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bessel_j0(lo) * bessel_j0(mid) <= 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Richardson extrapolation with the order estimated from three refinements by 2.
double richardson(double coarse, double mid, double fine) {
  const double p = std::log2((coarse - mid) / (mid - fine));
  return fine + (fine - mid) / (std::pow(2.0, p) - 1);
}

bool criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> l0, l1;
  for (int res : {32, 64, 128}) {
    const SectionSolution s = solve_section(CrossSectionSpec::rectangle(1, 1, res));
    l0.push_back(s.modes.lambda0);
    l1.push_back(s.modes.lambda1);
  }
  const double r0 = richardson(l0[0], l0[1], l0[2]), r1 = richardson(l1[0], l1[1], l1[2]);
  const double e0 = std::abs(r0 / (2 * kPi * kPi) - 1), e1 = std::abs(r1 / (5 * kPi * kPi) - 1);
  note("square lambda0: %.8f %.8f %.8f -> %.8f (2 pi^2 = %.8f, rel err %.2e)", l0[0], l0[1], l0[2], r0,
       2 * kPi * kPi, e0);
  note("square lambda1: %.8f %.8f %.8f -> %.8f (5 pi^2 = %.8f, rel err %.2e)", l1[0], l1[1], l1[2], r1,
       5 * kPi * kPi, e1);
  const double j = first_j0_zero();
  const SectionSolution d = solve_section(CrossSectionSpec::disk(1, 64));
  const double ed = std::abs(d.modes.lambda0 / (j * j) - 1);
  note("disk lambda0 at 128 nodes per diameter: %.8f (j0^2 = %.8f, rel err %.2e)", d.modes.lambda0, j * j, ed);
  const double secs = elapsed(t0);
  note("runtime %.2f s (limit 30 s)", secs);
  return e0 <= 5e-3 && e1 <= 1e-2 && ed <= 5e-3 && secs < 30;
}

bool criterion2() {
  const SectionSolution d = solve_section(CrossSectionSpec::disk(1, 64));
  note("C(disk) at 128 nodes per diameter: %.3e (limit 1e-6)", d.modes.C_S);
  std::vector<double> cs;
  for (int res : {32, 64, 128}) cs.push_back(solve_section(CrossSectionSpec::rectangle(1, 1, res)).modes.C_S);
  const double change = std::abs(cs[2] / cs[1] - 1);
  note("C(square) at 32/64/128: %.6f %.6f %.6f, last refinement changes it by %.2f%%", cs[0], cs[1], cs[2],
       100 * change);
  std::vector<double> hs, res_orth;
  for (int res : {16, 32, 64, 128}) {
    CrossSectionSpec e = CrossSectionSpec::ellipse(1, 0.5, res);
    e.center = Eigen::Vector2d(0.13, 0.07);
    const SectionSolution s = solve_section(e);
    hs.push_back(1.0 / res);
    res_orth.push_back(s.modes.orthogonality_residual);
  }
  const RateFit f = fit_rate(hs, res_orth);
  note("orthogonality residual, off-centre ellipse h=1/16..1/128: %.2e %.2e %.2e %.2e, fitted order %.2f", res_orth[0],
       res_orth[1], res_orth[2], res_orth[3], f.slope);
  return d.modes.C_S < 1e-6 && cs[2] > 0 && change <= 0.01 && f.slope >= 1 && strictly_decreasing(res_orth);
}

// Shooting oracle for -phi'' - kappa/x phi = E phi on (0, X), phi(0) = 0.
double shoot_end(double kappa, double e, double X) {
  double x = 1e-6, y = x - kappa * x * x / 2, dy = 1 - kappa * x;
  auto f = [&](double xx, double yy) { return -(kappa / xx + e) * yy; };
  while (x < X) {
    const double h = std::min(0.005, std::max(x * 0.05, 1e-7));
    const double k1y = dy, k1d = f(x, y);
    const double k2y = dy + h / 2 * k1d, k2d = f(x + h / 2, y + h / 2 * k1y);
    const double k3y = dy + h / 2 * k2d, k3d = f(x + h / 2, y + h / 2 * k2y);
    const double k4y = dy + h * k3d, k4d = f(x + h, y + h * k3y);
    y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
    dy += h / 6 * (k1d + 2 * k2d + 2 * k3d + k4d);
    x += h;
  }
  return y;
}

std::vector<double> shooting_levels(double kappa, int count) {
  const double X = 120;
  std::vector<double> out;
  double prev_e = -0.4, prev = shoot_end(kappa, prev_e, X);
  for (int k = 1; k <= 400 && static_cast<int>(out.size()) < count; ++k) {
    const double e = -0.4 + 0.39 * k / 400.0;
    const double cur = shoot_end(kappa, e, X);
    if (prev * cur < 0) {
      double lo = prev_e, hi = e, flo = prev;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi), fm = shoot_end(kappa, mid, X);
        if (flo * fm <= 0) hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
    prev = cur;
    prev_e = e;
  }
  return out;
}

bool criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid1D g = make_grid(200, 0.01);
  const Operator1D hd = assemble_HD(1.0, g, TwistProfile::none(), 0.0);
  const std::vector<double> ev = hd.eigenvalues(6);
  const std::vector<double> oracle = shooting_levels(1.0, 3);
  bool ok = oracle.size() == 3;
  for (int n = 0; n < 3 && ok; ++n) {
    const double err = std::max(std::abs(ev[2 * n] - oracle[n]), std::abs(ev[2 * n + 1] - oracle[n]));
    const double split = std::abs(ev[2 * n] - ev[2 * n + 1]);
    note("n=%d: %.9f %.9f  shooting %.9f  -1/(4n^2) %.9f  err %.2e  pair split %.1e", n + 1, ev[2 * n],
         ev[2 * n + 1], oracle[n], -0.25 / ((n + 1) * (n + 1)), err, split);
    ok = ok && err <= 1e-3 && split <= 1e-12;
  }
  const double secs = elapsed(t0);
  note("runtime %.2f s (limit 60 s)", secs);
  return ok && secs < 60;
}

bool criterion4() {
  const RadialGrid rg = build_radial_grid(1.0, 256);
  const TransverseBasis b = radial_basis(rg);
  const KlausReport k = klaus_check(1.0, 0.3, {1e-2, 1e-3, 1e-4}, make_density(b), 1.0, -5.0, 50);
  for (const auto& r : k.rungs)
    note("eps=%.0e: envelope %s worst excess %.2e; int V = %.6f (oracle %.6f); L1 %.6f vs refined %.6f", r.epsilon,
         r.envelope_ok ? "ok" : "VIOLATED", r.envelope_worst, r.integral, r.oracle_integral, r.l1_norm, r.l1_refined);
  note("ground energy strictly decreasing and below -5: %s, max gap deviation from oracle %.2f%% (limit 20%%)",
       k.condition_iv ? "yes" : "no", 100 * k.max_gap_deviation);
  note("pointwise limit ratio = %.17g", k.ratio_v);
  return k.condition_i && k.condition_iv && k.ratio_v == 1.0;
}

TubeOperatorSpec disk_tube(double L, double hx, int cells) {
  TubeOperatorSpec s;
  s.kappa = 1;
  s.delta = 0.3;
  s.shift_c = 2;
  s.cross_section = CrossSectionSpec::disk(1, 32);
  s.mode = TubeMode::axisymmetric;
  s.x_length = L;
  s.x_spacing = hx;
  s.radial_cells = cells;
  return s;
}

const std::vector<double> kLadder{0.2, 0.1, 0.05, 0.025};

bool criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const TubeOperatorSpec spec = disk_tube(40, 0.05, 16);
  const TubeGrid grid = build_tube_grid(spec);
  const EpsilonLadder ladder{kLadder, 0.3, 1.0, 2.0};
  LabOptions opt;
  opt.jobs = 4;
  bool ok = true;
  for (Pairing p : {Pairing::P1, Pairing::P2}) {
    const ConvergenceReport r = norm_resolvent_sweep(ladder, spec, grid, p, opt);
    note("%s distances: %.4e %.4e %.4e %.4e  slope %.3f (needs >= %.2f)  monotone %s", to_string(p),
         r.rungs[0].distance, r.rungs[1].distance, r.rungs[2].distance, r.rungs[3].distance,
         r.fit ? r.fit->slope : NAN, *r.theoretical_slope - 0.3, r.monotone ? "yes" : "no");
    note("%s m>=1 sector bound eps^2/(lambda1-lambda0) at smallest eps: %.2e", to_string(p),
         r.rungs.back().sector_bound.value_or(NAN));
    ok = ok && r.pass;
  }
  const double secs = elapsed(t0);
  note("runtime %.1f s (limit 600 s)", secs);
  return ok && secs <= 600;
}

SpectrumReport disk_spectrum() {
  const TubeOperatorSpec spec = disk_tube(40, 0.05, 16);
  const TubeGrid grid = build_tube_grid(spec);
  const Operator1D limit = limit_operator(1.0, grid.x, spec.twist, grid.transverse.C_S);
  LabOptions opt;
  opt.jobs = 4;
  return spectrum_convergence({kLadder, 0.3, 1.0, 2.0}, spec, grid, limit, opt);
}

// Literal reading: the lowest eigenvalue of the shifted A.
bool criterion6() {
  const SpectrumReport r = disk_spectrum();
  std::vector<double> err;
  for (const auto& g : r.rungs) {
    note("eps=%.3f lowest eigenvalue %.6f |error to -0.25| %.4f", g.epsilon, g.lowest, g.lowest_error);
    err.push_back(g.lowest_error);
  }
  note("errors strictly decreasing: %s", r.lowest_monotone ? "yes" : "no");
  return r.lowest_monotone;
}

// Branch converging to the Dirichlet ground state, plus the twist shift.
bool criterion6b() {
  const SpectrumReport r = disk_spectrum();
  for (const auto& g : r.rungs)
    note("eps=%.3f parity-odd lowest %.6f |error to -0.25| %.2e", g.epsilon, g.dirichlet_branch, g.branch_error);
  note("discrete limit ground energy %.8f; errors strictly decreasing: %s", r.limit_discrete,
       r.branch_monotone ? "yes" : "no");

  TubeOperatorSpec sq;
  sq.kappa = 1;
  sq.delta = 0.3;
  sq.shift_c = 2;
  sq.cross_section = CrossSectionSpec::rectangle(1, 1, 16);
  sq.mode = TubeMode::full_tensor;
  sq.x_length = 20;
  sq.x_spacing = 0.1;
  const TubeGrid grid = build_tube_grid(sq);
  const std::vector<double> ladder{0.2, 0.1, 0.05};
  LabOptions opt;
  opt.jobs = 3;
  const Operator1D flat_limit = limit_operator(1.0, grid.x, sq.twist, grid.transverse.C_S);
  const SpectrumReport flat = spectrum_convergence({ladder, 0.3, 1.0, 2.0}, sq, grid, flat_limit, opt);
  TubeOperatorSpec tw = sq;
  tw.twist = TwistProfile::constant(0.5);
  const Operator1D tw_limit = limit_operator(1.0, grid.x, tw.twist, grid.transverse.C_S);
  const SpectrumReport twisted = spectrum_convergence({ladder, 0.3, 1.0, 2.0}, tw, grid, tw_limit, opt);
  const double expected = 0.25 * grid.transverse.C_S;
  bool twist_ok = true;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const double shift = twisted.rungs[i].dirichlet_branch - flat.rungs[i].dirichlet_branch;
    note("square, eps=%.2f: branch %.6f -> %.6f with twist 0.5, shift %.6f vs 0.25*C(S) = %.6f (%.2f%%)", ladder[i],
         flat.rungs[i].dirichlet_branch, twisted.rungs[i].dirichlet_branch, shift, expected,
         100 * std::abs(shift / expected - 1));
    if (i + 1 == ladder.size()) twist_ok = std::abs(shift / expected - 1) <= 0.02;
  }
  note("C(S) of the 16-per-unit square mesh %.6f (refined meshes approach 0.1447)", grid.transverse.C_S);
  return r.branch_monotone && r.rungs.back().branch_error < r.rungs.front().branch_error && twist_ok;
}

bool criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  TubeOperatorSpec spec = disk_tube(20, 0.005, 16);
  spec.kappa = -1;
  spec.delta.reset();
  spec.shift_c.reset();
  const TubeGrid grid = build_tube_grid(spec);
  const Operator1D limit = limit_operator(-1.0, grid.x, spec.twist, grid.transverse.C_S);
  LabOptions opt;
  opt.jobs = 4;
  const ConvergenceReport r =
      strong_resolvent_sweep({kLadder, 0.3, -1.0, 0.0}, spec, grid, standard_test_vectors(grid), limit, -1.0, opt);
  bool ok = true;
  double perp_slope = 0;
  for (std::size_t k = 0; k < r.vector_names.size(); ++k) {
    note("%-14s d = %.4e %.4e %.4e %.4e  monotone %s  slope %.3f", r.vector_names[k].c_str(), r.rungs[0].per_vector[k],
         r.rungs[1].per_vector[k], r.rungs[2].per_vector[k], r.rungs[3].per_vector[k],
         r.vector_monotone[k] ? "yes" : "no", r.vector_fits[k].slope);
    ok = ok && r.vector_monotone[k];
    if (r.vector_names[k] == "L_perp") perp_slope = r.vector_fits[k].slope;
  }
  note("L_perp slope %.3f (needs >= 1.7); runtime %.1f s", perp_slope, elapsed(t0));
  return ok && perp_slope >= 1.7;
}

bool criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const QepsReport q1 = qeps_sweep(QepsScenario::bounded_profile, 1.0, kLadder, 0.3, {0.9, 1.0});
  for (const auto& e : q1.entries) note("Q1 eps=%.3f Q=%.6e bound %.6e", e.epsilon, e.value, *e.bound);
  note("Q1 bound holds at every rung: %s, decreasing: %s", q1.bound_ok ? "yes" : "no", q1.monotone ? "yes" : "no");
  const QepsReport q2 = qeps_sweep(QepsScenario::flat_profile, 1.0, kLadder, 0.3, {0.9, 1.0});
  for (const auto& e : q2.entries) note("Q2 eps=%.3f Q=%.6e", e.epsilon, e.value);
  note("Q2 increasing: %s, fitted slope %.3f (target -1.4 +- 0.2)", q2.monotone ? "yes" : "no", q2.fit->slope);
  const double secs = elapsed(t0);
  note("runtime %.2f s (limit 60 s)", secs);
  return q1.pass && q2.pass && secs < 60;
}

bool hardy_property() {
  const Grid1D g = make_grid(20, 0.01);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(-1, 1), width(0.5, 2.0);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    double a[4];
    for (double& c : a) c = coef(rng);
    const double b = width(rng);
    Vec w(g.size());
    for (int i = 0; i < g.size(); ++i) {
      const double x = g.node(i);
      w[i] = (a[0] * x + a[1] * x * x + a[2] * x * x * x + a[3] * std::abs(x)) * std::exp(-b * x * x);
    }
    worst = std::max(worst, hardy_check(w, g));
  }
  note("Hardy ratio, worst of 50 random w: %.6f (limit 1.01)", worst);
  return worst <= 1.01;
}

bool positivity_property() {
  const TubeOperatorSpec spec = disk_tube(40, 0.05, 16);
  const TubeGrid grid = build_tube_grid(spec);
  const Vec wts = grid.weights();
  double worst = INFINITY;
  for (double eps : kLadder) {
    TubeOperatorSpec s = spec;
    s.epsilon = eps;
    const SparseOperator adot = assemble_a_forms(s, grid).second;
    const double floor = (2.0 - 1.0) / std::pow(eps, 0.3);
    for (int t = 0; t < 100; ++t) {
      const Vec psi = random_vector(grid.size(), 1000 + t);
      worst = std::min(worst, adot.form(psi) / psi.cwiseAbs2().dot(wts) / floor);
    }
  }
  note("form positivity: min a-dot(psi) / ((c-kappa) eps^-delta |psi|^2) over 400 samples = %.4f (needs >= 1)", worst);
  return worst >= 1;
}

bool cross_term_property() {
  const TubeOperatorSpec spec = disk_tube(40, 0.05, 16);
  const TubeGrid grid = build_tube_grid(spec);
  std::vector<double> maxima;
  for (double eps : {0.2, 0.1, 0.05}) {
    TubeOperatorSpec s = spec;
    s.epsilon = eps;
    double worst = 0;
    for (int t = 0; t < 10; ++t) {
      const Vec w = random_vector(grid.x.size(), 500 + t);
      const Vec eta = project_onto_L(random_vector(grid.size(), 600 + t), grid).eta;
      worst = std::max(worst, cross_term_check(w, eta, s, grid).bound_ratio);
    }
    maxima.push_back(worst);
    note("cross term eps=%.2f: max bound_ratio over 10 random (w, eta) pairs %.4e", eps, worst);
  }
  const double hi = *std::max_element(maxima.begin(), maxima.end());
  const double lo = *std::min_element(maxima.begin(), maxima.end());
  note("max bound_ratio varies by %.1f%% across eps (max/min - 1, limit 50%%)", 100 * (hi / lo - 1));
  return hi / lo - 1 < 0.5;
}

bool pythagoras_property() {
  const TubeOperatorSpec spec = disk_tube(40, 0.05, 16);
  const TubeGrid grid = build_tube_grid(spec);
  const Vec wts = grid.weights();
  const Vec wx = Vec::Constant(grid.x.size(), grid.x.spacing);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const Vec psi = random_vector(grid.size(), 77 + t);
    const Projection p = project_onto_L(psi, grid);
    const double total = psi.cwiseAbs2().dot(wts);
    const double parts = p.w.cwiseAbs2().dot(wx) + p.eta.cwiseAbs2().dot(wts);
    worst = std::max(worst, std::abs(total - parts) / total);
  }
  note("projection Pythagoras, worst relative defect over 20 vectors: %.2e (limit 1e-10)", worst);
  return worst <= 1e-10;
}

bool gamma_property() {
  const TransverseBasis b = radial_basis(build_radial_grid(1.0, 64));
  const GammaReport g = gamma_trial_check(trial_function("x_gauss"), {0.1, 0.01, 1e-3}, -1.0, b, TwistProfile::none());
  note("Gamma trial b^eps(w u0): %.8f %.8f %.8f, limit %.8f, rel err at 1e-3 %.2e, monotone %s, liminf %s",
       g.values[0], g.values[1], g.values[2], g.limit, g.relative_error, g.monotone ? "yes" : "no",
       g.liminf_ok ? "ok" : "violated");
  return g.pass;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool determinism_property() {
  ExperimentConfig cfg = default_config("converge");
  cfg.theorem = "P1";
  cfg.grid.x_length = 10;
  cfg.grid.x_spacing = 0.05;
  cfg.grid.radial_cells = 8;
  const fs::path root = fs::temp_directory_path() / ("tubelab_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const RunManifest a = run_experiment(cfg, {(root / "a").string(), 1});
  const RunManifest b = run_experiment(cfg, {(root / "b").string(), 4});
  bool same = a.experiment_id == b.experiment_id;
  int compared = 0;
  for (const auto& art : a.artifacts) {
    const fs::path pa = fs::path(a.directory) / art.path, pb = fs::path(b.directory) / art.path;
    if (art.path.ends_with(".json")) {
      same = same && strip_timing(nlohmann::json::parse(slurp(pa))) == strip_timing(nlohmann::json::parse(slurp(pb)));
    } else {
      same = same && slurp(pa) == slurp(pb);
    }
    ++compared;
  }
  note("determinism: %d artifacts compared between 1-job and 4-job runs of %s: %s", compared,
       a.experiment_id.substr(0, 12).c_str(), same ? "identical" : "DIFFERENT");
  fs::remove_all(root);
  return same;
}

bool criterion9() {
  bool ok = true;
  for (auto* f : {hardy_property, positivity_property, cross_term_property, pythagoras_property, gamma_property,
                  determinism_property}) {
    const bool r = f();
    ok = ok && r;
  }
  return ok;
}

const std::vector<std::pair<std::string, std::pair<const char*, std::function<bool()>>>> kCriteria{
    {"1", {"transverse modes vs 2pi^2, 5pi^2, j0^2", criterion1}},
    {"2", {"geometric constant C(S) and orthogonality order", criterion2}},
    {"3", {"1D Dirichlet hydrogen levels and pair degeneracy", criterion3}},
    {"4", {"Klaus envelope, diving ground energy, pointwise limit", criterion4}},
    {"5", {"norm-resolvent rates P1/P2", criterion5}},
    {"6", {"lowest eigenvalue of shifted A approaches -1/4", criterion6}},
    {"6b", {"Dirichlet branch approaches -1/4; twist shift 0.25 C(S)", criterion6b}},
    {"7", {"repulsive strong convergence", criterion7}},
    {"8", {"Q^eps scenarios", criterion8}},
    {"9", {"property suites", criterion9}},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) wanted.push_back(argv[++i]);
    else {
      std::fprintf(stderr, "usage: acceptance [--criterion ID]...\n");
      return 2;
    }
  }
  int failed = 0;
  for (const auto& [id, c] : kCriteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
    std::printf("criterion %s: %s\n", id.c_str(), c.first);
    std::fflush(stdout);
    bool ok = false;
    try {
      ok = c.second();
    } catch (const std::exception& e) {
      note("error: %s", e.what());
    }
    std::printf("%s criterion %s\n", ok ? "PASS" : "FAIL", id.c_str());
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
