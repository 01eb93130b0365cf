#include <cmath>
#include <random>

#include "doctest.h"
#include "tubelab/error.hpp"
#include "tubelab/lab.hpp"
#include "tubelab/resolvent.hpp"

using namespace tubelab;

namespace {

std::string error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

TubeOperatorSpec small_disk(double kappa) {
  TubeOperatorSpec s;
  s.kappa = kappa;
  s.cross_section = CrossSectionSpec::disk(1, 16);
  s.mode = TubeMode::axisymmetric;
  s.x_length = 10;
  s.x_spacing = 0.1;
  s.radial_cells = 8;
  if (kappa > 0) {
    s.delta = 0.3;
    s.shift_c = 2 * kappa;
  }
  return s;
}

}  // namespace

TEST_CASE("rate fits on exact power laws") {
  const std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
  std::vector<double> d;
  for (double e : eps) d.push_back(e * e);
  CHECK(fit_rate(eps, d).slope == doctest::Approx(2.0).epsilon(1e-12));
  d.clear();
  for (double e : eps) d.push_back(5 * std::pow(e, 1.15));
  const RateFit f = fit_rate(eps, d);
  CHECK(std::abs(f.slope - 1.15) < 1e-10);
  CHECK(f.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-10));
  CHECK(f.residual < 1e-10);
}

TEST_CASE("rate fit under 10% multiplicative noise") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> noise(0.9, 1.1);
  std::vector<double> eps, d;
  for (int k = 0; k < 12; ++k) {
    eps.push_back(0.5 * std::pow(0.5, k));
    d.push_back(std::pow(eps.back(), 1.7) * noise(rng));
  }
  CHECK(std::abs(fit_rate(eps, d).slope - 1.7) < 0.1);
}

TEST_CASE("rate fit rejects degenerate input") {
  CHECK(error_code([] { fit_rate({0.2, 0.1, 0.05}, {1, 0, 1}); }) == "degenerate-fit");
  CHECK(error_code([] { fit_rate({0.2, 0.1}, {1, 2}); }) == "degenerate-fit");
}

TEST_CASE("monotonicity helpers") {
  CHECK(strictly_decreasing({3, 2, 1}));
  CHECK_FALSE(strictly_decreasing({3, 3, 1}));
  CHECK(strictly_increasing({1, 2, 3}));
}

TEST_CASE("ladder validation") {
  CHECK(error_code([] { EpsilonLadder{{0.2, 0.1}, 0.3, 1, 2}.validate(); }) == "ladder-too-short");
  CHECK(error_code([] { EpsilonLadder{{0.2, 0.3, 0.1}, 0.3, 1, 2}.validate(); }) == "ladder-order");
  CHECK(error_code([] { EpsilonLadder{{2, 1, 0.5}, 0.3, 1, 2}.validate(); }) == "epsilon-range");
  CHECK_NOTHROW(EpsilonLadder{{0.2, 0.1, 0.05}, 0.3, 1, 2}.validate());
}

TEST_CASE("power iteration recovers the largest singular value") {
  Vec diag(50);
  for (int i = 0; i < 50; ++i) diag[i] = 1.0 + i * 0.01;
  diag[17] = 3.0;
  const LinearMap d = [&](const VecC& v) -> VecC { return diag.cast<std::complex<double>>().cwiseProduct(v); };
  const NormEstimate e = estimate_norm(d, d, 50, 1, 200, 1e-12);
  CHECK(e.value == doctest::Approx(3.0).epsilon(1e-6));
  // the same map in both slots gives zero
  const LinearMap zero = [&](const VecC& v) -> VecC { return d(v) - d(v); };
  CHECK(estimate_norm(zero, zero, 50, 1).value == 0);
}

TEST_CASE("power iteration that cannot settle is reported") {
  Vec diag(40);
  for (int i = 0; i < 40; ++i) diag[i] = 1.0 - i / 50.0;
  const LinearMap d = [&](const VecC& v) -> VecC { return diag.cast<std::complex<double>>().cwiseProduct(v); };
  CHECK(error_code([&] { estimate_norm(d, d, 40, 3, 2, 1e-12); }) == "norm-estimate-unreliable");
}

TEST_CASE("limit operator: kappa = 0 couples the half-lines") {
  const Grid1D g = make_grid(10, 0.1);
  const Operator1D free = limit_operator(0.0, g, TwistProfile::none(), 0.0);
  CHECK(free.off[g.half - 1] != 0);
  const Operator1D hd = limit_operator(1.0, g, TwistProfile::none(), 0.0);
  CHECK(hd.off[g.half - 1] == 0);
}

TEST_CASE("norm sweep distances are nonnegative and decrease") {
  const TubeOperatorSpec s = small_disk(1.0);
  const TubeGrid g = build_tube_grid(s);
  const ConvergenceReport r = norm_resolvent_sweep({{0.2, 0.1, 0.05}, 0.3, 1.0, 2.0}, s, g, Pairing::P1);
  for (const auto& rung : r.rungs) CHECK(rung.distance >= 0);
  CHECK(r.monotone);
  CHECK(r.fit);
  CHECK(r.theoretical_slope == doctest::Approx(1.15));
  CHECK(error_code([&] { norm_resolvent_sweep({{0.2, 0.1, 0.05}, 0.3, -1.0, 2.0}, s, g, Pairing::P1); }) ==
        "kappa-sign");
}

TEST_CASE("strong sweep: free tube with an L-sector vector is exact up to discretization") {
  const TubeOperatorSpec s = small_disk(0.0);
  const TubeGrid g = build_tube_grid(s);
  const Operator1D limit = limit_operator(0.0, g.x, s.twist, g.transverse.C_S);
  const auto thetas = standard_test_vectors(g);
  const ConvergenceReport r = strong_resolvent_sweep({{0.2, 0.1, 0.05}, 0.3, 0.0, 0.0}, s, g, {thetas[0]}, limit);
  for (const auto& rung : r.rungs) CHECK(rung.per_vector[0] < 1e-9);
}

TEST_CASE("strong sweep: the L-perp vector decays through the gap") {
  const TubeOperatorSpec s = small_disk(-1.0);
  const TubeGrid g = build_tube_grid(s);
  const Operator1D limit = limit_operator(-1.0, g.x, s.twist, g.transverse.C_S);
  const auto thetas = standard_test_vectors(g);
  const ConvergenceReport r = strong_resolvent_sweep({{0.2, 0.1, 0.05}, 0.3, -1.0, 0.0}, s, g, {thetas[2]}, limit);
  // |R(z) theta| <= |theta| / (gap / eps^2 - z) for theta in L-perp
  const double gap = g.transverse.lambda1_block - g.transverse.lambda0;
  for (const auto& rung : r.rungs) CHECK(rung.per_vector[0] <= 1.0 / (gap / (rung.epsilon * rung.epsilon) + 1.0) * 1.0001);
  CHECK(r.vector_fits[0].slope > 1.7);
}

TEST_CASE("Klaus checks") {
  const PotentialDensity d = make_density(radial_basis(build_radial_grid(1, 64)));
  const KlausReport k = klaus_check(1.0, 0.3, {1e-2, 1e-3, 1e-4}, d, 1.0);
  CHECK(k.condition_i);
  CHECK(k.condition_ii);
  CHECK(k.condition_iii);
  CHECK(k.condition_iv);
  CHECK(k.ratio_v == 1.0);
  CHECK(k.g == 0.5);
  CHECK(error_code([&] { klaus_check(-1.0, 0.3, {1e-2, 1e-3, 1e-4}, d, 1.0); }) == "kappa-sign");
}

TEST_CASE("Gamma trial: kappa = 0 gives the limit exactly at every eps") {
  const TransverseBasis b = radial_basis(build_radial_grid(1, 32));
  const GammaReport g = gamma_trial_check(trial_function("x_gauss"), {0.1, 0.01, 1e-3}, 0.0, b, TwistProfile::none(), false);
  for (double v : g.values) CHECK(v == doctest::Approx(g.limit).epsilon(1e-12));
  // int w'^2 for w = x e^{-x^2} is 3 sqrt(pi/2) / 4
  CHECK(g.limit == doctest::Approx(0.75 * std::sqrt(M_PI / 2)).epsilon(1e-8));
}

TEST_CASE("Gamma trial: monotone approach for repulsive coupling") {
  const TransverseBasis b = radial_basis(build_radial_grid(1, 64));
  const GammaReport g = gamma_trial_check(trial_function("x_gauss"), {0.1, 0.01, 1e-3}, -1.0, b, TwistProfile::none());
  CHECK(g.monotone);
  CHECK(g.relative_error < 0.01);
  CHECK(g.liminf_ok);
  CHECK(error_code([&] {
          gamma_trial_check(trial_function("gauss"), {0.1, 0.01, 1e-3}, -1.0, b, TwistProfile::none());
        }) == "not-in-limit-domain");
  const GammaReport div = gamma_divergence_check(trial_function("gauss"), {0.1, 0.01, 1e-3}, -1.0, b, TwistProfile::none());
  CHECK(div.divergent);
}

TEST_CASE("spectrum: repulsive tube has no bound state") {
  TubeOperatorSpec s = small_disk(-1.0);
  s.delta = 0.3;
  s.shift_c = 0.5;
  const TubeGrid g = build_tube_grid(s);
  const Operator1D limit = limit_operator(-1.0, g.x, s.twist, g.transverse.C_S);
  const SpectrumReport r = spectrum_convergence({{0.2, 0.1, 0.05}, 0.3, -1.0, 0.5}, s, g, limit);
  CHECK_FALSE(r.bound_state);
  for (const auto& rung : r.rungs) CHECK(rung.lowest > 0);
}
