#include <cmath>
#include <random>

#include "doctest.h"
#include "tubelab/error.hpp"
#include "tubelab/extensions.hpp"

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

// phi = a + b x - s kappa a x (ln|kappa x| - 1) has phi(0) = a and phitilde(0) = b on side s.
SideSamples synthetic(double a, double b, double kappa, double sign, const BoundaryOptions& opt) {
  auto phi = [=](double x) { return cplx(a + b * x - sign * kappa * a * x * (std::log(std::abs(kappa * x)) - 1)); };
  auto dphi = [=](double x) { return cplx(b - sign * kappa * a * std::log(std::abs(kappa * x))); };
  return sample_side(phi, dphi, sign, opt);
}

}  // namespace

TEST_CASE("extension matrices are unitary") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int t = 0; t < 20; ++t) {
    const ExtensionMatrix e = ExtensionMatrix::from_angles(u(rng), u(rng), u(rng), u(rng));
    CHECK(e.unitarity_defect() < 1e-14);
  }
  CHECK(ExtensionMatrix::dirichlet().U.isIdentity());
}

TEST_CASE("Neville extrapolation is exact on polynomials") {
  const std::vector<double> x{0.4, 0.2, 0.1, 0.05};
  std::vector<cplx> v;
  for (double t : x) v.push_back(cplx(3 - 2 * t + t * t * t, t));
  CHECK(std::abs(extrapolate_to_zero(x, v) - cplx(3, 0)) < 1e-12);
}

TEST_CASE("boundary data of synthetic expansions") {
  const BoundaryOptions opt;
  const BoundaryData d =
      boundary_data(synthetic(0.7, -1.3, 1.0, +1, opt), synthetic(0.2, 0.9, 1.0, -1, opt), 1.0, opt);
  CHECK_FALSE(d.any_divergent());
  CHECK(std::abs(d.phi_plus - 0.7) < 1e-6);
  CHECK(std::abs(d.phi_minus - 0.2) < 1e-6);
  CHECK(std::abs(d.phitilde_plus + 1.3) < 1e-5);
  CHECK(std::abs(d.phitilde_minus - 0.9) < 1e-5);
}

TEST_CASE("a logarithmic singularity is flagged divergent") {
  const BoundaryOptions opt;
  auto phi = [](double x) { return cplx(std::log(std::abs(x))); };
  auto dphi = [](double x) { return cplx(1 / x); };
  const BoundaryData d =
      boundary_data(sample_side(phi, dphi, +1, opt), sample_side(phi, dphi, -1, opt), 1.0, opt);
  CHECK(d.divergent[0]);
  CHECK(d.divergent[1]);
  CHECK(std::isnan(d.phi_plus.real()));
  CHECK(error_code([&] { check_extension_membership(d, ExtensionMatrix::dirichlet()); }) == "not-in-adjoint-domain");
}

TEST_CASE("boundary data input checks") {
  BoundaryOptions opt;
  const SideSamples s = synthetic(1, 1, 1, +1, opt);
  CHECK(error_code([&] { boundary_data(s, s, 0.0, opt); }) == "log-regularization-undefined");
  opt.samples = 2;
  const SideSamples two = synthetic(1, 1, 1, +1, opt);
  CHECK(error_code([&] { boundary_data(two, two, 1.0, opt); }) == "need-3-points");
}

TEST_CASE("hydrogen ground state satisfies the Dirichlet condition") {
  // phi = |x| e^{-|x|/2} solves -phi'' - phi/|x| = -phi/4 on each half-line
  const BoundaryOptions opt;
  const double e = std::exp(-0.5);
  const SideSamples plus = shoot_to_origin(1.0, -0.25, 1.0, e, 0.5 * e, sample_points(+1, opt));
  const SideSamples minus = shoot_to_origin(1.0, -0.25, -1.0, e, -0.5 * e, sample_points(-1, opt));
  const BoundaryData d = boundary_data(plus, minus, 1.0, opt);
  CHECK(std::abs(d.phi_plus) < 1e-7);
  CHECK(std::abs(d.phitilde_plus - 1.0) < 1e-6);
  CHECK(std::abs(d.phitilde_minus + 1.0) < 1e-6);
  const MembershipResult m = check_extension_membership(d, ExtensionMatrix::dirichlet(), 1e-6);
  CHECK(m.member);
  // the same data violates the extension U = -1 (phitilde = 0 required)
  CHECK_FALSE(check_extension_membership(d, ExtensionMatrix::from_angles(M_PI, 0, 0, 0), 1e-6).member);
}

TEST_CASE("membership residual for a mixing extension") {
  // Build data satisfying (I - U) t = -i (I + U) p for a chosen U and p.
  const ExtensionMatrix e = ExtensionMatrix::from_angles(0.3, 0.7, -0.4, 1.1);
  const Eigen::Vector2cd p(cplx(0.5, 0), cplx(-0.2, 0.1));
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Vector2cd t = (id - e.U).inverse() * (cplx(0, -1) * ((id + e.U) * p));
  BoundaryData d;
  d.phi_plus = -p[0];
  d.phi_minus = p[1];
  d.phitilde_plus = t[0];
  d.phitilde_minus = t[1];
  CHECK(check_extension_membership(d, e).residual < 1e-12);
  d.phitilde_plus += 1e-3;
  CHECK_FALSE(check_extension_membership(d, e).member);
}

TEST_CASE("shooting targets must approach the origin") {
  CHECK(error_code([] { shoot_to_origin(1, -0.25, 1.0, 1, 0, {0.5, 0.7}); }) == "shooting-target");
  CHECK(error_code([] { shoot_to_origin(1, -0.25, 0.0, 1, 0, {0.5}); }) == "origin-on-grid");
}
