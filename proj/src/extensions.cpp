#include "tubelab/extensions.hpp"

#include <cmath>

#include "tubelab/error.hpp"

namespace tubelab {

ExtensionMatrix ExtensionMatrix::from_angles(double global, double mix, double phase1, double phase2) {
  const cplx i(0, 1);
  ExtensionMatrix e;
  e.theta_global = global;
  e.theta_mix = mix;
  e.theta_phase1 = phase1;
  e.theta_phase2 = phase2;
  const cplx g = std::exp(i * global);
  e.U(0, 0) = g * std::exp(i * phase1) * std::cos(mix);
  e.U(0, 1) = g * std::exp(i * phase2) * std::sin(mix);
  e.U(1, 0) = -g * std::exp(-i * phase2) * std::sin(mix);
  e.U(1, 1) = g * std::exp(-i * phase1) * std::cos(mix);
  return e;
}

double ExtensionMatrix::unitarity_defect() const {
  return (U * U.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

std::vector<double> sample_points(double sign, const BoundaryOptions& opt) {
  std::vector<double> x(opt.samples);
  for (int j = 0; j < opt.samples; ++j) x[j] = sign * opt.r0 * std::ldexp(1.0, -j);
  return x;
}

SideSamples sample_side(const std::function<cplx(double)>& phi, const std::function<cplx(double)>& dphi,
                        double sign, const BoundaryOptions& opt) {
  SideSamples s;
  s.x = sample_points(sign, opt);
  for (double x : s.x) {
    s.phi.push_back(phi(x));
    s.dphi.push_back(dphi(x));
  }
  return s;
}

cplx extrapolate_to_zero(const std::vector<double>& x, const std::vector<cplx>& v) {
  std::vector<cplx> p(v);
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
  return p[0];
}

namespace {

bool diverges(const std::vector<cplx>& s, double contraction) {
  const double scale = 1e-10 * (1 + std::abs(s.back()));
  for (std::size_t j = 0; j + 2 < s.size(); ++j) {
    const double d0 = std::abs(s[j + 1] - s[j]);
    const double d1 = std::abs(s[j + 2] - s[j + 1]);
    if (d1 <= scale || d1 < contraction * d0) return false;
  }
  return true;
}

void one_side(const SideSamples& side, double kappa, double sign, const BoundaryOptions& opt, cplx& phi0,
              cplx& tilde0, bool& phi_div, bool& tilde_div) {
  if (side.x.size() < 3 || side.phi.size() != side.x.size() || side.dphi.size() != side.x.size())
    fail("need-3-points", "at least 3 samples per side are required");
  std::vector<cplx> tilde(side.x.size());
  for (std::size_t j = 0; j < side.x.size(); ++j)
    tilde[j] = side.dphi[j] + sign * kappa * side.phi[j] * std::log(std::abs(kappa) * std::abs(side.x[j]));
  phi_div = diverges(side.phi, opt.contraction);
  tilde_div = diverges(tilde, opt.contraction);
  phi0 = extrapolate_to_zero(side.x, side.phi);
  tilde0 = extrapolate_to_zero(side.x, tilde);
  if (tilde_div) tilde0 = cplx(std::nan(""), std::nan(""));
  if (phi_div) phi0 = cplx(std::nan(""), std::nan(""));
}

}  // namespace

BoundaryData boundary_data(const SideSamples& plus, const SideSamples& minus, double kappa,
                           const BoundaryOptions& opt) {
  if (kappa == 0) fail("log-regularization-undefined", "kappa = 0");
  BoundaryData d;
  one_side(plus, kappa, +1.0, opt, d.phi_plus, d.phitilde_plus, d.divergent[0], d.divergent[2]);
  one_side(minus, kappa, -1.0, opt, d.phi_minus, d.phitilde_minus, d.divergent[1], d.divergent[3]);
  return d;
}

MembershipResult check_extension_membership(const BoundaryData& data, const ExtensionMatrix& ext, double tol) {
  if (data.any_divergent()) fail("not-in-adjoint-domain", "boundary data has a divergent entry");
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Vector2cd tilde(data.phitilde_plus, data.phitilde_minus);
  const Eigen::Vector2cd phi(-data.phi_plus, data.phi_minus);
  const Eigen::Vector2cd lhs = (id - ext.U) * tilde;
  const Eigen::Vector2cd rhs = cplx(0, -1) * ((id + ext.U) * phi);
  MembershipResult r;
  r.residual = (lhs - rhs).cwiseAbs().maxCoeff();
  r.member = r.residual <= tol;
  return r;
}

SideSamples shoot_to_origin(double kappa, double energy, double x_start, cplx phi_start, cplx dphi_start,
                            const std::vector<double>& targets) {
  SideSamples out;
  if (x_start == 0) fail("origin-on-grid", "shooting must start away from the origin");
  auto rhs = [&](double x, const Eigen::Vector2cd& y) {
    return Eigen::Vector2cd(y[1], -(kappa / std::abs(x) + energy) * y[0]);
  };
  Eigen::Vector2cd y(phi_start, dphi_start);
  double x = x_start;
  for (double target : targets) {
    if (target == 0 || (target > 0) != (x_start > 0) || std::abs(target) > std::abs(x))
      fail("shooting-target", "targets must approach the origin monotonically from x_start");
    while (x != target) {
      double step = 0.002 * std::abs(x);
      if (std::abs(target - x) <= step * (1 + 1e-12)) step = std::abs(target - x);
      const double hs = x > 0 ? -step : step;
      const Eigen::Vector2cd k1 = rhs(x, y);
      const Eigen::Vector2cd k2 = rhs(x + hs / 2, y + hs / 2 * k1);
      const Eigen::Vector2cd k3 = rhs(x + hs / 2, y + hs / 2 * k2);
      const Eigen::Vector2cd k4 = rhs(x + hs, y + hs * k3);
      y += hs / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      x = (std::abs(target - x) <= step * (1 + 1e-12)) ? target : x + hs;
    }
    out.x.push_back(target);
    out.phi.push_back(y[0]);
    out.dphi.push_back(y[1]);
  }
  return out;
}

}  // namespace tubelab
