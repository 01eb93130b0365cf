#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace tubelab {

using cplx = std::complex<double>;

/// Element of U(2):
/// e^{i g} [[e^{i p1} cos m, e^{i p2} sin m], [-e^{-i p2} sin m, e^{-i p1} cos m]].
struct ExtensionMatrix {
  Eigen::Matrix2cd U = Eigen::Matrix2cd::Identity();
  double theta_global = 0, theta_mix = 0, theta_phase1 = 0, theta_phase2 = 0;

  static ExtensionMatrix from_angles(double global, double mix, double phase1, double phase2);
  static ExtensionMatrix dirichlet() { return {}; }
  double unitarity_defect() const;
};

/// Boundary values at 0+ and 0-; entries 0..3 = phi+, phi-, phitilde+, phitilde-.
struct BoundaryData {
  cplx phi_plus = 0, phi_minus = 0, phitilde_plus = 0, phitilde_minus = 0;
  std::array<bool, 4> divergent{false, false, false, false};

  bool any_divergent() const { return divergent[0] || divergent[1] || divergent[2] || divergent[3]; }
};

/// Values and derivatives at points approaching the origin from one side.
struct SideSamples {
  std::vector<double> x;
  std::vector<cplx> phi;
  std::vector<cplx> dphi;
};

struct BoundaryOptions {
  double r0 = 1e-8;
  int samples = 4;
  /// A sequence counts as divergent when every successive difference fails to
  /// shrink below this fraction of the previous one.
  double contraction = 0.75;
};

/// Geometric sample points x_j = sign * r0 * 2^-j.
std::vector<double> sample_points(double sign, const BoundaryOptions& opt = {});

SideSamples sample_side(const std::function<cplx(double)>& phi, const std::function<cplx(double)>& dphi,
                        double sign, const BoundaryOptions& opt = {});

BoundaryData boundary_data(const SideSamples& plus, const SideSamples& minus, double kappa,
                           const BoundaryOptions& opt = {});

struct MembershipResult {
  bool member = false;
  double residual = 0;
};

MembershipResult check_extension_membership(const BoundaryData& data, const ExtensionMatrix& ext,
                                            double tol = 1e-8);

/// Polynomial extrapolation of (x_j, v_j) to x = 0 (Neville).
cplx extrapolate_to_zero(const std::vector<double>& x, const std::vector<cplx>& v);

/// Integrates -phi'' - kappa/|x| phi = E phi from x_start towards the origin
/// and records (phi, phi') at the requested points (same sign as x_start).
SideSamples shoot_to_origin(double kappa, double energy, double x_start, cplx phi_start, cplx dphi_start,
                            const std::vector<double>& targets);

}  // namespace tubelab
