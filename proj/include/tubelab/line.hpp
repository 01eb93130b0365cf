#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tubelab/geometry.hpp"
#include "tubelab/linalg.hpp"

namespace tubelab {

/// Cell-centred grid on [-L, L]: x_i = (i - half + offset) h, offset 1/2 keeps
/// every node off the origin.
struct Grid1D {
  double length = 0;
  double spacing = 0;
  int half = 0;
  double offset = 0.5;

  int size() const { return 2 * half; }
  double node(int i) const { return (i - half + offset) * spacing; }
  Vec nodes() const;
};

/// Throws "grid-invalid" unless h <= 0.01 L and L is a multiple of h.
Grid1D make_grid(double length, double spacing);

enum class TwistFamily { zero, constant_rate, compact_bump };

const char* to_string(TwistFamily family);
TwistFamily twist_from_string(const std::string& name);

/// Rotation rate alpha'(x) of the cross-section; alpha(0) = 0.
struct TwistProfile {
  TwistFamily family = TwistFamily::zero;
  double rate = 0;
  double amplitude = 0;
  double support = 1;

  static TwistProfile none() { return {}; }
  static TwistProfile constant(double rate);
  static TwistProfile bump(double amplitude, double support);

  double derivative(double x) const;
  double angle(double x) const;
  double sup_norm() const;
  bool is_zero() const { return sup_norm() == 0; }
};

/// Symmetric tridiagonal operator on a Grid1D (uniform weight h).
struct Operator1D {
  Grid1D grid;
  Vec diag;
  Vec off;
  Vec potential;
  double kappa = 0;
  double twist_C_S = 0;
  std::optional<double> epsilon, delta, shift_c;
  bool dirichlet_at_origin = true;

  SparseOperator op() const;
  std::vector<double> eigenvalues(int count) const;
};

/// H_D + alpha'^2 C(S): half-lines decoupled, Dirichlet at 0 and +-L.
Operator1D assemble_HD(double kappa, const Grid1D& grid, const TwistProfile& twist, double C_S);

/// |u0|^2 mass per transverse node together with |y|.
struct PotentialDensity {
  Vec radius;
  Vec mass;
};

PotentialDensity make_density(const TransverseModes& modes, const GridMesh2D& mesh);
PotentialDensity make_density(const TransverseBasis& basis);

/// Throws "delta-range" unless 0 < delta < 1/2.
void check_delta(double delta);

double eval_V_eps(double x, double kappa, double eps, double delta, const PotentialDensity& density);
double eval_V_eps(double x, double kappa, double eps, double delta, const TransverseModes& modes,
                  const GridMesh2D& mesh);

/// -d^2/dx^2 + V_eps + c/eps^delta on H^1: the half-lines are coupled across the origin.
Operator1D assemble_T_eps(double kappa, double eps, double delta, double c, const Grid1D& grid,
                          const PotentialDensity& density);
Operator1D assemble_T_eps(double kappa, double eps, double delta, double c, const Grid1D& grid,
                          const TransverseModes& modes, const GridMesh2D& mesh);

/// (int w^2/x^2) / (4 int w'^2) with w = 0 imposed at the origin and at +-L.
double hardy_check(const Vec& w, const Grid1D& grid);

}  // namespace tubelab
