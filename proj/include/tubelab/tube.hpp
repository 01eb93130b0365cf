#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "tubelab/geometry.hpp"
#include "tubelab/line.hpp"

namespace tubelab {

enum class TubeMode { full_tensor, axisymmetric };

const char* to_string(TubeMode mode);
TubeMode tube_mode_from_string(const std::string& name);

struct TubeOperatorSpec {
  double kappa = 1.0;
  double epsilon = 0.1;
  std::optional<double> delta;
  std::optional<double> shift_c;
  TwistProfile twist;
  CrossSectionSpec cross_section;
  double x_length = 40.0;
  double x_spacing = 0.05;
  TubeMode mode = TubeMode::full_tensor;
  int radial_cells = 16;
  std::size_t budget = 3'000'000;

  /// Cross-field checks: delta range, c > kappa, axisymmetric constraints.
  void validate() const;
};

/// Tensor grid: x-slices outermost, transverse nodes innermost.
struct TubeGrid {
  Grid1D x;
  TransverseBasis transverse;

  Eigen::Index size() const { return static_cast<Eigen::Index>(x.size()) * transverse.size(); }
  Eigen::Index index(int i, int k) const { return static_cast<Eigen::Index>(i) * transverse.size() + k; }
  Vec weights() const;
};

/// Transverse basis for the spec (mesh + modes, or the radial grid) with the
/// budget checked before any eigen-solve.
TubeGrid build_tube_grid(const TubeOperatorSpec& spec);

/// Unregularized form b^eps (Coulomb term -kappa/sqrt(x^2 + eps^2 y^2)).
SparseOperator assemble_b_form(const TubeOperatorSpec& spec, const TubeGrid& grid);

/// (A, A-dot) with the regularized potential; A-dot = A + c/eps^delta.
std::pair<SparseOperator, SparseOperator> assemble_a_forms(const TubeOperatorSpec& spec, const TubeGrid& grid);

/// Components of a nodal vector along u0 per slice (w) and the remainder (eta).
struct Projection {
  Vec w;
  Vec eta;
};
Projection project_onto_L(const Vec& psi, const TubeGrid& grid);
Vec lift(const Vec& w, const TubeGrid& grid);

/// Same maps in L2-scaled coordinates, used by the norm estimates.
Vec reduce_scaled(const Vec& v, const TubeGrid& grid);
Vec lift_scaled(const Vec& s, const TubeGrid& grid);

/// sum_y |grad psi|^2 - lambda0 |psi|^2 for slice i.
double transverse_slice_energy(const Vec& psi, const TubeGrid& grid, int slice);

struct CrossTerm {
  double m_value = 0;
  double t_value = 0;
  double a_value = 0;
  double bound_ratio = 0;
};

/// Coupling between w u0 and eta through the regularized potential, with the
/// ratio |m| / (eps^{1 - delta/2} sqrt(t(w) a-dot(eta))).
CrossTerm cross_term_check(const Vec& w, const Vec& eta, const TubeOperatorSpec& spec, const TubeGrid& grid);

/// Index permutation of the parity (x, y1) -> (-x, -y1) (x -> -x only when
/// the twist is zero). Throws "parity-unavailable" if the mesh is not mirror-symmetric.
std::vector<int> parity_permutation(const TubeOperatorSpec& spec, const TubeGrid& grid);

}  // namespace tubelab
