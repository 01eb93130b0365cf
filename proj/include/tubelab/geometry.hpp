#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "tubelab/linalg.hpp"

namespace tubelab {

enum class ShapeKind { disk, ellipse, rectangle, polygon };

const char* to_string(ShapeKind kind);
ShapeKind shape_from_string(const std::string& name);

/// Cross-section S of the tube. The optional centre offsets the shape from the
/// lattice origin; the origin itself must stay inside S.
struct CrossSectionSpec {
  ShapeKind kind = ShapeKind::disk;
  double radius = 1.0;
  double semi_a = 1.0, semi_b = 0.5;
  double width = 1.0, height = 1.0;
  std::vector<Eigen::Vector2d> vertices;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  int resolution = 32;

  static CrossSectionSpec disk(double r, int res);
  static CrossSectionSpec ellipse(double a, double b, int res);
  static CrossSectionSpec rectangle(double w, double h, int res);
  static CrossSectionSpec polygon(std::vector<Eigen::Vector2d> v, int res);

  /// Strict interior membership.
  bool contains(double y1, double y2) const;
  double area() const;
  double perimeter() const;
  /// max |y|^2 over the closure of S.
  double bounding_radius_sq() const;
  /// Throws on invalid parameters, "origin-exclusion" if 0 is not in S.
  void validate() const;
};

/// Lattice nodes (i h, j h) strictly inside S, row-major by y2 then y1.
struct GridMesh2D {
  CrossSectionSpec spec;
  double spacing = 0;
  Vec y1, y2;
  std::vector<std::array<int, 2>> lattice;
  /// Neighbours in order +y1, -y1, +y2, -y2; -1 when the lattice point is outside S.
  std::vector<std::array<int, 4>> neighbor;
  /// Distance to the boundary in units of h along each direction (1 when the neighbour exists).
  std::vector<std::array<double, 4>> theta;
  Vec weights;
  /// Quadrature weights for integrands that do not vanish on the boundary.
  Vec rim_weights;
  double bounding_radius_sq = 0;

  Eigen::Index size() const { return y1.size(); }
  int find(int i, int j) const;

  std::unordered_map<long long, int> index_;
};

GridMesh2D build_mesh(const CrossSectionSpec& spec);

/// -Laplacian with Dirichlet boundary; weights h^2 so the scaled matrix is the stencil itself.
SparseOperator assemble_transverse_laplacian(const GridMesh2D& mesh);

struct TransverseModes {
  double lambda0 = 0;
  double lambda1 = 0;
  Vec u0;
  double C_S = 0;
  double orthogonality_residual = 0;
  int resolution = 0;
  double eigen_residual = 0;
};

TransverseModes solve_modes(const SparseOperator& op, const GridMesh2D& mesh);

/// First-derivative matrix along axis 0 (y1) or 1 (y2); boundary values are zero.
SpMat gradient_matrix(const GridMesh2D& mesh, int axis);
/// Discrete Ry . grad with R the quarter-turn rotation.
SpMat angular_derivative(const GridMesh2D& mesh);

double compute_CS(TransverseModes& modes, const GridMesh2D& mesh);
double check_orthogonality(TransverseModes& modes, const GridMesh2D& mesh);

/// Convenience: mesh, modes, C(S) and orthogonality residual in one call.
struct SectionSolution {
  GridMesh2D mesh;
  TransverseModes modes;
};
SectionSolution solve_section(const CrossSectionSpec& spec);

/// Cell-centred radial grid for a disk, r_j = (j + 1/2) h.
struct RadialGrid {
  double radius = 1;
  int cells = 0;
  double spacing = 0;
  Vec r;
  Vec weights;
};

RadialGrid build_radial_grid(double radius, int cells);
/// Angular harmonic m block of -Laplacian on the disk.
SparseOperator assemble_radial_laplacian(const RadialGrid& grid, int harmonic = 0);
/// lambda0 from m = 0, lambda1 = min(second m = 0 value, lowest m = 1 value).
TransverseModes solve_radial_modes(const RadialGrid& grid);

/// Discrete cross-section as seen by the tube assembly.
struct TransverseBasis {
  bool axisymmetric = false;
  Vec radius;
  Vec weights;
  Vec rim_weights;
  SpMat stiffness;
  SpMat angular;
  Vec u0;
  double lambda0 = 0;
  double lambda1 = 0;
  /// Second eigenvalue inside this basis (m = 0 block for the radial grid).
  double lambda1_block = 0;
  double C_S = 0;
  double spacing = 0;
  /// Node index under y1 -> -y1, empty when the mesh is not symmetric.
  std::vector<int> mirror_y1;

  Eigen::Index size() const { return weights.size(); }
};

TransverseBasis cartesian_basis(const GridMesh2D& mesh, const TransverseModes& modes);
TransverseBasis radial_basis(const RadialGrid& grid);

}  // namespace tubelab
