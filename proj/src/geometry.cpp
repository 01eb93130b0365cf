#include "tubelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tubelab/error.hpp"

namespace tubelab {

namespace {

constexpr double kPi = std::numbers::pi;

long long lattice_key(int i, int j) {
  return (static_cast<long long>(j) << 32) ^ static_cast<long long>(static_cast<unsigned>(i));
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                    const Eigen::Vector2d& q2) {
  const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

// Direction offsets matching GridMesh2D::neighbor.
constexpr int kDi[4] = {1, -1, 0, 0};
constexpr int kDj[4] = {0, 0, 1, -1};
constexpr int kOpposite[4] = {1, 0, 3, 2};

}  // namespace

const char* to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::disk: return "disk";
    case ShapeKind::ellipse: return "ellipse";
    case ShapeKind::rectangle: return "rectangle";
    case ShapeKind::polygon: return "polygon";
  }
  return "?";
}

ShapeKind shape_from_string(const std::string& name) {
  if (name == "disk") return ShapeKind::disk;
  if (name == "ellipse") return ShapeKind::ellipse;
  if (name == "rectangle") return ShapeKind::rectangle;
  if (name == "polygon") return ShapeKind::polygon;
  fail("shape-invalid", "unknown shape '" + name + "'");
}

CrossSectionSpec CrossSectionSpec::disk(double r, int res) {
  CrossSectionSpec s;
  s.kind = ShapeKind::disk;
  s.radius = r;
  s.resolution = res;
  return s;
}

CrossSectionSpec CrossSectionSpec::ellipse(double a, double b, int res) {
  CrossSectionSpec s;
  s.kind = ShapeKind::ellipse;
  s.semi_a = a;
  s.semi_b = b;
  s.resolution = res;
  return s;
}

CrossSectionSpec CrossSectionSpec::rectangle(double w, double h, int res) {
  CrossSectionSpec s;
  s.kind = ShapeKind::rectangle;
  s.width = w;
  s.height = h;
  s.resolution = res;
  return s;
}

CrossSectionSpec CrossSectionSpec::polygon(std::vector<Eigen::Vector2d> v, int res) {
  CrossSectionSpec s;
  s.kind = ShapeKind::polygon;
  s.vertices = std::move(v);
  s.resolution = res;
  return s;
}

bool CrossSectionSpec::contains(double y1, double y2) const {
  const double u = y1 - center.x(), v = y2 - center.y();
  switch (kind) {
    case ShapeKind::disk: return u * u + v * v < radius * radius;
    case ShapeKind::ellipse: return (u * u) / (semi_a * semi_a) + (v * v) / (semi_b * semi_b) < 1.0;
    case ShapeKind::rectangle: return std::abs(u) < 0.5 * width && std::abs(v) < 0.5 * height;
    case ShapeKind::polygon: {
      // crossing number; points on an edge count as outside
      bool inside = false;
      const std::size_t n = vertices.size();
      for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
        const Eigen::Vector2d p = vertices[a] , q = vertices[b];
        const Eigen::Vector2d pa(p.x() + center.x(), p.y() + center.y());
        const Eigen::Vector2d qb(q.x() + center.x(), q.y() + center.y());
        if (std::abs(cross(qb - pa, Eigen::Vector2d(y1, y2) - pa)) < 1e-14 &&
            std::min(pa.x(), qb.x()) <= y1 && y1 <= std::max(pa.x(), qb.x()) &&
            std::min(pa.y(), qb.y()) <= y2 && y2 <= std::max(pa.y(), qb.y()))
          return false;
        if ((pa.y() > y2) != (qb.y() > y2) &&
            y1 < (qb.x() - pa.x()) * (y2 - pa.y()) / (qb.y() - pa.y()) + pa.x())
          inside = !inside;
      }
      return inside;
    }
  }
  return false;
}

double CrossSectionSpec::area() const {
  switch (kind) {
    case ShapeKind::disk: return kPi * radius * radius;
    case ShapeKind::ellipse: return kPi * semi_a * semi_b;
    case ShapeKind::rectangle: return width * height;
    case ShapeKind::polygon: {
      double s = 0;
      for (std::size_t a = 0, b = vertices.size() - 1; a < vertices.size(); b = a++)
        s += cross(vertices[b], vertices[a]);
      return 0.5 * std::abs(s);
    }
  }
  return 0;
}

double CrossSectionSpec::perimeter() const {
  switch (kind) {
    case ShapeKind::disk: return 2 * kPi * radius;
    case ShapeKind::ellipse: {
      const double h = std::pow(semi_a - semi_b, 2) / std::pow(semi_a + semi_b, 2);
      return kPi * (semi_a + semi_b) * (1 + 3 * h / (10 + std::sqrt(4 - 3 * h)));
    }
    case ShapeKind::rectangle: return 2 * (width + height);
    case ShapeKind::polygon: {
      double s = 0;
      for (std::size_t a = 0, b = vertices.size() - 1; a < vertices.size(); b = a++)
        s += (vertices[a] - vertices[b]).norm();
      return s;
    }
  }
  return 0;
}

double CrossSectionSpec::bounding_radius_sq() const {
  double k = 0;
  switch (kind) {
    case ShapeKind::disk: k = std::pow(center.norm() + radius, 2); break;
    case ShapeKind::ellipse:
      for (int t = 0; t < 4096; ++t) {
        const double phi = 2 * kPi * t / 4096.0;
        const Eigen::Vector2d p = center + Eigen::Vector2d(semi_a * std::cos(phi), semi_b * std::sin(phi));
        k = std::max(k, p.squaredNorm());
      }
      break;
    case ShapeKind::rectangle:
      for (int sx : {-1, 1})
        for (int sy : {-1, 1})
          k = std::max(k, (center + Eigen::Vector2d(0.5 * sx * width, 0.5 * sy * height)).squaredNorm());
      break;
    case ShapeKind::polygon:
      for (const auto& v : vertices) k = std::max(k, (center + v).squaredNorm());
      break;
  }
  return k;
}

void CrossSectionSpec::validate() const {
  if (resolution < 8) fail("resolution-too-low", "resolution must be >= 8 per unit length");
  switch (kind) {
    case ShapeKind::disk:
      if (!(radius > 0)) fail("shape-invalid", "disk radius must be positive");
      break;
    case ShapeKind::ellipse:
      if (!(semi_a > 0 && semi_b > 0)) fail("shape-invalid", "ellipse semi-axes must be positive");
      break;
    case ShapeKind::rectangle:
      if (!(width > 0 && height > 0)) fail("shape-invalid", "rectangle sides must be positive");
      break;
    case ShapeKind::polygon: {
      const std::size_t n = vertices.size();
      if (n < 3) fail("shape-invalid", "polygon needs at least 3 vertices");
      for (const auto& v : vertices)
        if (!v.allFinite()) fail("shape-invalid", "polygon vertex is not finite");
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
          if (b == a + 1 || (a == 0 && b == n - 1)) continue;
          if (segments_cross(vertices[a], vertices[(a + 1) % n], vertices[b], vertices[(b + 1) % n]))
            fail("shape-invalid", "polygon is not simple");
        }
      if (area() <= 0) fail("shape-invalid", "polygon has zero area");
      break;
    }
  }
  if (!center.allFinite()) fail("shape-invalid", "centre is not finite");
  if (!contains(0.0, 0.0)) fail("origin-exclusion", "the cross-section must contain y = (0, 0)");
}

int GridMesh2D::find(int i, int j) const {
  auto it = index_.find(lattice_key(i, j));
  return it == index_.end() ? -1 : it->second;
}

GridMesh2D build_mesh(const CrossSectionSpec& spec) {
  spec.validate();
  GridMesh2D mesh;
  mesh.spec = spec;
  const double h = 1.0 / spec.resolution;
  mesh.spacing = h;
  mesh.bounding_radius_sq = spec.bounding_radius_sq();
  const int reach = static_cast<int>(std::ceil(std::sqrt(mesh.bounding_radius_sq) / h)) + 1;

  std::vector<double> y1, y2;
  for (int j = -reach; j <= reach; ++j)
    for (int i = -reach; i <= reach; ++i)
      if (spec.contains(i * h, j * h)) {
        mesh.index_[lattice_key(i, j)] = static_cast<int>(mesh.lattice.size());
        mesh.lattice.push_back({i, j});
        y1.push_back(i * h);
        y2.push_back(j * h);
      }
  const int n = static_cast<int>(mesh.lattice.size());
  if (n < 9) fail("mesh-too-coarse", std::to_string(n) + " interior nodes, need at least 9");
  mesh.y1 = Eigen::Map<Vec>(y1.data(), n);
  mesh.y2 = Eigen::Map<Vec>(y2.data(), n);
  mesh.neighbor.resize(n);
  mesh.theta.resize(n);

  for (int k = 0; k < n; ++k) {
    const auto [i, j] = mesh.lattice[k];
    for (int d = 0; d < 4; ++d) {
      const int nb = mesh.find(i + kDi[d], j + kDj[d]);
      mesh.neighbor[k][d] = nb;
      if (nb >= 0) {
        mesh.theta[k][d] = 1.0;
        continue;
      }
      double lo = 0, hi = 1;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (spec.contains((i + mid * kDi[d]) * h, (j + mid * kDj[d]) * h))
          lo = mid;
        else
          hi = mid;
      }
      mesh.theta[k][d] = std::max(hi, 1e-3);
    }
  }

  mesh.weights = Vec::Constant(n, h * h);
  // Strip between the last half cell and the boundary, integrand extrapolated
  // linearly from the node and its inner neighbour.
  mesh.rim_weights = mesh.weights;
  for (int k = 0; k < n; ++k)
    for (int d = 0; d < 4; ++d) {
      if (mesh.neighbor[k][d] >= 0) continue;
      const double t = mesh.theta[k][d];
      const double strip = (t - 0.5) * h * h;
      const int inner = mesh.neighbor[k][kOpposite[d]];
      if (inner >= 0) {
        const double slope = 0.5 * (t + 0.5);
        mesh.rim_weights[k] += strip * (1 + slope);
        mesh.rim_weights[inner] -= strip * slope;
      } else {
        mesh.rim_weights[k] += strip;
      }
    }
  return mesh;
}

SparseOperator assemble_transverse_laplacian(const GridMesh2D& mesh) {
  const int n = static_cast<int>(mesh.size());
  const double h2 = mesh.spacing * mesh.spacing;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * n);
  for (int k = 0; k < n; ++k) {
    double diag = 0;
    for (int d = 0; d < 4; ++d) {
      const int nb = mesh.neighbor[k][d];
      if (nb >= 0) {
        diag += 1.0 / h2;
        // lower triangle only, mirrored below for exact symmetry
        if (nb < k) trip.emplace_back(k, nb, -1.0 / h2);
      } else {
        diag += 1.0 / (mesh.theta[k][d] * h2);
      }
    }
    trip.emplace_back(k, k, diag);
  }
  SpMat lower(n, n);
  lower.setFromTriplets(trip.begin(), trip.end());
  SpMat full = lower.selfadjointView<Eigen::Lower>();
  SparseOperator op;
  op.matrix = full;
  op.matrix.makeCompressed();
  op.weights = mesh.weights;
  return op;
}

TransverseModes solve_modes(const SparseOperator& op, const GridMesh2D& mesh) {
  EigenPairs pairs = lowest_eigenpairs(op.matrix, 2, 0.0, 7, {}, 1e-12);
  TransverseModes modes;
  modes.lambda0 = pairs.values[0];
  modes.lambda1 = pairs.values[1];
  modes.resolution = mesh.spec.resolution;
  modes.eigen_residual = pairs.residual;
  if (pairs.residual > 1e-6)
    fail("eigensolver-stall", "eigenpair residual " + std::to_string(pairs.residual));
  if (modes.lambda1 - modes.lambda0 < 1e-8)
    fail("ground-state-degenerate", "lambda1 - lambda0 = " + std::to_string(modes.lambda1 - modes.lambda0));
  Vec u = op.to_nodal(pairs.vectors.col(0));
  if (u.sum() < 0) u = -u;
  const double norm2 = u.cwiseProduct(u).dot(mesh.weights);
  u /= std::sqrt(norm2);
  if (u.minCoeff() <= 0)
    fail("eigensolver-stall", "ground state is not positive at every node (disconnected mesh?)");
  modes.u0 = u;
  return modes;
}

SpMat gradient_matrix(const GridMesh2D& mesh, int axis) {
  const int n = static_cast<int>(mesh.size());
  const double h = mesh.spacing;
  const int east = axis == 0 ? 0 : 2;
  const int west = axis == 0 ? 1 : 3;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * n);
  for (int k = 0; k < n; ++k) {
    const double he = mesh.theta[k][east] * h;
    const double hw = mesh.theta[k][west] * h;
    // three-point derivative on a nonuniform stencil; boundary values are zero
    trip.emplace_back(k, k, (he - hw) / (hw * he));
    if (mesh.neighbor[k][west] >= 0) trip.emplace_back(k, mesh.neighbor[k][west], -he / (hw * (hw + he)));
    if (mesh.neighbor[k][east] >= 0) trip.emplace_back(k, mesh.neighbor[k][east], hw / (he * (hw + he)));
  }
  SpMat g(n, n);
  g.setFromTriplets(trip.begin(), trip.end());
  g.prune(0.0);
  return g;
}

SpMat angular_derivative(const GridMesh2D& mesh) {
  SpMat g = (-mesh.y2).asDiagonal() * gradient_matrix(mesh, 0);
  g += mesh.y1.asDiagonal() * gradient_matrix(mesh, 1);
  g.makeCompressed();
  return g;
}

double compute_CS(TransverseModes& modes, const GridMesh2D& mesh) {
  const Vec g = angular_derivative(mesh) * modes.u0;
  modes.C_S = std::max(0.0, g.cwiseProduct(g).dot(mesh.rim_weights));
  return modes.C_S;
}

double check_orthogonality(TransverseModes& modes, const GridMesh2D& mesh) {
  const Vec g = angular_derivative(mesh) * modes.u0;
  modes.orthogonality_residual = std::abs(g.cwiseProduct(modes.u0).dot(mesh.weights));
  return modes.orthogonality_residual;
}

SectionSolution solve_section(const CrossSectionSpec& spec) {
  SectionSolution s{build_mesh(spec), {}};
  s.modes = solve_modes(assemble_transverse_laplacian(s.mesh), s.mesh);
  compute_CS(s.modes, s.mesh);
  check_orthogonality(s.modes, s.mesh);
  return s;
}

RadialGrid build_radial_grid(double radius, int cells) {
  if (!(radius > 0)) fail("shape-invalid", "disk radius must be positive");
  if (cells < 4) fail("mesh-too-coarse", "radial grid needs at least 4 cells");
  RadialGrid g;
  g.radius = radius;
  g.cells = cells;
  g.spacing = radius / cells;
  g.r.resize(cells);
  g.weights.resize(cells);
  for (int j = 0; j < cells; ++j) {
    g.r[j] = (j + 0.5) * g.spacing;
    g.weights[j] = 2 * kPi * g.r[j] * g.spacing;
  }
  return g;
}

namespace {

SpMat radial_form(const RadialGrid& g, int harmonic) {
  const int n = g.cells;
  const double h = g.spacing;
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j + 1 < n; ++j) {
    const double c = 2 * kPi * (j + 1) * h / h;
    trip.emplace_back(j, j, c);
    trip.emplace_back(j + 1, j + 1, c);
    trip.emplace_back(j, j + 1, -c);
    trip.emplace_back(j + 1, j, -c);
  }
  trip.emplace_back(n - 1, n - 1, 2 * kPi * g.radius / (0.5 * h));
  if (harmonic != 0)
    for (int j = 0; j < n; ++j)
      trip.emplace_back(j, j, harmonic * harmonic * g.weights[j] / (g.r[j] * g.r[j]));
  SpMat k(n, n);
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

}  // namespace

SparseOperator assemble_radial_laplacian(const RadialGrid& grid, int harmonic) {
  return from_form(radial_form(grid, harmonic), grid.weights);
}

TransverseModes solve_radial_modes(const RadialGrid& grid) {
  const SparseOperator m0 = assemble_radial_laplacian(grid, 0);
  const SparseOperator m1 = assemble_radial_laplacian(grid, 1);
  const EigenPairs p0 = lowest_eigenpairs(m0.matrix, 2, 0.0, 7, {}, 1e-12);
  const EigenPairs p1 = lowest_eigenpairs(m1.matrix, 1, 0.0, 7, {}, 1e-12);
  TransverseModes modes;
  modes.lambda0 = p0.values[0];
  modes.lambda1 = std::min(p0.values[1], p1.values[0]);
  modes.resolution = static_cast<int>(std::lround(grid.cells / grid.radius));
  modes.eigen_residual = std::max(p0.residual, p1.residual);
  Vec u = m0.to_nodal(p0.vectors.col(0));
  if (u.sum() < 0) u = -u;
  u /= std::sqrt(u.cwiseProduct(u).dot(grid.weights));
  modes.u0 = u;
  modes.C_S = 0;
  modes.orthogonality_residual = 0;
  return modes;
}

TransverseBasis cartesian_basis(const GridMesh2D& mesh, const TransverseModes& modes) {
  TransverseBasis b;
  b.axisymmetric = false;
  b.radius = (mesh.y1.cwiseAbs2() + mesh.y2.cwiseAbs2()).cwiseSqrt();
  b.weights = mesh.weights;
  b.rim_weights = mesh.rim_weights;
  b.stiffness = mesh.weights[0] * assemble_transverse_laplacian(mesh).matrix;
  b.angular = angular_derivative(mesh);
  b.u0 = modes.u0;
  b.lambda0 = modes.lambda0;
  b.lambda1 = modes.lambda1;
  b.lambda1_block = modes.lambda1;
  b.C_S = modes.C_S;
  b.spacing = mesh.spacing;
  std::vector<int> mirror(mesh.size());
  bool symmetric = true;
  for (Eigen::Index k = 0; k < mesh.size() && symmetric; ++k) {
    mirror[k] = mesh.find(-mesh.lattice[k][0], mesh.lattice[k][1]);
    symmetric = mirror[k] >= 0;
  }
  if (symmetric) b.mirror_y1 = std::move(mirror);
  return b;
}

TransverseBasis radial_basis(const RadialGrid& grid) {
  const TransverseModes modes = solve_radial_modes(grid);
  const SparseOperator m0 = assemble_radial_laplacian(grid, 0);
  const EigenPairs p0 = lowest_eigenpairs(m0.matrix, 2, 0.0, 7, {}, 1e-12);
  TransverseBasis b;
  b.axisymmetric = true;
  b.radius = grid.r;
  b.weights = grid.weights;
  b.rim_weights = grid.weights;
  b.stiffness = radial_form(grid, 0);
  b.u0 = modes.u0;
  b.lambda0 = modes.lambda0;
  b.lambda1 = modes.lambda1;
  b.lambda1_block = p0.values[1];
  b.C_S = 0;
  b.spacing = grid.spacing;
  return b;
}

}  // namespace tubelab
