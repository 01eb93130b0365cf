#include "tubelab/tube.hpp"

#include <cmath>

#include "tubelab/error.hpp"

namespace tubelab {

const char* to_string(TubeMode mode) {
  return mode == TubeMode::axisymmetric ? "axisymmetric" : "full_tensor";
}

TubeMode tube_mode_from_string(const std::string& name) {
  if (name == "axisymmetric") return TubeMode::axisymmetric;
  if (name == "full_tensor") return TubeMode::full_tensor;
  fail("mode-invalid", "unknown tube mode '" + name + "'");
}

void TubeOperatorSpec::validate() const {
  if (!(epsilon > 0 && epsilon <= 1)) fail("epsilon-range", "requires 0 < eps <= 1");
  if (delta) check_delta(*delta);
  if (shift_c && kappa > 0 && !(*shift_c > kappa)) fail("shift-too-small", "requires c > kappa");
  if (mode == TubeMode::axisymmetric) {
    if (cross_section.kind != ShapeKind::disk || cross_section.center.norm() != 0)
      fail("mode-conflict", "axisymmetric mode requires a disk centred at the origin");
    if (!twist.is_zero()) fail("mode-conflict", "axisymmetric mode requires zero twist");
    if (radial_cells < 4) fail("mesh-too-coarse", "radial grid needs at least 4 cells");
  }
  make_grid(x_length, x_spacing);
}

Vec TubeGrid::weights() const {
  Vec w(size());
  const Eigen::Index ny = transverse.size();
  for (int i = 0; i < x.size(); ++i) w.segment(i * ny, ny) = x.spacing * transverse.weights;
  return w;
}

TubeGrid build_tube_grid(const TubeOperatorSpec& spec) {
  spec.validate();
  TubeGrid g;
  g.x = make_grid(spec.x_length, spec.x_spacing);
  const auto over_budget = [&](Eigen::Index ny) {
    const double total = static_cast<double>(ny) * g.x.size();
    if (total > static_cast<double>(spec.budget))
      fail("grid-budget", std::to_string(static_cast<long long>(total)) + " unknowns exceed budget " +
                              std::to_string(spec.budget));
  };
  if (spec.mode == TubeMode::axisymmetric) {
    over_budget(spec.radial_cells);
    g.transverse = radial_basis(build_radial_grid(spec.cross_section.radius, spec.radial_cells));
  } else {
    GridMesh2D mesh = build_mesh(spec.cross_section);
    over_budget(mesh.size());
    TransverseModes modes = solve_modes(assemble_transverse_laplacian(mesh), mesh);
    compute_CS(modes, mesh);
    check_orthogonality(modes, mesh);
    g.transverse = cartesian_basis(mesh, modes);
  }
  return g;
}

namespace {

SparseOperator assemble(const TubeOperatorSpec& spec, const TubeGrid& g, double reg, double constant) {
  spec.validate();
  if (static_cast<double>(g.size()) > static_cast<double>(spec.budget))
    fail("grid-budget", "unknowns exceed budget");
  const TransverseBasis& t = g.transverse;
  const int nx = g.x.size();
  const Eigen::Index ny = t.size();
  const double hx = g.x.spacing;
  const double eps = spec.epsilon;

  SpMat trans = t.stiffness;
  for (Eigen::Index k = 0; k < ny; ++k) trans.coeffRef(k, k) -= t.lambda0 * t.weights[k];
  trans *= hx / (eps * eps);
  trans.makeCompressed();

  const bool twisted = !spec.twist.is_zero();
  SpMat twist_block, mg;
  if (twisted) {
    if (t.axisymmetric) fail("mode-conflict", "axisymmetric mode requires zero twist");
    twist_block = SpMat(t.angular.transpose()) * t.rim_weights.asDiagonal() * t.angular;
    mg = t.weights.asDiagonal() * t.angular;
    twist_block.makeCompressed();
    mg.makeCompressed();
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nx) *
               (trans.nonZeros() + 3 * ny + (twisted ? twist_block.nonZeros() + 4 * mg.nonZeros() : 0)));
  for (int i = 0; i < nx; ++i) {
    const double x = g.x.node(i);
    const Eigen::Index base = g.index(i, 0);
    for (Eigen::Index col = 0; col < trans.outerSize(); ++col)
      for (SpMat::InnerIterator it(trans, col); it; ++it)
        trip.emplace_back(base + it.row(), base + it.col(), it.value());
    // kinetic faces: interior faces couple slices, end faces see Dirichlet at distance hx/2
    const int faces = (i == 0 || i == nx - 1) ? 3 : 2;
    for (Eigen::Index k = 0; k < ny; ++k) {
      const double m = t.weights[k];
      const double er = eps * t.radius[k];
      const double f = 1.0 / (std::sqrt(x * x + er * er) + reg);
      trip.emplace_back(base + k, base + k, faces * m / hx + hx * m * (constant - spec.kappa * f));
      if (i + 1 < nx) {
        trip.emplace_back(base + k, base + ny + k, -m / hx);
        trip.emplace_back(base + ny + k, base + k, -m / hx);
      }
    }
    if (!twisted) continue;
    const double a = spec.twist.derivative(x);
    if (a == 0) continue;
    for (Eigen::Index col = 0; col < twist_block.outerSize(); ++col)
      for (SpMat::InnerIterator it(twist_block, col); it; ++it)
        trip.emplace_back(base + it.row(), base + it.col(), hx * a * a * it.value());
    // -2 alpha' (D_x psi, G psi) with centred D_x
    for (int j : {i - 1, i + 1}) {
      if (j < 0 || j >= nx) continue;
      const double coef = -hx * a * (j > i ? 1.0 : -1.0) / (2 * hx);
      const Eigen::Index bj = g.index(j, 0);
      for (Eigen::Index col = 0; col < mg.outerSize(); ++col)
        for (SpMat::InnerIterator it(mg, col); it; ++it) {
          trip.emplace_back(bj + it.row(), base + it.col(), coef * it.value());
          trip.emplace_back(base + it.col(), bj + it.row(), coef * it.value());
        }
    }
  }
  SpMat k(g.size(), g.size());
  k.setFromTriplets(trip.begin(), trip.end());
  return from_form(k, g.weights());
}

}  // namespace

SparseOperator assemble_b_form(const TubeOperatorSpec& spec, const TubeGrid& grid) {
  return assemble(spec, grid, 0.0, 0.0);
}

std::pair<SparseOperator, SparseOperator> assemble_a_forms(const TubeOperatorSpec& spec, const TubeGrid& grid) {
  if (!spec.delta) fail("delta-range", "regularized forms need delta");
  const double c = spec.shift_c.value_or(spec.kappa > 0 ? 2 * spec.kappa : 0.0);
  if (spec.kappa > 0 && !(c > spec.kappa)) fail("shift-too-small", "requires c > kappa");
  const double reg = std::pow(spec.epsilon, *spec.delta);
  SparseOperator a = assemble(spec, grid, reg, 0.0);
  SparseOperator dot = a;
  const double s = c / reg;
  for (Eigen::Index i = 0; i < dot.matrix.rows(); ++i) dot.matrix.coeffRef(i, i) += s;
  return {std::move(a), std::move(dot)};
}

Projection project_onto_L(const Vec& psi, const TubeGrid& grid) {
  const Eigen::Index ny = grid.transverse.size();
  const Vec mu = grid.transverse.weights.cwiseProduct(grid.transverse.u0);
  Projection p;
  p.w.resize(grid.x.size());
  p.eta = psi;
  for (int i = 0; i < grid.x.size(); ++i) {
    p.w[i] = psi.segment(i * ny, ny).dot(mu);
    p.eta.segment(i * ny, ny) -= p.w[i] * grid.transverse.u0;
  }
  return p;
}

Vec lift(const Vec& w, const TubeGrid& grid) {
  const Eigen::Index ny = grid.transverse.size();
  Vec psi(grid.size());
  for (int i = 0; i < grid.x.size(); ++i) psi.segment(i * ny, ny) = w[i] * grid.transverse.u0;
  return psi;
}

Vec reduce_scaled(const Vec& v, const TubeGrid& grid) {
  const Eigen::Index ny = grid.transverse.size();
  const Vec e = grid.transverse.weights.cwiseSqrt().cwiseProduct(grid.transverse.u0);
  Vec s(grid.x.size());
  for (int i = 0; i < grid.x.size(); ++i) s[i] = v.segment(i * ny, ny).dot(e);
  return s;
}

Vec lift_scaled(const Vec& s, const TubeGrid& grid) {
  const Eigen::Index ny = grid.transverse.size();
  const Vec e = grid.transverse.weights.cwiseSqrt().cwiseProduct(grid.transverse.u0);
  Vec v(grid.size());
  for (int i = 0; i < grid.x.size(); ++i) v.segment(i * ny, ny) = s[i] * e;
  return v;
}

double transverse_slice_energy(const Vec& psi, const TubeGrid& grid, int slice) {
  const Eigen::Index ny = grid.transverse.size();
  const Vec p = psi.segment(slice * ny, ny);
  return p.dot(grid.transverse.stiffness * p) - grid.transverse.lambda0 * p.cwiseAbs2().dot(grid.transverse.weights);
}

CrossTerm cross_term_check(const Vec& w, const Vec& eta, const TubeOperatorSpec& spec, const TubeGrid& grid) {
  if (!spec.delta) fail("delta-range", "cross term needs a regularized spec");
  const Eigen::Index ny = grid.transverse.size();
  const Projection p = project_onto_L(eta, grid);
  const double scale = 1e-10 * std::max(1.0, eta.cwiseAbs().maxCoeff());
  if (p.w.cwiseAbs().maxCoeff() > scale) fail("not-orthogonal", "eta has a component along u0");

  const double eps = spec.epsilon;
  const double reg = std::pow(eps, *spec.delta);
  const double hx = grid.x.spacing;
  const TransverseBasis& t = grid.transverse;
  double m = 0;
  for (int i = 0; i < grid.x.size(); ++i) {
    const double x = grid.x.node(i);
    for (Eigen::Index k = 0; k < ny; ++k) {
      const double er = eps * t.radius[k];
      m += hx * t.weights[k] * w[i] * t.u0[k] * eta[i * ny + k] / (std::sqrt(x * x + er * er) + reg);
    }
  }
  m *= -spec.kappa;

  const double c = spec.shift_c.value_or(spec.kappa > 0 ? 2 * spec.kappa : 0.0);
  const Operator1D tt = assemble_T_eps(spec.kappa, eps, *spec.delta, c, grid.x, make_density(t));
  const auto forms = assemble_a_forms(spec, grid);
  CrossTerm out;
  out.m_value = m;
  out.t_value = tt.op().form(w);
  out.a_value = forms.second.form(eta);
  const double denom = std::pow(eps, 1 - *spec.delta / 2) * std::sqrt(out.t_value * out.a_value);
  out.bound_ratio = denom > 0 ? std::abs(m) / denom : 0.0;
  return out;
}

std::vector<int> parity_permutation(const TubeOperatorSpec& spec, const TubeGrid& grid) {
  const int nx = grid.x.size();
  const Eigen::Index ny = grid.transverse.size();
  const bool flip_y = !spec.twist.is_zero();
  if (flip_y && grid.transverse.mirror_y1.empty())
    fail("parity-unavailable", "cross-section mesh is not symmetric under y1 -> -y1");
  std::vector<int> perm(grid.size());
  for (int i = 0; i < nx; ++i)
    for (Eigen::Index k = 0; k < ny; ++k) {
      const Eigen::Index kk = flip_y ? grid.transverse.mirror_y1[k] : k;
      perm[grid.index(i, static_cast<int>(k))] = static_cast<int>(grid.index(nx - 1 - i, static_cast<int>(kk)));
    }
  return perm;
}

}  // namespace tubelab
