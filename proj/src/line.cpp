#include "tubelab/line.hpp"

#include <algorithm>
#include <cmath>

#include "tubelab/error.hpp"

namespace tubelab {

Vec Grid1D::nodes() const {
  Vec x(size());
  for (int i = 0; i < size(); ++i) x[i] = node(i);
  return x;
}

Grid1D make_grid(double length, double spacing) {
  if (!(length > 0 && spacing > 0)) fail("grid-invalid", "length and spacing must be positive");
  if (spacing > 0.01 * length * (1 + 1e-12)) fail("grid-invalid", "spacing must satisfy h <= 0.01 L");
  const double cells = length / spacing;
  const int half = static_cast<int>(std::lround(cells));
  if (std::abs(cells - half) > 1e-9 * cells) fail("grid-invalid", "L must be an integer multiple of h");
  Grid1D g;
  g.length = half * spacing;
  g.spacing = spacing;
  g.half = half;
  return g;
}

const char* to_string(TwistFamily family) {
  switch (family) {
    case TwistFamily::zero: return "zero";
    case TwistFamily::constant_rate: return "constant_rate";
    case TwistFamily::compact_bump: return "compact_bump";
  }
  return "?";
}

TwistFamily twist_from_string(const std::string& name) {
  if (name == "zero") return TwistFamily::zero;
  if (name == "constant_rate") return TwistFamily::constant_rate;
  if (name == "compact_bump") return TwistFamily::compact_bump;
  fail("twist-invalid", "unknown twist family '" + name + "'");
}

TwistProfile TwistProfile::constant(double r) {
  TwistProfile t;
  t.family = TwistFamily::constant_rate;
  t.rate = r;
  return t;
}

TwistProfile TwistProfile::bump(double amplitude, double support) {
  if (!(support > 0)) fail("twist-invalid", "bump support must be positive");
  TwistProfile t;
  t.family = TwistFamily::compact_bump;
  t.amplitude = amplitude;
  t.support = support;
  return t;
}

double TwistProfile::derivative(double x) const {
  switch (family) {
    case TwistFamily::zero: return 0;
    case TwistFamily::constant_rate: return rate;
    case TwistFamily::compact_bump: {
      const double s = x / support;
      if (std::abs(s) >= 1) return 0;
      return amplitude * (1 - s * s) * (1 - s * s);
    }
  }
  return 0;
}

double TwistProfile::angle(double x) const {
  switch (family) {
    case TwistFamily::zero: return 0;
    case TwistFamily::constant_rate: return rate * x;
    case TwistFamily::compact_bump: {
      const double s = std::clamp(x / support, -1.0, 1.0);
      return amplitude * support * (s - 2 * s * s * s / 3 + s * s * s * s * s / 5);
    }
  }
  return 0;
}

double TwistProfile::sup_norm() const {
  switch (family) {
    case TwistFamily::zero: return 0;
    case TwistFamily::constant_rate: return std::abs(rate);
    case TwistFamily::compact_bump: return std::abs(amplitude);
  }
  return 0;
}

SparseOperator Operator1D::op() const {
  SparseOperator o;
  o.matrix = tridiagonal_matrix(diag, off);
  o.weights = Vec::Constant(grid.size(), grid.spacing);
  return o;
}

std::vector<double> Operator1D::eigenvalues(int count) const {
  return tridiagonal_eigenvalues(diag, off, count);
}

namespace {

// Kinetic part of the three-point stencil with Dirichlet points at distance
// offset*h / (1-offset)*h from the nodes next to the origin and the ends.
void kinetic(const Grid1D& g, bool dirichlet_origin, Vec& diag, Vec& off) {
  const int n = g.size();
  const double h = g.spacing;
  diag = Vec::Constant(n, 2.0 / (h * h));
  off = Vec::Constant(n - 1, -1.0 / (h * h));
  const double end_gap = (1 - g.offset) * h;
  diag[n - 1] = 1.0 / (h * h) + 1.0 / (h * end_gap);
  diag[0] = 1.0 / (h * h) + 1.0 / (h * g.offset * h);
  if (dirichlet_origin) {
    const int l = g.half - 1, r = g.half;
    off[l] = 0;
    diag[l] = 1.0 / (h * h) + 1.0 / (h * std::abs(g.node(l)));
    diag[r] = 1.0 / (h * h) + 1.0 / (h * std::abs(g.node(r)));
  }
}

}  // namespace

Operator1D assemble_HD(double kappa, const Grid1D& grid, const TwistProfile& twist, double C_S) {
  for (int i = 0; i < grid.size(); ++i)
    if (grid.node(i) == 0.0) fail("origin-on-grid", "grid node at x = 0");
  Operator1D o;
  o.grid = grid;
  o.kappa = kappa;
  o.twist_C_S = C_S;
  o.dirichlet_at_origin = true;
  kinetic(grid, true, o.diag, o.off);
  o.potential.resize(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    const double a = twist.derivative(x);
    o.potential[i] = -kappa / std::abs(x) + a * a * C_S;
  }
  o.diag += o.potential;
  return o;
}

PotentialDensity make_density(const TransverseModes& modes, const GridMesh2D& mesh) {
  PotentialDensity d;
  d.radius = (mesh.y1.cwiseAbs2() + mesh.y2.cwiseAbs2()).cwiseSqrt();
  d.mass = mesh.weights.cwiseProduct(modes.u0.cwiseAbs2());
  return d;
}

PotentialDensity make_density(const TransverseBasis& basis) {
  return {basis.radius, basis.weights.cwiseProduct(basis.u0.cwiseAbs2())};
}

void check_delta(double delta) {
  if (!(delta > 0 && delta < 0.5)) fail("delta-range", "requires 0 < delta < 1/2");
}

double eval_V_eps(double x, double kappa, double eps, double delta, const PotentialDensity& density) {
  check_delta(delta);
  if (!(eps > 0)) fail("epsilon-range", "requires eps > 0");
  if (kappa == 0) return 0;
  const double a = std::pow(eps, delta);
  double s = 0;
  for (Eigen::Index k = 0; k < density.mass.size(); ++k) {
    const double er = eps * density.radius[k];
    s += density.mass[k] / (std::sqrt(x * x + er * er) + a);
  }
  return -kappa * s;
}

double eval_V_eps(double x, double kappa, double eps, double delta, const TransverseModes& modes,
                  const GridMesh2D& mesh) {
  return eval_V_eps(x, kappa, eps, delta, make_density(modes, mesh));
}

Operator1D assemble_T_eps(double kappa, double eps, double delta, double c, const Grid1D& grid,
                          const PotentialDensity& density) {
  check_delta(delta);
  if (!(eps > 0 && eps <= 1)) fail("epsilon-range", "requires 0 < eps <= 1");
  if (kappa > 0 && !(c > kappa)) fail("shift-too-small", "requires c > kappa");
  Operator1D o;
  o.grid = grid;
  o.kappa = kappa;
  o.epsilon = eps;
  o.delta = delta;
  o.shift_c = c;
  o.dirichlet_at_origin = false;
  kinetic(grid, false, o.diag, o.off);
  const double shift = c / std::pow(eps, delta);
  o.potential.resize(grid.size());
  for (int i = 0; i < grid.size(); ++i)
    o.potential[i] = eval_V_eps(grid.node(i), kappa, eps, delta, density) + shift;
  o.diag += o.potential;
  return o;
}

Operator1D assemble_T_eps(double kappa, double eps, double delta, double c, const Grid1D& grid,
                          const TransverseModes& modes, const GridMesh2D& mesh) {
  return assemble_T_eps(kappa, eps, delta, c, grid, make_density(modes, mesh));
}

double hardy_check(const Vec& w, const Grid1D& grid) {
  const int n = grid.size();
  if (w.size() != n) fail("size-mismatch", "w must be sampled on the grid");
  const double h = grid.spacing;
  double lhs = 0, rhs = 0;
  for (int i = 0; i < n; ++i) {
    const double x = grid.node(i);
    lhs += h * w[i] * w[i] / (x * x);
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (i == grid.half - 1) continue;
    rhs += (w[i + 1] - w[i]) * (w[i + 1] - w[i]) / h;
  }
  const int l = grid.half - 1, r = grid.half;
  rhs += w[l] * w[l] / std::abs(grid.node(l)) + w[r] * w[r] / std::abs(grid.node(r));
  rhs += w[0] * w[0] / (grid.node(0) + grid.length) + w[n - 1] * w[n - 1] / (grid.length - grid.node(n - 1));
  if (rhs == 0) return 0;
  return lhs / (4 * rhs);
}

}  // namespace tubelab
