#include "tubelab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/SparseCholesky>

#include "tubelab/error.hpp"

namespace tubelab {

double SparseOperator::form(const Vec& psi) const {
  Vec v = to_scaled(psi);
  return v.dot(matrix * v);
}

SparseOperator from_form(const SpMat& form_matrix, const Vec& weights) {
  Vec inv_sqrt = weights.cwiseSqrt().cwiseInverse();
  SparseOperator op;
  op.matrix = inv_sqrt.asDiagonal() * form_matrix * inv_sqrt.asDiagonal();
  op.matrix.makeCompressed();
  op.weights = weights;
  return op;
}

Vec random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

EigenPairs lowest_eigenpairs(const SpMat& a, int count, double shift, std::uint64_t seed,
                             const Projector& project, double tol, int max_steps) {
  const Eigen::Index n = a.rows();
  if (count < 1 || count > n) fail("eigensolver-stall", "requested count out of range");
  SpMat shifted = a;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= shift;
  Eigen::SimplicialLDLT<SpMat> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) fail("eigensolver-stall", "factorization of shifted matrix failed");

  const int steps_cap = static_cast<int>(std::min<Eigen::Index>(max_steps, n));
  std::vector<Vec> basis;
  std::vector<double> alpha, beta;

  Vec q = random_vector(n, seed);
  if (project) project(q);
  double qn = q.norm();
  if (qn == 0) fail("eigensolver-stall", "start vector vanishes in the requested sector");
  basis.push_back(q / qn);

  Vec ritz;
  Eigen::MatrixXd ritz_vectors;
  double last_residual = std::numeric_limits<double>::infinity();
  bool done = false;
  int k = 0;
  for (; k < steps_cap && !done; ++k) {
    Vec w = ldlt.solve(basis[k]);
    if (project) project(w);
    const double ak = basis[k].dot(w);
    alpha.push_back(ak);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) w -= b.dot(w) * b;
    const double bk = w.norm();
    beta.push_back(bk);

    const int m = k + 1;
    const bool exhausted = bk <= 1e-13 * std::abs(ak) || m == steps_cap;
    if (m >= count && (m % 4 == 0 || exhausted)) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      // largest theta <-> lowest eigenvalue above the shift
      ritz.resize(count);
      ritz_vectors.resize(m, count);
      last_residual = 0;
      for (int i = 0; i < count; ++i) {
        const int col = m - 1 - i;
        ritz[i] = es.eigenvalues()[col];
        ritz_vectors.col(i) = es.eigenvectors().col(col);
        const double r = std::abs(bk * es.eigenvectors()(m - 1, col));
        last_residual = std::max(last_residual, r / std::max(std::abs(ritz[i]), 1e-300));
      }
      if (last_residual <= tol || (exhausted && bk <= 1e-13 * std::abs(ak))) done = true;
    }
    if (!done) {
      if (bk == 0) break;
      basis.push_back(w / bk);
    }
  }
  if (!done) fail("eigensolver-stall", "Lanczos residual " + std::to_string(last_residual) +
                                           " after " + std::to_string(k) + " steps");

  EigenPairs out;
  out.iterations = k;
  out.values.resize(count);
  out.vectors.resize(n, count);
  for (int i = 0; i < count; ++i) {
    if (!(ritz[i] > 0)) fail("eigensolver-stall", "shift lies above a wanted eigenvalue");
    out.values[i] = shift + 1.0 / ritz[i];
    Vec x = Vec::Zero(n);
    for (Eigen::Index j = 0; j < ritz_vectors.rows(); ++j) x += ritz_vectors(j, i) * basis[j];
    out.vectors.col(i) = x / x.norm();
  }
  out.residual = 0;
  for (int i = 0; i < count; ++i) {
    Vec x = out.vectors.col(i);
    Vec r = a * x - out.values[i] * x;
    out.residual = std::max(out.residual, r.norm() / std::max(1.0, std::abs(out.values[i])));
  }
  return out;
}

int sturm_count(const Vec& diag, const Vec& off, double x) {
  const Eigen::Index n = diag.size();
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  int count = 0;
  double q = diag[0] - x;
  for (Eigen::Index i = 0;; ++i) {
    if (q == 0) q = -tiny;
    if (q < 0) ++count;
    if (i + 1 == n) break;
    q = diag[i + 1] - x - off[i] * off[i] / q;
  }
  return count;
}

std::vector<double> tridiagonal_eigenvalues(const Vec& diag, const Vec& off, int count) {
  const Eigen::Index n = diag.size();
  if (count > n) count = static_cast<int>(n);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = 0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  std::vector<double> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    double a = lo, b = hi;
    for (int it = 0; it < 300; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (sturm_count(diag, off, mid) > k)
        b = mid;
      else
        a = mid;
    }
    out.push_back(0.5 * (a + b));
    lo = a;
  }
  return out;
}

Vec tridiagonal_eigenvector(const Vec& diag, const Vec& off, double lambda, std::uint64_t seed) {
  const Eigen::Index n = diag.size();
  const double perturb = 1e-10 * std::max(1.0, std::abs(lambda));
  SpMat t = tridiagonal_matrix(diag, off);
  for (Eigen::Index i = 0; i < n; ++i) t.coeffRef(i, i) -= lambda + perturb;
  Eigen::SparseLU<SpMat> lu(t);
  if (lu.info() != Eigen::Success) fail("eigensolver-stall", "inverse iteration factorization failed");
  Vec x = random_vector(n, seed);
  x.normalize();
  for (int it = 0; it < 4; ++it) {
    x = lu.solve(x);
    x.normalize();
  }
  return x;
}

SpMat tridiagonal_matrix(const Vec& diag, const Vec& off) {
  const Eigen::Index n = diag.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    trip.emplace_back(i, i, diag[i]);
    if (i + 1 < n && off[i] != 0) {
      trip.emplace_back(i, i + 1, off[i]);
      trip.emplace_back(i + 1, i, off[i]);
    }
  }
  SpMat m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace tubelab
