#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace tubelab {

using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<std::complex<double>>;
using Vec = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;

/// Symmetric discrete operator stored in L2-scaled coordinates.
///
/// A quadratic form psi^T K psi with nodal mass W is kept as
/// matrix = W^{-1/2} K W^{-1/2}; a nodal vector psi maps to v = sqrt(W) psi,
/// so Euclidean norms of v are L2 norms of psi.
struct SparseOperator {
  SpMat matrix;
  Vec weights;

  Eigen::Index size() const { return matrix.rows(); }
  Vec to_scaled(const Vec& psi) const { return psi.cwiseProduct(weights.cwiseSqrt()); }
  Vec to_nodal(const Vec& v) const { return v.cwiseQuotient(weights.cwiseSqrt()); }
  /// psi^T K psi for a nodal vector.
  double form(const Vec& psi) const;
};

SparseOperator from_form(const SpMat& form_matrix, const Vec& weights);

/// Uniform(-1,1) vector from a seeded 64-bit Mersenne twister.
Vec random_vector(Eigen::Index n, std::uint64_t seed);

struct EigenPairs {
  Vec values;
  Eigen::MatrixXd vectors;
  double residual = 0;
  int iterations = 0;
};

using Projector = std::function<void(Vec&)>;

/// Lowest `count` eigenpairs of a symmetric matrix by shift-invert Lanczos
/// with full reorthogonalization. `shift` must lie below or near the wanted
/// eigenvalues; `project` (optional) restricts the iteration to an invariant
/// subspace. Throws "eigensolver-stall" if the Ritz residuals do not settle.
EigenPairs lowest_eigenpairs(const SpMat& a, int count, double shift, std::uint64_t seed = 7,
                             const Projector& project = {}, double tol = 1e-11,
                             int max_steps = 300);

/// Number of eigenvalues of a symmetric tridiagonal matrix below x (Sturm count).
int sturm_count(const Vec& diag, const Vec& off, double x);

/// Lowest `count` eigenvalues of a symmetric tridiagonal matrix by bisection.
std::vector<double> tridiagonal_eigenvalues(const Vec& diag, const Vec& off, int count);

/// Eigenvector for a (converged) eigenvalue by inverse iteration.
Vec tridiagonal_eigenvector(const Vec& diag, const Vec& off, double lambda,
                            std::uint64_t seed = 11);

SpMat tridiagonal_matrix(const Vec& diag, const Vec& off);

}  // namespace tubelab
