#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "tubelab/linalg.hpp"

namespace tubelab {

struct ResolventOptions {
  double rtol = 1e-9;
  int max_iterations = 200;
};

struct ResolventSolve {
  std::complex<double> shift;
  VecC psi;
  int iterations = 0;
  double residual = 0;
  std::vector<double> history;
};

/// (S - z)^{-1} for a SparseOperator in scaled coordinates. The shifted matrix
/// is factored once (LDL^T for real z, LU otherwise) and every solve runs
/// BiCGSTAB preconditioned by that factorization down to rtol.
class Resolvent {
 public:
  Resolvent(const SparseOperator& op, std::complex<double> z, ResolventOptions opt = {});
  ~Resolvent();
  Resolvent(Resolvent&&) noexcept;
  Resolvent& operator=(Resolvent&&) noexcept;

  ResolventSolve solve(const VecC& theta) const;
  VecC apply(const VecC& theta) const { return solve(theta).psi; }
  /// (S - conj(z))^{-1}; S is real symmetric.
  VecC apply_adjoint(const VecC& theta) const { return apply(theta.conjugate()).conjugate(); }
  std::complex<double> shift() const { return z_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::complex<double> z_;
};

ResolventSolve apply_resolvent(const SparseOperator& op, std::complex<double> z, const VecC& theta,
                               ResolventOptions opt = {});

}  // namespace tubelab
