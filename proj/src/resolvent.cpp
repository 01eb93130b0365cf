#include "tubelab/resolvent.hpp"

#include <cmath>
#include <variant>

#include "tubelab/error.hpp"

namespace tubelab {

namespace {

/// Wraps a sparse direct factorization as an Eigen iterative-solver preconditioner.
template <typename Factor>
class FactorPreconditioner {
 public:
  using Scalar = typename Factor::Scalar;
  using StorageIndex = typename Factor::StorageIndex;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  FactorPreconditioner() = default;
  template <typename M>
  explicit FactorPreconditioner(const M& m) { compute(m); }

  template <typename M>
  FactorPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  FactorPreconditioner& factorize(const M& m) { return compute(m); }
  template <typename M>
  FactorPreconditioner& compute(const M& m) {
    factor_.compute(m);
    return *this;
  }
  template <typename Rhs>
  Rhs solve(const Rhs& b) const {
    return factor_.solve(b);
  }
  Eigen::ComputationInfo info() { return factor_.info(); }

 private:
  Factor factor_;
};

using RealSolver = Eigen::BiCGSTAB<SpMat, FactorPreconditioner<Eigen::SimplicialLDLT<SpMat>>>;
using ComplexSolver =
    Eigen::BiCGSTAB<SpMatC, FactorPreconditioner<Eigen::SparseLU<SpMatC, Eigen::COLAMDOrdering<int>>>>;

}  // namespace

struct Resolvent::Impl {
  SpMat real_matrix;
  SpMatC complex_matrix;
  std::unique_ptr<RealSolver> real;
  std::unique_ptr<ComplexSolver> complex;
  ResolventOptions opt;
};

Resolvent::Resolvent(const SparseOperator& op, std::complex<double> z, ResolventOptions opt)
    : impl_(std::make_unique<Impl>()), z_(z) {
  impl_->opt = opt;
  const Eigen::Index n = op.size();
  SpMat eye(n, n);
  eye.setIdentity();
  if (z.imag() == 0) {
    impl_->real_matrix = op.matrix - z.real() * eye;
    impl_->real = std::make_unique<RealSolver>();
    impl_->real->setTolerance(opt.rtol);
    impl_->real->setMaxIterations(opt.max_iterations);
    impl_->real->compute(impl_->real_matrix);
    if (impl_->real->preconditioner().info() != Eigen::Success)
      fail("linear-solve-stall", "factorization of (S - z) failed");
  } else {
    SpMatC eyec = eye.cast<std::complex<double>>();
    impl_->complex_matrix = op.matrix.cast<std::complex<double>>() - z * eyec;
    impl_->complex_matrix.makeCompressed();
    impl_->complex = std::make_unique<ComplexSolver>();
    impl_->complex->setTolerance(opt.rtol);
    impl_->complex->setMaxIterations(opt.max_iterations);
    impl_->complex->compute(impl_->complex_matrix);
    if (impl_->complex->preconditioner().info() != Eigen::Success)
      fail("linear-solve-stall", "factorization of (S - z) failed");
  }
}

Resolvent::~Resolvent() = default;
Resolvent::Resolvent(Resolvent&&) noexcept = default;
Resolvent& Resolvent::operator=(Resolvent&&) noexcept = default;

ResolventSolve Resolvent::solve(const VecC& theta) const {
  ResolventSolve out;
  out.shift = z_;
  const double tnorm = theta.norm();
  if (tnorm == 0) {
    out.psi = VecC::Zero(theta.size());
    return out;
  }
  if (impl_->real) {
    const Vec re = theta.real(), im = theta.imag();
    Vec xr = Vec::Zero(re.size()), xi = Vec::Zero(im.size());
    if (re.norm() > 0) {
      xr = impl_->real->solve(re);
      out.iterations += static_cast<int>(impl_->real->iterations());
    }
    if (im.norm() > 0) {
      xi = impl_->real->solve(im);
      out.iterations += static_cast<int>(impl_->real->iterations());
    }
    out.psi = xr.cast<std::complex<double>>() + std::complex<double>(0, 1) * xi.cast<std::complex<double>>();
    const VecC r = theta - impl_->real_matrix.cast<std::complex<double>>() * out.psi;
    out.residual = r.norm() / tnorm;
  } else {
    out.psi = impl_->complex->solve(theta);
    out.iterations = static_cast<int>(impl_->complex->iterations());
    const VecC r = theta - impl_->complex_matrix * out.psi;
    out.residual = r.norm() / tnorm;
  }
  out.history.push_back(out.residual);
  if (!(out.residual <= impl_->opt.rtol))
    fail("linear-solve-stall", "relative residual " + std::to_string(out.residual) + " after " +
                                   std::to_string(out.iterations) + " iterations");
  return out;
}

ResolventSolve apply_resolvent(const SparseOperator& op, std::complex<double> z, const VecC& theta,
                               ResolventOptions opt) {
  return Resolvent(op, z, opt).solve(theta);
}

}  // namespace tubelab
