#include "fermi/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

namespace fermi {

struct LinearSolver::Impl {
  Eigen::SparseMatrix<double> K;
  double tol;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu;
  std::unique_ptr<Eigen::BiCGSTAB<Eigen::SparseMatrix<double>,
                                  Eigen::DiagonalPreconditioner<double>>>
      krylov;
};

LinearSolver::LinearSolver(const Eigen::SparseMatrix<double>& K, double tol)
    : impl_(std::make_unique<Impl>()) {
  if (K.rows() != K.cols()) throw std::invalid_argument("LinearSolver: matrix not square");
  impl_->K = K;
  impl_->K.makeCompressed();
  impl_->tol = tol;
  if (K.rows() <= direct_limit) {
    impl_->lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    impl_->lu->analyzePattern(impl_->K);
    impl_->lu->factorize(impl_->K);
    if (impl_->lu->info() != Eigen::Success)
      throw SolverError("LinearSolver: sparse LU factorisation failed", 1.0);
  } else {
    impl_->krylov = std::make_unique<
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>>>();
    impl_->krylov->setTolerance(0.1 * tol);
    impl_->krylov->setMaxIterations(20000);
    impl_->krylov->compute(impl_->K);
  }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

bool LinearSolver::direct() const { return static_cast<bool>(impl_->lu); }

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != impl_->K.rows())
    throw std::invalid_argument("LinearSolver: right-hand side size mismatch");
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd x = impl_->lu ? Eigen::VectorXd(impl_->lu->solve(rhs))
                                : Eigen::VectorXd(impl_->krylov->solve(rhs));
  const double res = (impl_->K * x - rhs).norm() / bnorm;
  if (!std::isfinite(res) || res > impl_->tol)
    throw SolverError("LinearSolver: residual above tolerance", res);
  return x;
}

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& K,
                             const Eigen::VectorXd& rhs, double tol) {
  return LinearSolver(K, tol).solve(rhs);
}

}  // namespace fermi
