#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Sparse>

namespace fermi {

/// A linear solve that broke down or missed its residual target.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (relative residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Factorise once, solve many times. Sparse LU up to `direct_limit` unknowns,
/// BiCGSTAB with a Jacobi preconditioner above. Every solve checks the
/// relative residual against `tol`.
class LinearSolver {
 public:
  static constexpr int direct_limit = 200000;

  LinearSolver(const Eigen::SparseMatrix<double>& K, double tol);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  bool direct() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& K,
                             const Eigen::VectorXd& rhs, double tol);

}  // namespace fermi
