#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Sparse>

#include "fermi/assembly.hpp"
#include "fermi/mesh.hpp"

namespace fermi {

/// Sine-clustered velocity nodes sin(i pi / 2n), i = -n..n, on each axis.
struct VelocityGrid {
  int n = 1;
  std::vector<double> nodes;
  /// (eta_i, xi_j) with i fastest.
  std::vector<Point> points;
};

VelocityGrid velocity_grid(int n);
/// Structured P1 triangulation of the velocity square on the grid's nodes.
TriMesh velocity_mesh(const VelocityGrid& grid);

/// scale * (spatial (x) velocity) acting on flat vectors indexed s * Nv + v.
struct KronOperator {
  SparseMatrix spatial;
  SparseMatrix velocity;
  double scale = 1.0;

  Eigen::Index rows() const { return spatial.rows() * velocity.rows(); }
  Eigen::Index cols() const { return spatial.cols() * velocity.cols(); }
};

using KronSum = std::vector<KronOperator>;

/// Matrix-free (A (x) B) u = vec(B X A^T), X the Nv x Ns reshaping of u.
Eigen::VectorXd kron_apply(const KronOperator& K, const Eigen::VectorXd& u);
Eigen::VectorXd kron_apply(const KronSum& K, const Eigen::VectorXd& u);
/// Explicit sparse Kronecker product.
SparseMatrix kron(const KronOperator& K);
SparseMatrix kron(const KronSum& K);

/// Spatial factors on the (y, z) mesh.
struct SpatialOperators {
  SparseMatrix M, Cy, Cz;
};
/// Velocity factors on the (eta, xi) mesh: mass, eta- and xi-weighted mass, stiffness.
struct VelocityOperators {
  SparseMatrix M, M_eta, M_xi, S;
};

SpatialOperators spatial_operators(const TriMesh& spatial);
VelocityOperators velocity_operators(const TriMesh& velocity);

/// One trapezoidal step LHS U' = RHS U. Constrained entries (spatial boundary
/// node s with velocity v entering the domain) are pinned to zero.
struct Step3D {
  KronSum lhs;
  KronSum rhs;
  std::vector<bool> constrained;
  /// Explicit LHS with unit rows on constrained entries.
  SparseMatrix lhs_matrix;
};

Step3D assemble_3d_step(const SpatialOperators& spatial, const VelocityOperators& velocity,
                        const FormConfig& cfg, double k_m,
                        const std::vector<bool>& constrained = {});
Step3D assemble_3d_step(const TriMesh& spatial, const TriMesh& velocity,
                        const FormConfig& cfg, double k_m, bool impose_inflow = true);

/// Entries s * Nv + v with n(s) . v < 0 for some boundary side touching s.
std::vector<bool> inflow_mask_3d(const TriMesh& spatial, const TriMesh& velocity);

struct Run3DConfig {
  double k_m = 0.01;
  double L = 1.0;
  double solver_tol = 1e-10;
  bool impose_inflow = true;
  /// Spatial x velocity unknowns allowed.
  long max_dof = 50000;
};

struct Run3DResult {
  Eigen::VectorXd final;
  /// 1^T (M (x) M_v) U after each step, starting with U_0.
  std::vector<double> mass;
  int steps = 0;
};

Run3DResult run_3d(const TriMesh& spatial, const TriMesh& velocity, const FormConfig& cfg,
                   const Eigen::VectorXd& u0, const Run3DConfig& run);

/// exact_3d at every (spatial, velocity) node pair, flat.
Eigen::VectorXd sample_exact_3d(const TriMesh& spatial, const TriMesh& velocity, double x,
                                double sigma_tr);

/// (w^T (M (x) M_v) w)^{1/2}.
double l2_norm_3d(const TriMesh& spatial, const TriMesh& velocity, const Eigen::VectorXd& w);

}  // namespace fermi
