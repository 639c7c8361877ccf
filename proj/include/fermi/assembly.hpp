#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "fermi/mesh.hpp"

namespace fermi {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Physical and stabilisation parameters of the bilinear forms.
struct FormConfig {
  double sigma_tr = 0.002;
  /// Streamline-diffusion weight; unset means sqrt(sigma_tr).
  std::optional<double> delta;
  /// Omit every term carrying the product delta * sigma_tr.
  bool drop_delta_sigma = true;

  double effective_delta() const { return delta.value_or(std::sqrt(sigma_tr)); }
  void validate() const;
};

// Element matrices use the degree-4 six-point rule. Entry (i, j) pairs test
// function phi_i with trial function phi_j.

/// M_ij = (phi_j, phi_i).
SparseMatrix mass_matrix(const TriMesh& mesh);
/// C_ij = (eta d_y phi_j, phi_i).
SparseMatrix convection_matrix(const TriMesh& mesh);
/// (eta d_y phi_j, eta d_y phi_i).
SparseMatrix streamline_matrix(const TriMesh& mesh);
/// S_ij = (d_eta phi_j, d_eta phi_i).
SparseMatrix eta_stiffness(const TriMesh& mesh);
/// (phi_j, eta d_y phi_i); the transpose of convection_matrix.
SparseMatrix b_cross_matrix(const TriMesh& mesh);

/// (d_eta phi_j, d_y phi_i), the interior delta*sigma_tr coupling.
SparseMatrix eta_y_cross_matrix(const TriMesh& mesh);
/// Line integral over eta = +-eta0 of eta n_eta d_eta phi_j d_y phi_i.
SparseMatrix eta_boundary_matrix(const TriMesh& mesh);
/// Boundary mass weighted by n . beta, beta = (eta, 0).
SparseMatrix boundary_flux_matrix(const TriMesh& mesh);

/// (d_c phi_j, phi_i) for coordinate c in {0, 1}; spatial convection factor.
SparseMatrix gradient_matrix(const TriMesh& mesh, int component);
/// (x_c phi_j, phi_i): mass weighted by coordinate c.
SparseMatrix weighted_mass_matrix(const TriMesh& mesh, int component);
/// Full P1 stiffness (grad phi_j, grad phi_i).
SparseMatrix stiffness_matrix(const TriMesh& mesh);

struct SystemMatrices {
  SparseMatrix A;
  SparseMatrix B;
};

/// Semi-discrete system B U' + A U = 0 of the (semi-)streamline diffusion forms.
/// delta = 0 gives standard Galerkin.
SystemMatrices assemble_system(const TriMesh& mesh, const FormConfig& cfg);

/// System with strongly imposed homogeneous inflow data: constrained rows of
/// A are zero and constrained rows of B are unit rows, so B + k A carries an
/// identity row. The stepping right-hand side must be zeroed on those rows.
struct InflowSystem {
  SparseMatrix A;
  SparseMatrix B;
  std::vector<int> constrained;
  std::vector<bool> mask;
};

InflowSystem apply_inflow_bc(SparseMatrix A, SparseMatrix B, const TriMesh& mesh);
InflowSystem apply_inflow_bc(SparseMatrix A, SparseMatrix B, const std::vector<bool>& mask);

/// max |A_ij - A_ji| / max |A_ij|.
double symmetry_defect(const SparseMatrix& A);
bool all_finite(const SparseMatrix& A);

}  // namespace fermi
