#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fermi/assembly.hpp"
#include "fermi/locate.hpp"
#include "fermi/mesh.hpp"
#include "fermi/solver.hpp"

namespace fermi {

enum class Scheme { standard_galerkin, ssd, csd };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct MarchConfig {
  double k_m = 0.01;
  double L = 1.0;
  Scheme scheme = Scheme::ssd;
  double solver_tol = 1e-10;
  /// Homogeneous Dirichlet data on the inflow boundary. Off means free
  /// transport: characteristic feet outside I_y take the nearest boundary value.
  bool impose_inflow = true;
  /// Throw InvariantViolation when a stability audit fails.
  bool check_stability = true;

  void validate() const;
  int steps() const;
};

/// P1 coefficients tied to one mesh at one slab position.
struct NodalField {
  Eigen::VectorXd values;
  std::uint64_t mesh_id = 0;
  double x_level = 0.0;
};

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

NodalField interpolate(const TriMesh& mesh, const std::function<double(double, double)>& f,
                       double x_level = 0.0);

/// Form parameters actually used by a scheme (standard Galerkin has delta = 0).
FormConfig scheme_form(FormConfig form, Scheme scheme);

/// One backward-Euler step [B + k A] U' = B U with constrained rows zeroed.
class BackwardEuler {
 public:
  BackwardEuler(InflowSystem system, double k_m, double tol);
  NodalField step(const NodalField& U) const;
  const InflowSystem& system() const { return system_; }

 private:
  InflowSystem system_;
  double k_m_;
  LinearSolver solver_;
};

NodalField backward_euler_step(const InflowSystem& system, const NodalField& U,
                               double k_m, double tol = 1e-10);

/// Interpolation matrix of the exact shear (y, eta) -> (y - k eta, eta).
SparseMatrix characteristic_transport(const TriMesh& mesh, double k_m, bool impose_inflow);

/// One characteristic streamline diffusion slab: exact transport along
/// characteristics, then [M + k sigma/2 S] U' = M (T U).
class CsdStepper {
 public:
  CsdStepper(const TriMesh& mesh, const FormConfig& cfg, double k_m, bool impose_inflow,
             double tol);
  NodalField step(const NodalField& U) const;

 private:
  SparseMatrix mass_;
  SparseMatrix transport_;
  std::vector<bool> mask_;
  double k_m_;
  std::unique_ptr<LinearSolver> solver_;
};

NodalField csd_step(const TriMesh& mesh, const FormConfig& cfg, const NodalField& U,
                    double k_m, bool impose_inflow = true, double tol = 1e-10);

struct MarchOptions {
  /// x positions to record; each is matched to the nearest step.
  std::vector<double> snapshot_levels;
  bool keep_trajectory = false;
};

struct MarchResult {
  NodalField final;
  std::vector<NodalField> snapshots;
  /// U^0 ... U^M when requested.
  std::vector<NodalField> trajectory;
  /// ||U^m||_M^2 for m = 0..M.
  std::vector<double> mass_energy;
  /// ||U^m||_M^2 + delta/2 sigma_tr ||d_eta U^m||^2 for m = 0..M.
  std::vector<double> composite_energy;
  /// Largest relative growth of the audited norm over one step (<= 0 is stable).
  double max_growth = 0.0;
  int violations = 0;
};

MarchResult run_march(const TriMesh& mesh, const MarchConfig& march, const FormConfig& form,
                      const NodalField& u0, const MarchOptions& options = {});

}  // namespace fermi
