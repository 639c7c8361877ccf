#pragma once

#include <functional>
#include <limits>
#include <set>
#include <vector>

#include "fermi/analytic.hpp"
#include "fermi/mesh.hpp"
#include "fermi/report.hpp"
#include "fermi/stepper.hpp"

namespace fermi {

struct AdaptConfig {
  double gamma_tilde = 0.5;
  int max_refinements = 4;
  /// Stop once ||u_h^n - u_h^{n-1}||_{L2} < tol.
  double tol = 0.0;
  /// Refine every element instead of marking (uniform sweeps).
  bool uniform = false;

  void validate() const;
};

/// max over vertices and barycentre of |u(x_eval) - scale * u_h|, per element.
std::vector<double> error_indicator(const TriMesh& mesh, const NodalField& U,
                                    const std::function<double(double, double)>& oracle,
                                    double scale = 1.0);
std::vector<double> error_indicator(const TriMesh& mesh, const NodalField& U,
                                    const ExactSolution2D& oracle, double x_eval,
                                    double scale = 1.0);

/// { t : eps(t) >= gamma * max eps }. All-zero indicators mark everything.
std::set<int> mark(const std::vector<double>& indicators, double gamma_tilde);

/// Vertices minus the inflow-constrained ones.
int count_dof(const TriMesh& mesh, bool impose_inflow);

struct ExperimentConfig {
  Rect domain;
  int initial_elements = 272;
  FormConfig form;
  MarchConfig march;
  AdaptConfig adapt;
  ErrorQuadrature quadrature;
  /// Report errors after the least-squares amplitude fit.
  bool fit_amplitude = false;
};

struct AdaptResult {
  std::vector<ConvergenceRow> rows;
  /// Errors before and after the amplitude fit, and the fitted amplitudes.
  std::vector<double> raw_errors;
  std::vector<double> fitted_errors;
  std::vector<double> amplitudes;
  /// ||u_h^n - u_h^{n-1}||; the first entry is ||u_h^0||.
  std::vector<double> distances;
  std::vector<std::set<int>> marked;
  std::vector<TriMesh> meshes;
  NodalField final;
  /// Worst per-step growth of the audited stability norm over all marches.
  double max_growth = 0.0;
  int violations = 0;
};

/// Solve, measure, mark, refine; repeat until the successive-solution
/// distance drops below tol or max_refinements is used up.
AdaptResult adaptive_loop(const ExperimentConfig& cfg, const InitialData& data);

}  // namespace fermi
