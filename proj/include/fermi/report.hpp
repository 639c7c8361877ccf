#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fermi/analytic.hpp"
#include "fermi/mesh.hpp"
#include "fermi/stepper.hpp"

namespace fermi {

/// Element quadrature for error integrals. Elements are split into 4^s
/// similar pieces until a piece is no wider than `resolution` times the
/// oracle's length scale, then integrated with a rule of `degree`.
struct ErrorQuadrature {
  int degree = 4;
  double resolution = 0.5;
  int max_subdivisions = 8;
};

/// ||u(x_eval, .) - scale * u_h||_{L2} over the mesh.
double l2_error(const TriMesh& mesh, const NodalField& U, const ExactSolution2D& oracle,
                double x_eval, const ErrorQuadrature& quad = {}, double scale = 1.0);

/// Same with an arbitrary oracle (no length scale; `subdivisions` fixed).
double l2_error(const TriMesh& mesh, const NodalField& U,
                const std::function<double(double, double)>& oracle, int degree = 4,
                int subdivisions = 0, double scale = 1.0);

/// Least-squares amplitude c minimising ||u - c u_h||.
double fit_amplitude(const TriMesh& mesh, const NodalField& U, const ExactSolution2D& oracle,
                     double x_eval, const ErrorQuadrature& quad = {});

/// ||U||_M.
double mass_norm(const TriMesh& mesh, const Eigen::VectorXd& U);
/// ||U_a - U_b||_{L2} for nested meshes, with U_a (coarse) evaluated on `fine`.
double l2_distance(const TriMesh& coarse, const Eigen::VectorXd& coarse_values,
                   const TriMesh& fine, const Eigen::VectorXd& fine_values);

/// (sum_m k int_{outflow} U_m^2 (n . beta) + sum_m k sigma ||d_eta U_m||^2)^{1/2}
/// over m = 1..M of a trajectory U_0..U_M.
double triple_norm(const TriMesh& mesh, const std::vector<NodalField>& trajectory,
                   double k_m, double sigma_tr);

struct ConvergenceRow {
  int n = 0;
  int elements = 0;
  int vertices = 0;
  int dof = 0;
  double e_n = 0.0;
  std::optional<double> ratio;
};

/// CSV with header `n,elements,vertices,dof,e_n,ratio`.
std::string format_table(const std::vector<ConvergenceRow>& rows);
void emit_table(const std::vector<ConvergenceRow>& rows, const std::filesystem::path& path);
std::vector<ConvergenceRow> parse_table(const std::string& csv);

/// Write-temp-then-rename.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Flat key=value record of a run: configuration, mesh lineage, rows, timings.
struct RunManifest {
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::uint64_t> mesh_ids;
  std::vector<std::string> mesh_files;
  std::vector<ConvergenceRow> rows;
  std::vector<std::pair<std::string, double>> timings;

  std::string format() const;
};

}  // namespace fermi
