#include "fermi/stepper.hpp"

#include <algorithm>
#include <cmath>

namespace fermi {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::standard_galerkin: return "sg";
    case Scheme::ssd: return "ssd";
    case Scheme::csd: return "csd";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "sg" || s == "standard_galerkin") return Scheme::standard_galerkin;
  if (s == "ssd") return Scheme::ssd;
  if (s == "csd") return Scheme::csd;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

void MarchConfig::validate() const {
  if (!(k_m > 0.0)) throw std::invalid_argument("MarchConfig: k_m must be > 0");
  if (!(L >= k_m)) throw std::invalid_argument("MarchConfig: L must be >= k_m");
  if (!(solver_tol > 0.0 && solver_tol <= 1e-6))
    throw std::invalid_argument("MarchConfig: solver_tol must lie in (0, 1e-6]");
  const double n = L / k_m;
  if (std::abs(n - std::round(n)) > 1e-9)
    throw std::invalid_argument("MarchConfig: L / k_m is not an integer");
}

int MarchConfig::steps() const { return static_cast<int>(std::lround(L / k_m)); }

NodalField interpolate(const TriMesh& mesh, const std::function<double(double, double)>& f,
                       double x_level) {
  NodalField out;
  out.values.resize(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
    out.values[v] = f(mesh.vertices[v].x(), mesh.vertices[v].y());
  out.mesh_id = mesh.id;
  out.x_level = x_level;
  return out;
}

FormConfig scheme_form(FormConfig form, Scheme scheme) {
  if (scheme == Scheme::standard_galerkin) form.delta = 0.0;
  return form;
}

BackwardEuler::BackwardEuler(InflowSystem system, double k_m, double tol)
    : system_(std::move(system)),
      k_m_(k_m),
      solver_(SparseMatrix(system_.B + k_m * system_.A), tol) {}

NodalField BackwardEuler::step(const NodalField& U) const {
  if (U.values.size() != system_.B.cols())
    throw std::invalid_argument("backward_euler_step: field/system size mismatch");
  Eigen::VectorXd rhs = system_.B * U.values;
  for (int i : system_.constrained) rhs[i] = 0.0;
  NodalField out;
  out.values = solver_.solve(rhs);
  for (int i : system_.constrained) out.values[i] = 0.0;
  out.mesh_id = U.mesh_id;
  out.x_level = U.x_level + k_m_;
  return out;
}

NodalField backward_euler_step(const InflowSystem& system, const NodalField& U, double k_m,
                               double tol) {
  return BackwardEuler(system, k_m, tol).step(U);
}

SparseMatrix characteristic_transport(const TriMesh& mesh, double k_m, bool impose_inflow) {
  const PointLocator locator(mesh);
  const Rect& d = mesh.domain;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(3 * mesh.vertices.size());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Point& p = mesh.vertices[v];
    Point foot(p.x() - k_m * p.y(), p.y());
    if (foot.x() < d.y_min || foot.x() > d.y_max) {
      // The backward characteristic left I_y, so it entered through inflow.
      if (impose_inflow) continue;
      foot.x() = std::clamp(foot.x(), d.y_min, d.y_max);
    }
    const auto loc = locator.locate(foot);
    if (!loc) throw std::logic_error("csd: characteristic foot not located");
    const auto& tri = mesh.triangles[loc->triangle];
    for (int k = 0; k < 3; ++k)
      if (loc->barycentric[k] != 0.0) triplets.emplace_back(v, tri[k], loc->barycentric[k]);
  }
  SparseMatrix T(mesh.num_vertices(), mesh.num_vertices());
  T.setFromTriplets(triplets.begin(), triplets.end());
  return T;
}

CsdStepper::CsdStepper(const TriMesh& mesh, const FormConfig& cfg, double k_m,
                       bool impose_inflow, double tol)
    : mass_(mass_matrix(mesh)),
      transport_(characteristic_transport(mesh, k_m, impose_inflow)),
      mask_(impose_inflow ? inflow_nodes(mesh) : std::vector<bool>(mesh.vertices.size())),
      k_m_(k_m) {
  cfg.validate();
  const SparseMatrix diffusion = 0.5 * cfg.sigma_tr * eta_stiffness(mesh);
  const InflowSystem sys = apply_inflow_bc(diffusion, mass_, mask_);
  solver_ = std::make_unique<LinearSolver>(SparseMatrix(sys.B + k_m * sys.A), tol);
}

NodalField CsdStepper::step(const NodalField& U) const {
  if (U.values.size() != mass_.cols())
    throw std::invalid_argument("csd_step: field/mesh size mismatch");
  Eigen::VectorXd rhs = mass_ * (transport_ * U.values);
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i]) rhs[i] = 0.0;
  NodalField out;
  out.values = solver_->solve(rhs);
  out.mesh_id = U.mesh_id;
  out.x_level = U.x_level + k_m_;
  return out;
}

NodalField csd_step(const TriMesh& mesh, const FormConfig& cfg, const NodalField& U,
                    double k_m, bool impose_inflow, double tol) {
  return CsdStepper(mesh, cfg, k_m, impose_inflow, tol).step(U);
}

MarchResult run_march(const TriMesh& mesh, const MarchConfig& march, const FormConfig& form,
                      const NodalField& u0, const MarchOptions& options) {
  march.validate();
  if (u0.values.size() != mesh.num_vertices())
    throw std::invalid_argument("run_march: initial field does not match the mesh");
  const FormConfig f = scheme_form(form, march.scheme);
  f.validate();

  std::function<NodalField(const NodalField&)> step;
  std::unique_ptr<BackwardEuler> be;
  std::unique_ptr<CsdStepper> csd;
  if (march.scheme == Scheme::csd) {
    csd = std::make_unique<CsdStepper>(mesh, f, march.k_m, march.impose_inflow,
                                       march.solver_tol);
    step = [&](const NodalField& U) { return csd->step(U); };
  } else {
    SystemMatrices sys = assemble_system(mesh, f);
    const auto mask = march.impose_inflow ? inflow_nodes(mesh)
                                          : std::vector<bool>(mesh.vertices.size());
    be = std::make_unique<BackwardEuler>(
        apply_inflow_bc(std::move(sys.A), std::move(sys.B), mask), march.k_m,
        march.solver_tol);
    step = [&](const NodalField& U) { return be->step(U); };
  }

  const SparseMatrix M = mass_matrix(mesh);
  const SparseMatrix S = eta_stiffness(mesh);
  const double weight = 0.5 * f.effective_delta() * f.sigma_tr;
  auto energies = [&](const Eigen::VectorXd& u, MarchResult& r) {
    const double e = u.dot(M * u);
    r.mass_energy.push_back(e);
    r.composite_energy.push_back(e + weight * u.dot(S * u));
  };

  std::vector<int> snapshot_steps;
  for (double x : options.snapshot_levels)
    snapshot_steps.push_back(static_cast<int>(std::lround(x / march.k_m)));

  MarchResult r;
  NodalField U = u0;
  U.mesh_id = mesh.id;
  energies(U.values, r);
  if (options.keep_trajectory) r.trajectory.push_back(U);
  auto snap = [&](int m) {
    for (int s : snapshot_steps)
      if (s == m) r.snapshots.push_back(U);
  };
  snap(0);

  const int n = march.steps();
  const double slack = 10.0 * march.solver_tol;
  for (int m = 1; m <= n; ++m) {
    U = step(U);
    U.x_level = m * march.k_m;
    energies(U.values, r);
    if (options.keep_trajectory) r.trajectory.push_back(U);
    snap(m);

    // Standard Galerkin is audited in the M-norm, SSD in the composite norm.
    if (march.scheme == Scheme::csd) continue;
    const auto& audit = march.scheme == Scheme::ssd ? r.composite_energy : r.mass_energy;
    const double before = std::sqrt(audit[m - 1]);
    const double after = std::sqrt(audit[m]);
    const double growth = before > 0.0 ? (after - before) / before : after;
    r.max_growth = m == 1 ? growth : std::max(r.max_growth, growth);
    if (growth > slack) {
      ++r.violations;
      if (march.check_stability)
        throw InvariantViolation("run_march: " + to_string(march.scheme) +
                                 " stability violated at step " + std::to_string(m) +
                                 " (relative growth " + std::to_string(growth) + ")");
    }
  }
  U.x_level = march.L;
  r.final = U;
  return r;
}

}  // namespace fermi
