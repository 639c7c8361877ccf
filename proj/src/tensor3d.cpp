#include "fermi/tensor3d.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fermi/analytic.hpp"
#include "fermi/solver.hpp"

namespace fermi {

VelocityGrid velocity_grid(int n) {
  if (n < 1) throw std::invalid_argument("velocity_grid: n must be >= 1");
  VelocityGrid g;
  g.n = n;
  for (int i = -n; i <= n; ++i) {
    // Pin the symmetric pairs and the endpoints exactly.
    double s = std::sin(std::abs(i) * std::numbers::pi / (2.0 * n));
    if (std::abs(i) == n) s = 1.0;
    g.nodes.push_back(i < 0 ? -s : s);
  }
  for (double xi : g.nodes)
    for (double eta : g.nodes) g.points.emplace_back(eta, xi);
  return g;
}

TriMesh velocity_mesh(const VelocityGrid& grid) { return build_grid_mesh(grid.nodes, grid.nodes); }

Eigen::VectorXd kron_apply(const KronOperator& K, const Eigen::VectorXd& u) {
  const Eigen::Index ns = K.spatial.cols(), nv = K.velocity.cols();
  if (u.size() != ns * nv) throw std::invalid_argument("kron_apply: dimension mismatch");
  const Eigen::Map<const Eigen::MatrixXd> X(u.data(), nv, ns);
  const Eigen::MatrixXd BX = K.velocity * X;
  const Eigen::MatrixXd Y = K.scale * (BX * K.spatial.transpose());
  return Eigen::Map<const Eigen::VectorXd>(Y.data(), Y.size());
}

Eigen::VectorXd kron_apply(const KronSum& K, const Eigen::VectorXd& u) {
  if (K.empty()) throw std::invalid_argument("kron_apply: empty sum");
  Eigen::VectorXd out = kron_apply(K.front(), u);
  for (std::size_t i = 1; i < K.size(); ++i) {
    if (K[i].rows() != out.size()) throw std::invalid_argument("kron_apply: term sizes differ");
    out += kron_apply(K[i], u);
  }
  return out;
}

namespace {

void append_kron(const KronOperator& K, std::vector<Eigen::Triplet<double>>& triplets) {
  const Eigen::Index nv_r = K.velocity.rows(), nv_c = K.velocity.cols();
  for (int a = 0; a < K.spatial.outerSize(); ++a)
    for (SparseMatrix::InnerIterator ia(K.spatial, a); ia; ++ia)
      for (int b = 0; b < K.velocity.outerSize(); ++b)
        for (SparseMatrix::InnerIterator ib(K.velocity, b); ib; ++ib)
          triplets.emplace_back(ia.row() * nv_r + ib.row(), ia.col() * nv_c + ib.col(),
                                K.scale * ia.value() * ib.value());
}

}  // namespace

SparseMatrix kron(const KronOperator& K) { return kron(KronSum{K}); }

SparseMatrix kron(const KronSum& K) {
  if (K.empty()) throw std::invalid_argument("kron: empty sum");
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& term : K) {
    if (term.rows() != K.front().rows() || term.cols() != K.front().cols())
      throw std::invalid_argument("kron: term sizes differ");
    append_kron(term, triplets);
  }
  SparseMatrix out(K.front().rows(), K.front().cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SpatialOperators spatial_operators(const TriMesh& spatial) {
  return {mass_matrix(spatial), gradient_matrix(spatial, 0), gradient_matrix(spatial, 1)};
}

VelocityOperators velocity_operators(const TriMesh& velocity) {
  return {mass_matrix(velocity), weighted_mass_matrix(velocity, 0),
          weighted_mass_matrix(velocity, 1), stiffness_matrix(velocity)};
}

Step3D assemble_3d_step(const SpatialOperators& sp, const VelocityOperators& ve,
                        const FormConfig& cfg, double k_m,
                        const std::vector<bool>& constrained) {
  cfg.validate();
  if (!(k_m >= 0.0)) throw std::invalid_argument("assemble_3d_step: k_m must be >= 0");
  const double c = 0.5 * k_m;
  const double d = 0.25 * cfg.sigma_tr * k_m;
  Step3D step;
  step.lhs = {{sp.M, ve.M, 1.0}, {sp.Cy, ve.M_eta, c}, {sp.Cz, ve.M_xi, c}, {sp.M, ve.S, d}};
  step.rhs = {{sp.M, ve.M, 1.0}, {sp.Cy, ve.M_eta, -c}, {sp.Cz, ve.M_xi, -c}, {sp.M, ve.S, -d}};

  const Eigen::Index n = step.lhs.front().rows();
  step.constrained = constrained.empty() ? std::vector<bool>(n) : constrained;
  if (static_cast<Eigen::Index>(step.constrained.size()) != n)
    throw std::invalid_argument("assemble_3d_step: constraint mask has the wrong size");
  SparseMatrix K = kron(step.lhs);
  K.prune([&](Eigen::Index r, Eigen::Index, double) { return !step.constrained[r]; });
  std::vector<Eigen::Triplet<double>> unit;
  for (Eigen::Index i = 0; i < n; ++i)
    if (step.constrained[i]) unit.emplace_back(i, i, 1.0);
  SparseMatrix pins(n, n);
  pins.setFromTriplets(unit.begin(), unit.end());
  step.lhs_matrix = K + pins;
  return step;
}

std::vector<bool> inflow_mask_3d(const TriMesh& spatial, const TriMesh& velocity) {
  const int nv = velocity.num_vertices();
  std::vector<bool> mask(static_cast<std::size_t>(spatial.num_vertices()) * nv, false);
  for (const auto& e : spatial.boundary_edges) {
    Point n = Point::Zero();
    switch (e.side) {
      case Side::y_min: n = Point(-1, 0); break;
      case Side::y_max: n = Point(1, 0); break;
      case Side::eta_min: n = Point(0, -1); break;
      case Side::eta_max: n = Point(0, 1); break;
    }
    for (int s : e.v)
      for (int v = 0; v < nv; ++v)
        if (n.dot(velocity.vertices[v]) < 0.0) mask[static_cast<std::size_t>(s) * nv + v] = true;
  }
  return mask;
}

Step3D assemble_3d_step(const TriMesh& spatial, const TriMesh& velocity,
                        const FormConfig& cfg, double k_m, bool impose_inflow) {
  return assemble_3d_step(spatial_operators(spatial), velocity_operators(velocity), cfg, k_m,
                          impose_inflow ? inflow_mask_3d(spatial, velocity)
                                        : std::vector<bool>{});
}

Run3DResult run_3d(const TriMesh& spatial, const TriMesh& velocity, const FormConfig& cfg,
                   const Eigen::VectorXd& u0, const Run3DConfig& run) {
  const long n = static_cast<long>(spatial.num_vertices()) * velocity.num_vertices();
  if (n > run.max_dof)
    throw std::invalid_argument("run_3d: " + std::to_string(n) +
                                " unknowns exceed the desk-scale cap of " +
                                std::to_string(run.max_dof));
  if (u0.size() != n) throw std::invalid_argument("run_3d: initial vector has the wrong size");
  if (!(run.k_m > 0.0) || !(run.L >= run.k_m))
    throw std::invalid_argument("run_3d: need 0 < k_m <= L");
  const double steps = run.L / run.k_m;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw std::invalid_argument("run_3d: L / k_m is not an integer");

  const Step3D step = assemble_3d_step(spatial, velocity, cfg, run.k_m, run.impose_inflow);
  const LinearSolver solver(step.lhs_matrix, run.solver_tol);
  const KronOperator mass{mass_matrix(spatial), mass_matrix(velocity), 1.0};
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  Run3DResult r;
  r.steps = static_cast<int>(std::lround(steps));
  Eigen::VectorXd U = u0;
  r.mass.push_back(ones.dot(kron_apply(mass, U)));
  for (int m = 0; m < r.steps; ++m) {
    Eigen::VectorXd rhs = kron_apply(step.rhs, U);
    for (long i = 0; i < n; ++i)
      if (step.constrained[i]) rhs[i] = 0.0;
    U = solver.solve(rhs);
    r.mass.push_back(ones.dot(kron_apply(mass, U)));
  }
  r.final = std::move(U);
  return r;
}

Eigen::VectorXd sample_exact_3d(const TriMesh& spatial, const TriMesh& velocity, double x,
                                double sigma_tr) {
  const int nv = velocity.num_vertices();
  Eigen::VectorXd out(static_cast<Eigen::Index>(spatial.num_vertices()) * nv);
  for (int s = 0; s < spatial.num_vertices(); ++s)
    for (int v = 0; v < nv; ++v) {
      const Point& p = spatial.vertices[s];
      const Point& w = velocity.vertices[v];
      out[static_cast<Eigen::Index>(s) * nv + v] =
          exact_3d(x, p.x(), p.y(), w.x(), w.y(), sigma_tr);
    }
  return out;
}

double l2_norm_3d(const TriMesh& spatial, const TriMesh& velocity, const Eigen::VectorXd& w) {
  const KronOperator mass{mass_matrix(spatial), mass_matrix(velocity), 1.0};
  return std::sqrt(std::max(0.0, w.dot(kron_apply(mass, w))));
}

}  // namespace fermi
