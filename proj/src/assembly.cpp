#include "fermi/assembly.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "fermi/quadrature.hpp"

namespace fermi {

void FormConfig::validate() const {
  if (!(sigma_tr >= 0.0)) throw std::invalid_argument("FormConfig: sigma_tr must be >= 0");
  if (delta && !(*delta >= 0.0))
    throw std::invalid_argument("FormConfig: delta must be >= 0");
}

namespace {

/// Geometry of one P1 element: vertex coordinates, area and constant gradients.
struct Element {
  std::array<Point, 3> p;
  double area;
  Eigen::Matrix<double, 3, 2> grad;  // row i = grad lambda_i

  Element(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) p[k] = mesh.vertices[tri[k]];
    area = signed_area(p[0], p[1], p[2]);
    for (int i = 0; i < 3; ++i) {
      const Point& a = p[(i + 1) % 3];
      const Point& b = p[(i + 2) % 3];
      grad(i, 0) = (a.y() - b.y()) / (2.0 * area);
      grad(i, 1) = (b.x() - a.x()) / (2.0 * area);
    }
  }

  Point at(const Eigen::Vector3d& lambda) const {
    return lambda[0] * p[0] + lambda[1] * p[1] + lambda[2] * p[2];
  }
};

template <typename Local>
SparseMatrix assemble(const TriMesh& mesh, Local&& local) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Element e(mesh, t);
    const Eigen::Matrix3d K = local(e);
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], K(i, j));
  }
  SparseMatrix out(mesh.num_vertices(), mesh.num_vertices());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

/// sum_q w_q f(x_q) lambda(x_q) lambda(x_q)^T |T|
template <typename Weight>
Eigen::Matrix3d weighted_mass(const Element& e, Weight&& weight) {
  Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
  for (const auto& q : triangle_rule(4))
    K += q.weight * weight(e.at(q.lambda)) * q.lambda * q.lambda.transpose();
  return K * e.area;
}

/// sum_q w_q f(x_q) lambda_i(x_q) d_c lambda_j |T|
template <typename Weight>
Eigen::Matrix3d weighted_gradient(const Element& e, int c, Weight&& weight) {
  Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
  for (const auto& q : triangle_rule(4))
    K += q.weight * weight(e.at(q.lambda)) * q.lambda * e.grad.col(c).transpose();
  return K * e.area;
}

}  // namespace

SparseMatrix mass_matrix(const TriMesh& mesh) {
  return assemble(mesh, [](const Element& e) {
    return weighted_mass(e, [](const Point&) { return 1.0; });
  });
}

SparseMatrix convection_matrix(const TriMesh& mesh) {
  return assemble(mesh, [](const Element& e) {
    return weighted_gradient(e, 0, [](const Point& x) { return x.y(); });
  });
}

SparseMatrix streamline_matrix(const TriMesh& mesh) {
  return assemble(mesh, [](const Element& e) {
    double eta2 = 0.0;
    for (const auto& q : triangle_rule(4)) {
      const double eta = e.at(q.lambda).y();
      eta2 += q.weight * eta * eta;
    }
    const Eigen::Vector3d gy = e.grad.col(0);
    return Eigen::Matrix3d(eta2 * e.area * gy * gy.transpose());
  });
}

SparseMatrix eta_stiffness(const TriMesh& mesh) {
  return assemble(mesh, [](const Element& e) {
    const Eigen::Vector3d ge = e.grad.col(1);
    return Eigen::Matrix3d(e.area * ge * ge.transpose());
  });
}

SparseMatrix b_cross_matrix(const TriMesh& mesh) {
  return assemble(mesh, [](const Element& e) {
    return Eigen::Matrix3d(
        weighted_gradient(e, 0, [](const Point& x) { return x.y(); }).transpose());
  });
}

SparseMatrix eta_y_cross_matrix(const TriMesh& mesh) {
  return assemble(mesh, [](const Element& e) {
    return Eigen::Matrix3d(e.area * e.grad.col(0) * e.grad.col(1).transpose());
  });
}

SparseMatrix gradient_matrix(const TriMesh& mesh, int component) {
  return assemble(mesh, [component](const Element& e) {
    return weighted_gradient(e, component, [](const Point&) { return 1.0; });
  });
}

SparseMatrix weighted_mass_matrix(const TriMesh& mesh, int component) {
  return assemble(mesh, [component](const Element& e) {
    return weighted_mass(e, [component](const Point& x) { return x[component]; });
  });
}

SparseMatrix stiffness_matrix(const TriMesh& mesh) {
  return assemble(mesh, [](const Element& e) {
    return Eigen::Matrix3d(e.area * e.grad * e.grad.transpose());
  });
}

namespace {

/// Owning triangle and local edge index for every boundary edge.
std::vector<std::pair<int, int>> boundary_owners(const TriMesh& mesh) {
  std::map<std::array<int, 2>, std::pair<int, int>> directed;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k)
      directed[{mesh.triangles[t][k], mesh.triangles[t][(k + 1) % 3]}] = {t, k};
  std::vector<std::pair<int, int>> out;
  out.reserve(mesh.boundary_edges.size());
  for (const auto& e : mesh.boundary_edges) out.push_back(directed.at(e.v));
  return out;
}

}  // namespace

SparseMatrix eta_boundary_matrix(const TriMesh& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  const auto owners = boundary_owners(mesh);
  for (std::size_t b = 0; b < mesh.boundary_edges.size(); ++b) {
    const auto& edge = mesh.boundary_edges[b];
    if (edge.side != Side::eta_min && edge.side != Side::eta_max) continue;
    const double eta = mesh.vertices[edge.v[0]].y();
    const double n_eta = edge.side == Side::eta_max ? 1.0 : -1.0;
    const double len = (mesh.vertices[edge.v[1]] - mesh.vertices[edge.v[0]]).norm();
    const int t = owners[b].first;
    const Element e(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        triplets.emplace_back(tri[i], tri[j],
                              len * eta * n_eta * e.grad(j, 1) * e.grad(i, 0));
  }
  SparseMatrix out(mesh.num_vertices(), mesh.num_vertices());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SparseMatrix boundary_flux_matrix(const TriMesh& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& edge : mesh.boundary_edges) {
    if (edge.side == Side::eta_min || edge.side == Side::eta_max) continue;
    const double n_y = edge.side == Side::y_max ? 1.0 : -1.0;
    const Point& a = mesh.vertices[edge.v[0]];
    const Point& b = mesh.vertices[edge.v[1]];
    const double len = (b - a).norm();
    // n . beta = n_y eta is linear along the edge; 3-point Gauss is exact.
    Eigen::Matrix2d K = Eigen::Matrix2d::Zero();
    for (const auto& q : line_rule(3)) {
      const Eigen::Vector2d phi(1.0 - q.t, q.t);
      const double eta = (1.0 - q.t) * a.y() + q.t * b.y();
      K += q.weight * n_y * eta * phi * phi.transpose();
    }
    K *= len;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) triplets.emplace_back(edge.v[i], edge.v[j], K(i, j));
  }
  SparseMatrix out(mesh.num_vertices(), mesh.num_vertices());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SystemMatrices assemble_system(const TriMesh& mesh, const FormConfig& cfg) {
  cfg.validate();
  if (mesh.boundary_edges.empty())
    throw std::invalid_argument("assemble_system: mesh boundary is not classified");
  const double delta = cfg.effective_delta();
  const double sigma = cfg.sigma_tr;

  SystemMatrices out;
  out.A = convection_matrix(mesh) + 0.5 * sigma * eta_stiffness(mesh);
  out.B = mass_matrix(mesh);
  if (delta > 0.0) {
    out.A += delta * streamline_matrix(mesh);
    out.B += delta * b_cross_matrix(mesh);
    // (sigma u_eta, eta w_{y eta}) vanishes for P1, leaving these two.
    if (!cfg.drop_delta_sigma)
      out.A += 0.5 * delta * sigma *
               (eta_y_cross_matrix(mesh) - eta_boundary_matrix(mesh));
  }
  out.A.prune(0.0);
  out.B.prune(0.0);
  return out;
}

InflowSystem apply_inflow_bc(SparseMatrix A, SparseMatrix B, const std::vector<bool>& mask) {
  if (A.rows() != B.rows() || A.cols() != B.cols() ||
      static_cast<std::size_t>(A.rows()) != mask.size())
    throw std::invalid_argument("apply_inflow_bc: dimension mismatch");
  InflowSystem out;
  out.mask = mask;
  for (int i = 0; i < static_cast<int>(mask.size()); ++i)
    if (mask[i]) out.constrained.push_back(i);

  A.prune([&mask](Eigen::Index r, Eigen::Index, double) { return !mask[r]; });

  B.prune([&mask](Eigen::Index r, Eigen::Index, double) { return !mask[r]; });
  std::vector<Eigen::Triplet<double>> unit;
  for (int i : out.constrained) unit.emplace_back(i, i, 1.0);
  SparseMatrix identity_rows(B.rows(), B.cols());
  identity_rows.setFromTriplets(unit.begin(), unit.end());
  out.A = std::move(A);
  out.B = B + identity_rows;
  return out;
}

InflowSystem apply_inflow_bc(SparseMatrix A, SparseMatrix B, const TriMesh& mesh) {
  return apply_inflow_bc(std::move(A), std::move(B), inflow_nodes(mesh));
}

double symmetry_defect(const SparseMatrix& A) {
  const SparseMatrix At = A.transpose();
  const SparseMatrix D = A - At;
  double dmax = 0.0, amax = 0.0;
  for (int c = 0; c < D.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(D, c); it; ++it)
      dmax = std::max(dmax, std::abs(it.value()));
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it)
      amax = std::max(amax, std::abs(it.value()));
  return amax > 0.0 ? dmax / amax : 0.0;
}

bool all_finite(const SparseMatrix& A) {
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it)
      if (!std::isfinite(it.value())) return false;
  return true;
}

}  // namespace fermi
