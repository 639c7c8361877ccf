#include "fermi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>

namespace fermi {

namespace detail {
std::uint64_t next_mesh_id();
TriMesh mesh_from_tree(std::shared_ptr<RefinementTree> tree, const Rect& domain);
}  // namespace detail

int RefinementTree::add_point(const Point& p) {
  points.push_back(p);
  mid_parent_.emplace_back();
  return static_cast<int>(points.size()) - 1;
}

int RefinementTree::midpoint(int a, int b) const {
  auto it = mid_.find({std::min(a, b), std::max(a, b)});
  return it == mid_.end() ? -1 : it->second;
}

int RefinementTree::add_midpoint(int a, int b) {
  const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
  if (auto it = mid_.find(key); it != mid_.end()) return it->second;
  const int m = add_point(0.5 * (points[a] + points[b]));
  mid_.emplace(key, m);
  mid_parent_[m] = key;
  return m;
}

std::optional<std::array<int, 2>> RefinementTree::midpoint_parent(int p) const {
  return mid_parent_.at(p);
}

void RefinementTree::red_refine(int node) {
  if (!nodes[node].is_leaf()) return;
  const Triangle v = nodes[node].v;
  const int m01 = add_midpoint(v[0], v[1]);
  const int m12 = add_midpoint(v[1], v[2]);
  const int m20 = add_midpoint(v[2], v[0]);
  const std::array<Triangle, 4> kids{{{v[0], m01, m20},
                                      {m01, v[1], m12},
                                      {m20, m12, v[2]},
                                      {m12, m20, m01}}};
  const int level = nodes[node].level + 1;
  for (int k = 0; k < 4; ++k) {
    Node child;
    child.v = kids[k];
    child.level = level;
    child.parent = node;
    nodes[node].children[k] = static_cast<int>(nodes.size());
    nodes.push_back(child);
  }
}

std::vector<int> RefinementTree::leaves() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
    if (nodes[i].is_leaf()) out.push_back(i);
  return out;
}

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (c.x() - a.x()) * (b.y() - a.y()));
}

double triangle_area(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  return signed_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                     mesh.vertices[tri[2]]);
}

TriMesh build_initial_mesh(const Rect& domain, int target_elements) {
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw std::invalid_argument("build_initial_mesh: degenerate domain");
  if (target_elements < 2)
    throw std::invalid_argument("build_initial_mesh: target_elements < 2");

  const double aspect = domain.width() / domain.height();
  const int nx = std::max(
      1, static_cast<int>(std::lround(std::sqrt(0.5 * target_elements * aspect))));
  const int ny = std::max(
      1, static_cast<int>(std::lround(0.5 * target_elements / nx)));

  std::vector<double> ys(nx + 1), etas(ny + 1);
  for (int i = 0; i <= nx; ++i) ys[i] = domain.y_min + domain.width() * i / nx;
  for (int j = 0; j <= ny; ++j) etas[j] = domain.eta_min + domain.height() * j / ny;
  // Hit the rectangle corners exactly.
  ys.back() = domain.y_max;
  etas.back() = domain.eta_max;
  return build_grid_mesh(ys, etas);
}

TriMesh build_grid_mesh(const std::vector<double>& ys, const std::vector<double>& etas) {
  if (ys.size() < 2 || etas.size() < 2)
    throw std::invalid_argument("build_grid_mesh: need at least two lines per axis");
  auto increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  if (!increasing(ys) || !increasing(etas))
    throw std::invalid_argument("build_grid_mesh: grid lines must increase strictly");
  const int nx = static_cast<int>(ys.size()) - 1;
  const int ny = static_cast<int>(etas.size()) - 1;
  const Rect domain{ys.front(), ys.back(), etas.front(), etas.back()};

  auto tree = std::make_shared<RefinementTree>();
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) tree->add_point(Point(ys[i], etas[j]));
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      RefinementTree::Node lower, upper;
      lower.v = {id(i, j), id(i + 1, j), id(i + 1, j + 1)};
      upper.v = {id(i, j), id(i + 1, j + 1), id(i, j + 1)};
      tree->nodes.push_back(lower);
      tree->nodes.push_back(upper);
    }
  }
  return detail::mesh_from_tree(std::move(tree), domain);
}

BoundaryTag classify_edge(Side side, double eta_mid) {
  switch (side) {
    case Side::y_min:  // n = (-1, 0), n . beta = -eta
      return eta_mid > 0.0 ? BoundaryTag::inflow : BoundaryTag::outflow;
    case Side::y_max:  // n = (1, 0), n . beta = eta
      return eta_mid < 0.0 ? BoundaryTag::inflow : BoundaryTag::outflow;
    case Side::eta_min:
    case Side::eta_max:
      return BoundaryTag::characteristic;
  }
  return BoundaryTag::characteristic;
}

namespace {

std::map<std::array<int, 2>, std::vector<int>> edge_incidence(const TriMesh& mesh) {
  std::map<std::array<int, 2>, std::vector<int>> edges;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      edges[{std::min(a, b), std::max(a, b)}].push_back(t);
    }
  }
  return edges;
}

std::optional<Side> side_of(const Rect& d, const Point& a, const Point& b) {
  const double ty = 1e-12 * d.width();
  const double te = 1e-12 * d.height();
  auto near = [](double u, double v, double tol) { return std::abs(u - v) <= tol; };
  if (near(a.x(), d.y_min, ty) && near(b.x(), d.y_min, ty)) return Side::y_min;
  if (near(a.x(), d.y_max, ty) && near(b.x(), d.y_max, ty)) return Side::y_max;
  if (near(a.y(), d.eta_min, te) && near(b.y(), d.eta_min, te)) return Side::eta_min;
  if (near(a.y(), d.eta_max, te) && near(b.y(), d.eta_max, te)) return Side::eta_max;
  return std::nullopt;
}

}  // namespace

void classify_boundary(TriMesh& mesh) {
  mesh.boundary_edges.clear();
  const auto edges = edge_incidence(mesh);
  // Walk triangles rather than the edge map so edges keep their CCW direction.
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      if (edges.at({std::min(a, b), std::max(a, b)}).size() != 1) continue;
      const Point& pa = mesh.vertices[a];
      const Point& pb = mesh.vertices[b];
      const auto side = side_of(mesh.domain, pa, pb);
      if (!side)
        throw std::logic_error("classify_boundary: boundary edge off the rectangle");
      const double eta_mid = 0.5 * (pa.y() + pb.y());
      mesh.boundary_edges.push_back({{a, b}, *side, classify_edge(*side, eta_mid)});
    }
  }
}

double min_angle(const Point& a, const Point& b, const Point& c) {
  auto angle = [](const Point& p, const Point& q, const Point& r) {
    const Point u = q - p, v = r - p;
    return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
  };
  const double m = std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
  return m * 180.0 / std::numbers::pi;
}

double min_angle(const TriMesh& mesh) {
  double m = 180.0;
  for (const auto& tri : mesh.triangles)
    m = std::min(m, min_angle(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                              mesh.vertices[tri[2]]));
  return m;
}

std::vector<bool> inflow_nodes(const TriMesh& mesh) {
  std::vector<bool> out(mesh.vertices.size(), false);
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != BoundaryTag::inflow) continue;
    out[e.v[0]] = true;
    out[e.v[1]] = true;
  }
  return out;
}

MeshAudit audit(const TriMesh& mesh) {
  MeshAudit out;
  double area = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double a = triangle_area(mesh, t);
    if (!(a > 0.0)) out.positive_orientation = false;
    area += a;
  }
  out.area_error = std::abs(area - mesh.domain.area()) / mesh.domain.area();
  // A hanging node leaves interior edges with a single incident triangle.
  for (const auto& [edge, tris] : edge_incidence(mesh)) {
    if (tris.size() > 2) out.conforming = false;
    if (tris.size() == 1 &&
        !side_of(mesh.domain, mesh.vertices[edge[0]], mesh.vertices[edge[1]]))
      out.conforming = false;
  }
  out.min_angle_deg = min_angle(mesh);
  return out;
}

}  // namespace fermi
