#include "fermi/locate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fermi {

Eigen::Vector3d barycentric(const Point& a, const Point& b, const Point& c,
                            const Point& p) {
  const double area = signed_area(a, b, c);
  return Eigen::Vector3d(signed_area(p, b, c), signed_area(a, p, c),
                         signed_area(a, b, p)) /
         area;
}

PointLocator::PointLocator(const TriMesh& mesh, int buckets_per_side)
    : mesh_(&mesh), n_(buckets_per_side) {
  if (n_ <= 0)
    n_ = std::max(1, static_cast<int>(std::sqrt(mesh.num_triangles() / 2.0)));
  buckets_.resize(static_cast<std::size_t>(n_) * n_);
  const Rect& d = mesh.domain;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    double y0 = 1e300, y1 = -1e300, e0 = 1e300, e1 = -1e300;
    for (int v : tri) {
      y0 = std::min(y0, mesh.vertices[v].x());
      y1 = std::max(y1, mesh.vertices[v].x());
      e0 = std::min(e0, mesh.vertices[v].y());
      e1 = std::max(e1, mesh.vertices[v].y());
    }
    const int i0 = bucket(y0, d.y_min, d.width()), i1 = bucket(y1, d.y_min, d.width());
    const int j0 = bucket(e0, d.eta_min, d.height()),
              j1 = bucket(e1, d.eta_min, d.height());
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[j * n_ + i].push_back(t);
  }
}

int PointLocator::bucket(double u, double lo, double width) const {
  const int i = static_cast<int>(std::floor((u - lo) / width * n_));
  return std::clamp(i, 0, n_ - 1);
}

std::optional<Location> PointLocator::locate(const Point& p) const {
  const Rect& d = mesh_->domain;
  const double tol = 1e-12;
  if (p.x() < d.y_min - tol * d.width() || p.x() > d.y_max + tol * d.width() ||
      p.y() < d.eta_min - tol * d.height() || p.y() > d.eta_max + tol * d.height())
    return std::nullopt;
  const int i = bucket(p.x(), d.y_min, d.width());
  const int j = bucket(p.y(), d.eta_min, d.height());
  std::optional<Location> best;
  double best_min = -1e300;
  for (int t : buckets_[j * n_ + i]) {
    const auto& tri = mesh_->triangles[t];
    const Eigen::Vector3d lam = barycentric(
        mesh_->vertices[tri[0]], mesh_->vertices[tri[1]], mesh_->vertices[tri[2]], p);
    const double m = lam.minCoeff();
    if (m >= 0.0) return Location{t, lam};
    // Keep the least-outside candidate for points on shared edges.
    if (m > best_min) {
      best_min = m;
      best = Location{t, lam};
    }
  }
  if (best && best_min >= -tol) return best;
  return std::nullopt;
}

double PointLocator::evaluate(const Eigen::VectorXd& values, const Point& p) const {
  const auto loc = locate(p);
  if (!loc) throw std::out_of_range("PointLocator: point outside the mesh");
  const auto& tri = mesh_->triangles[loc->triangle];
  return loc->barycentric[0] * values[tri[0]] + loc->barycentric[1] * values[tri[1]] +
         loc->barycentric[2] * values[tri[2]];
}

Eigen::VectorXd transfer(const TriMesh& coarse, const Eigen::VectorXd& coarse_values,
                         const TriMesh& fine) {
  const PointLocator locator(coarse);
  Eigen::VectorXd out(fine.num_vertices());
  for (int v = 0; v < fine.num_vertices(); ++v)
    out[v] = locator.evaluate(coarse_values, fine.vertices[v]);
  return out;
}

}  // namespace fermi
