#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "fermi/mesh.hpp"

namespace fermi {

struct Location {
  int triangle;
  Eigen::Vector3d barycentric;
};

/// Bucket-grid point location on a fixed mesh.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh, int buckets_per_side = 0);

  /// Triangle containing `p` (closed, with a 1e-12 barycentric tolerance).
  std::optional<Location> locate(const Point& p) const;

  /// Value of the P1 field `values` at `p`; throws std::out_of_range off-mesh.
  double evaluate(const Eigen::VectorXd& values, const Point& p) const;

  const TriMesh& mesh() const { return *mesh_; }

 private:
  int bucket(double u, double lo, double width) const;

  const TriMesh* mesh_;
  int n_;
  std::vector<std::vector<int>> buckets_;
};

Eigen::Vector3d barycentric(const Point& a, const Point& b, const Point& c,
                            const Point& p);

/// P1 interpolation of `coarse_values` (on `coarse`) at the vertices of `fine`.
Eigen::VectorXd transfer(const TriMesh& coarse, const Eigen::VectorXd& coarse_values,
                         const TriMesh& fine);

}  // namespace fermi
