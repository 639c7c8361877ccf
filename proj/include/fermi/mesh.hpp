#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Core>

namespace fermi {

/// Axis-aligned rectangle I_y x I_eta in the transverse phase plane.
struct Rect {
  double y_min = -1.0;
  double y_max = 1.0;
  double eta_min = -1.0;
  double eta_max = 1.0;

  double width() const { return y_max - y_min; }
  double height() const { return eta_max - eta_min; }
  double area() const { return width() * height(); }
};

enum class BoundaryTag { inflow, outflow, characteristic };

/// Which side of the rectangle a boundary edge lies on.
enum class Side { y_min, y_max, eta_min, eta_max };

struct BoundaryEdge {
  std::array<int, 2> v;
  Side side;
  BoundaryTag tag;
};

using Point = Eigen::Vector2d;
using Triangle = std::array<int, 3>;

class RefinementTree;

/// Conforming triangulation of the (y, eta) rectangle.
///
/// Besides the output triangles, a mesh carries the red-refinement tree it was
/// cut from. Triangles that are green/blue closure pieces are transient: the
/// next call to refine() discards them and refines their tree leaf instead.
struct TriMesh {
  Rect domain;
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  /// Refinement level per triangle; closure pieces count one level deeper
  /// than their tree leaf.
  std::vector<int> generation;
  /// Tree node the triangle was cut from: the red parent for red children,
  /// the tree leaf itself for closure pieces. Empty for the initial mesh.
  std::vector<std::optional<int>> parent;
  /// Tree leaf each triangle belongs to.
  std::vector<int> leaf;
  /// Index of each vertex in the tree's global point list.
  std::vector<int> global_vertex;
  std::shared_ptr<const RefinementTree> tree;
  std::uint64_t id = 0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
};

/// Red refinement hierarchy. Nodes are never removed; leaves form a
/// (possibly 1-irregular) covering of the domain.
class RefinementTree {
 public:
  struct Node {
    Triangle v;
    int level = 0;
    int parent = -1;
    std::array<int, 4> children{-1, -1, -1, -1};
    bool is_leaf() const { return children[0] < 0; }
  };

  std::vector<Point> points;
  std::vector<Node> nodes;

  int add_point(const Point& p);
  /// Midpoint vertex of edge (a, b), or -1 if it was never created.
  int midpoint(int a, int b) const;
  int add_midpoint(int a, int b);
  /// Endpoints of the edge whose midpoint is `p`, if any.
  std::optional<std::array<int, 2>> midpoint_parent(int p) const;
  /// Split a leaf into its four similar children.
  void red_refine(int node);
  std::vector<int> leaves() const;

 private:
  std::map<std::array<int, 2>, int> mid_;
  std::vector<std::optional<std::array<int, 2>>> mid_parent_;
};

double signed_area(const Point& a, const Point& b, const Point& c);
double triangle_area(const TriMesh& mesh, int t);

/// Quasi-uniform diagonal-split grid with roughly `target_elements` triangles.
TriMesh build_initial_mesh(const Rect& domain, int target_elements);
/// Tensor grid on the given lines, each cell split along its rising diagonal.
TriMesh build_grid_mesh(const std::vector<double>& ys, const std::vector<double>& etas);

/// Red refinement of `marked` with green/blue closure. Marked closure pieces
/// refine their tree leaf. Boundary tags are recomputed on the result.
TriMesh refine(const TriMesh& mesh, const std::set<int>& marked);
TriMesh refine_uniform(const TriMesh& mesh);

/// Collect boundary edges and tag them by the sign of n . beta, beta = (eta, 0).
void classify_boundary(TriMesh& mesh);
BoundaryTag classify_edge(Side side, double eta_mid);

/// Minimum interior angle over all triangles, in degrees.
double min_angle(const TriMesh& mesh);
double min_angle(const Point& a, const Point& b, const Point& c);

/// Nodes touching at least one inflow edge (Dirichlet set).
std::vector<bool> inflow_nodes(const TriMesh& mesh);

struct MeshAudit {
  bool positive_orientation = true;
  bool conforming = true;
  double area_error = 0.0;  // relative
  double min_angle_deg = 0.0;
};

/// Orientation, edge incidence and area checks used by tests and the CLI.
MeshAudit audit(const TriMesh& mesh);

}  // namespace fermi
