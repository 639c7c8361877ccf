#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "fermi/mesh.hpp"

namespace fermi {

namespace detail {

std::uint64_t next_mesh_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter++;
}

namespace {

using Edge = std::array<int, 2>;

Edge key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

int longest_edge(const RefinementTree& tree, const Triangle& v) {
  int best = 0;
  double best_len = -1.0;
  for (int k = 0; k < 3; ++k) {
    const double len = (tree.points[v[(k + 1) % 3]] - tree.points[v[k]]).squaredNorm();
    // Ties keep the lowest local index; 1e-12 absorbs rounding between similar edges.
    if (len > best_len * (1.0 + 1e-12)) {
      best = k;
      best_len = len;
    }
  }
  return best;
}

bool on_boundary(const Rect& d, const Point& a, const Point& b) {
  const double ty = 1e-12 * d.width(), te = 1e-12 * d.height();
  auto both = [](double u, double v, double w, double tol) {
    return std::abs(u - w) <= tol && std::abs(v - w) <= tol;
  };
  return both(a.x(), b.x(), d.y_min, ty) || both(a.x(), b.x(), d.y_max, ty) ||
         both(a.y(), b.y(), d.eta_min, te) || both(a.y(), b.y(), d.eta_max, te);
}

struct LeafEdges {
  std::map<Edge, std::vector<int>> owners;  // full leaf edge -> leaves

  explicit LeafEdges(const RefinementTree& tree, const std::vector<int>& leaves) {
    for (int l : leaves) {
      const auto& v = tree.nodes[l].v;
      for (int k = 0; k < 3; ++k) owners[key(v[k], v[(k + 1) % 3])].push_back(l);
    }
  }
  bool has(int a, int b) const { return owners.count(key(a, b)) > 0; }
};

/// Number of levels by which leaves across edge (a, b) are finer than the edge.
int split_depth(const RefinementTree& tree, const LeafEdges& edges, int a, int b) {
  const int m = tree.midpoint(a, b);
  if (m < 0) return 0;
  const int da = split_depth(tree, edges, a, m);
  const int db = split_depth(tree, edges, m, b);
  if (da == 0 && db == 0 && !edges.has(a, m) && !edges.has(m, b)) return 0;
  return 1 + std::max(da, db);
}

bool is_split(const RefinementTree& tree, const LeafEdges& edges, int a, int b) {
  return split_depth(tree, edges, a, b) > 0;
}

/// Red-refine leaves that see a neighbour two levels finer across some edge.
bool enforce_one_irregular(RefinementTree& tree, const std::vector<int>& leaves,
                           const LeafEdges& edges) {
  bool changed = false;
  for (int l : leaves) {
    const auto v = tree.nodes[l].v;
    for (int k = 0; k < 3; ++k) {
      if (split_depth(tree, edges, v[k], v[(k + 1) % 3]) > 1) {
        tree.red_refine(l);
        changed = true;
        break;
      }
    }
  }
  return changed;
}

}  // namespace

TriMesh mesh_from_tree(std::shared_ptr<RefinementTree> tree, const Rect& domain) {
  RefinementTree& t = *tree;
  std::vector<int> leaves;
  std::set<Edge> marked;

  for (;;) {
    leaves = t.leaves();
    const LeafEdges edges(t, leaves);
    if (enforce_one_irregular(t, leaves, edges)) continue;

    marked.clear();
    std::vector<int> queue;
    for (int l : leaves) {
      const auto& v = t.nodes[l].v;
      for (int k = 0; k < 3; ++k) {
        const int a = v[k], b = v[(k + 1) % 3];
        if (is_split(t, edges, a, b)) {
          marked.insert(key(a, b));
          queue.push_back(l);
        }
      }
    }

    // Closure: any leaf with a marked edge must also have its longest edge marked.
    bool restart = false;
    while (!queue.empty() && !restart) {
      const int l = queue.back();
      queue.pop_back();
      const auto v = t.nodes[l].v;
      const int k = longest_edge(t, v);
      const int a = v[k], b = v[(k + 1) % 3];
      if (marked.count(key(a, b))) continue;
      marked.insert(key(a, b));
      const auto& owners = edges.owners.at(key(a, b));
      if (owners.size() == 2) {
        queue.push_back(owners[0] == l ? owners[1] : owners[0]);
      } else if (!on_boundary(domain, t.points[a], t.points[b])) {
        // The edge is half of a coarser neighbour's edge; refine that neighbour.
        for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
          const auto pp = t.midpoint_parent(y);
          if (!pp || ((*pp)[0] != x && (*pp)[1] != x)) continue;
          if (auto it = edges.owners.find(*pp); it != edges.owners.end()) {
            for (int n : it->second) t.red_refine(n);
            restart = true;
            break;
          }
        }
        if (!restart)
          throw std::logic_error("refine: closure edge without a neighbour");
      }
    }
    if (restart) continue;

    // Three marked edges: the leaf itself is red-refined.
    for (int l : leaves) {
      const auto& v = t.nodes[l].v;
      int count = 0;
      for (int k = 0; k < 3; ++k) count += marked.count(key(v[k], v[(k + 1) % 3]));
      if (count == 3) {
        t.red_refine(l);
        restart = true;
      }
    }
    if (!restart) break;
  }

  TriMesh mesh;
  mesh.domain = domain;
  mesh.id = next_mesh_id();

  auto emit = [&](const Triangle& tri, int leaf, int generation, std::optional<int> parent) {
    mesh.triangles.push_back(tri);
    mesh.leaf.push_back(leaf);
    mesh.generation.push_back(generation);
    mesh.parent.push_back(parent);
  };

  for (int l : leaves) {
    const auto& node = t.nodes[l];
    const auto& v = node.v;
    std::optional<int> red_parent;
    if (node.parent >= 0) red_parent = node.parent;
    const int k = longest_edge(t, v);
    const int a = v[k], b = v[(k + 1) % 3], c = v[(k + 2) % 3];
    if (!marked.count(key(a, b))) {
      emit(v, l, node.level, red_parent);
      continue;
    }
    const int m = t.add_midpoint(a, b);
    const bool split_bc = marked.count(key(b, c)) > 0;
    const bool split_ca = marked.count(key(c, a)) > 0;
    const int g = node.level + 1;
    if (split_bc) {
      const int m2 = t.add_midpoint(b, c);
      emit({a, m, c}, l, g, l);
      emit({m, b, m2}, l, g, l);
      emit({m, m2, c}, l, g, l);
    } else if (split_ca) {
      const int m2 = t.add_midpoint(c, a);
      emit({m, b, c}, l, g, l);
      emit({a, m, m2}, l, g, l);
      emit({m, c, m2}, l, g, l);
    } else {
      emit({a, m, c}, l, g, l);
      emit({m, b, c}, l, g, l);
    }
  }

  // Compact to the points actually used, in global order.
  std::vector<int> local(t.points.size(), -1);
  for (const auto& tri : mesh.triangles)
    for (int p : tri) local[p] = 0;
  for (int p = 0; p < static_cast<int>(t.points.size()); ++p) {
    if (local[p] < 0) continue;
    local[p] = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(t.points[p]);
    mesh.global_vertex.push_back(p);
  }
  for (auto& tri : mesh.triangles)
    for (int& p : tri) p = local[p];

  mesh.tree = std::move(tree);
  classify_boundary(mesh);
  return mesh;
}

}  // namespace detail

TriMesh refine(const TriMesh& mesh, const std::set<int>& marked) {
  if (marked.empty()) return mesh;
  if (!mesh.tree) throw std::invalid_argument("refine: mesh carries no refinement tree");
  auto tree = std::make_shared<RefinementTree>(*mesh.tree);
  std::set<int> leaves;
  for (int t : marked) leaves.insert(mesh.leaf.at(t));
  for (int l : leaves) tree->red_refine(l);
  return detail::mesh_from_tree(std::move(tree), mesh.domain);
}

TriMesh refine_uniform(const TriMesh& mesh) {
  std::set<int> all;
  for (int t = 0; t < mesh.num_triangles(); ++t) all.insert(t);
  return refine(mesh, all);
}

}  // namespace fermi
