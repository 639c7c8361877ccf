#include "fermi/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fermi/report.hpp"

namespace fermi {

namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* side_name(Side s) {
  switch (s) {
    case Side::y_min: return "y_min";
    case Side::y_max: return "y_max";
    case Side::eta_min: return "eta_min";
    case Side::eta_max: return "eta_max";
  }
  return "?";
}

const char* tag_name(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::inflow: return "inflow";
    case BoundaryTag::outflow: return "outflow";
    case BoundaryTag::characteristic: return "characteristic";
  }
  return "?";
}

Side parse_side(const std::string& s) {
  if (s == "y_min") return Side::y_min;
  if (s == "y_max") return Side::y_max;
  if (s == "eta_min") return Side::eta_min;
  if (s == "eta_max") return Side::eta_max;
  throw std::runtime_error("read_mesh: unknown side '" + s + "'");
}

BoundaryTag parse_tag(const std::string& s) {
  if (s == "inflow") return BoundaryTag::inflow;
  if (s == "outflow") return BoundaryTag::outflow;
  if (s == "characteristic") return BoundaryTag::characteristic;
  throw std::runtime_error("read_mesh: unknown tag '" + s + "'");
}

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word)
    throw std::runtime_error("read_mesh: expected '" + word + "', got '" + got + "'");
}

}  // namespace

void write_mesh(std::ostream& out, const TriMesh& mesh) {
  out << "vertices " << mesh.num_vertices() << " triangles " << mesh.num_triangles() << '\n';
  for (const auto& p : mesh.vertices) out << exact(p.x()) << ' ' << exact(p.y()) << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "boundary " << mesh.boundary_edges.size() << '\n';
  for (const auto& e : mesh.boundary_edges)
    out << e.v[0] << ' ' << e.v[1] << ' ' << side_name(e.side) << ' ' << tag_name(e.tag) << '\n';
}

std::string format_mesh(const TriMesh& mesh) {
  std::ostringstream out;
  write_mesh(out, mesh);
  return out.str();
}

TriMesh read_mesh(std::istream& in) {
  TriMesh mesh;
  int nv = 0, nt = 0;
  std::size_t nb = 0;
  expect(in, "vertices");
  in >> nv;
  expect(in, "triangles");
  in >> nt;
  if (!in || nv < 3 || nt < 1) throw std::runtime_error("read_mesh: bad header");
  mesh.vertices.resize(nv);
  for (auto& p : mesh.vertices) {
    std::string y, eta;
    in >> y >> eta;
    if (!in) throw std::runtime_error("read_mesh: truncated vertex list");
    p = Point(std::stod(y), std::stod(eta));
  }
  mesh.triangles.resize(nt);
  for (auto& t : mesh.triangles) {
    in >> t[0] >> t[1] >> t[2];
    if (!in) throw std::runtime_error("read_mesh: truncated triangle list");
    for (int v : t)
      if (v < 0 || v >= nv) throw std::runtime_error("read_mesh: vertex index out of range");
  }
  expect(in, "boundary");
  in >> nb;
  for (std::size_t i = 0; i < nb; ++i) {
    BoundaryEdge e;
    std::string side, tag;
    in >> e.v[0] >> e.v[1] >> side >> tag;
    if (!in) throw std::runtime_error("read_mesh: truncated boundary list");
    e.side = parse_side(side);
    e.tag = parse_tag(tag);
    mesh.boundary_edges.push_back(e);
  }

  double y0 = mesh.vertices[0].x(), y1 = y0, e0 = mesh.vertices[0].y(), e1 = e0;
  for (const auto& p : mesh.vertices) {
    y0 = std::min(y0, p.x());
    y1 = std::max(y1, p.x());
    e0 = std::min(e0, p.y());
    e1 = std::max(e1, p.y());
  }
  mesh.domain = Rect{y0, y1, e0, e1};
  mesh.generation.assign(nt, 0);
  mesh.parent.assign(nt, std::nullopt);
  return mesh;
}

std::string format_coordinates(const SparseMatrix& A) {
  std::ostringstream out;
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << exact(it.value()) << '\n';
  return out.str();
}

std::string format_field(const TriMesh& mesh, const Eigen::VectorXd& values) {
  if (values.size() != mesh.num_vertices())
    throw std::invalid_argument("format_field: field does not match the mesh");
  std::ostringstream out;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    out << exact(mesh.vertices[v].x()) << ' ' << exact(mesh.vertices[v].y()) << ' '
        << exact(values[v]) << '\n';
  return out.str();
}

void dump_snapshots(const std::filesystem::path& dir, const TriMesh& mesh,
                    const std::vector<NodalField>& snapshots) {
  std::filesystem::create_directories(dir);
  std::ostringstream manifest;
  manifest << "mesh_id=" << mesh.id << '\n' << "count=" << snapshots.size() << '\n';
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const std::string name = "snapshot_" + std::to_string(i) + ".txt";
    write_atomic(dir / name, format_field(mesh, snapshots[i].values));
    manifest << "snapshot." << i << ".file=" << name << '\n'
             << "snapshot." << i << ".x=" << exact(snapshots[i].x_level) << '\n';
  }
  write_atomic(dir / "snapshots.manifest", manifest.str());
}

void dump_flat(const std::filesystem::path& path, const Eigen::VectorXd& values,
               int spatial_vertices, int velocity_vertices) {
  if (values.size() != static_cast<Eigen::Index>(spatial_vertices) * velocity_vertices)
    throw std::invalid_argument("dump_flat: size does not match the factor grids");
  std::ostringstream out;
  for (Eigen::Index i = 0; i < values.size(); ++i) out << exact(values[i]) << '\n';
  write_atomic(path, out.str());
  std::ostringstream manifest;
  manifest << "file=" << path.filename().string() << '\n'
           << "spatial_vertices=" << spatial_vertices << '\n'
           << "velocity_vertices=" << velocity_vertices << '\n'
           << "ordering=spatial*velocity_vertices+velocity (velocity fastest)\n";
  auto mpath = path;
  mpath += ".manifest";
  write_atomic(mpath, manifest.str());
}

}  // namespace fermi
