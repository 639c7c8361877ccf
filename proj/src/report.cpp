#include "fermi/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fermi/locate.hpp"
#include "fermi/quadrature.hpp"

namespace fermi {

namespace {

using BaryTriangle = std::array<Eigen::Vector3d, 3>;

/// 4^level similar sub-triangles of the reference element, in barycentric form.
const std::vector<BaryTriangle>& subdivision(int level) {
  static std::vector<std::vector<BaryTriangle>> cache;
  if (cache.empty())
    cache.push_back({BaryTriangle{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0),
                                  Eigen::Vector3d(0, 0, 1)}});
  while (static_cast<int>(cache.size()) <= level) {
    std::vector<BaryTriangle> next;
    for (const auto& t : cache.back()) {
      const Eigen::Vector3d m01 = 0.5 * (t[0] + t[1]);
      const Eigen::Vector3d m12 = 0.5 * (t[1] + t[2]);
      const Eigen::Vector3d m20 = 0.5 * (t[2] + t[0]);
      next.push_back({t[0], m01, m20});
      next.push_back({m01, t[1], m12});
      next.push_back({m20, m12, t[2]});
      next.push_back({m12, m20, m01});
    }
    cache.push_back(std::move(next));
  }
  return cache[level];
}

double diameter(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Point& a = mesh.vertices[tri[0]];
  const Point& b = mesh.vertices[tri[1]];
  const Point& c = mesh.vertices[tri[2]];
  return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

/// sum over elements of int f(x, uh(x)) with per-element subdivision level.
template <typename Integrand, typename Level>
double integrate(const TriMesh& mesh, const Eigen::VectorXd& U, int degree, Level&& level,
                 Integrand&& f) {
  const auto rule = triangle_rule(degree);
  double total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point& a = mesh.vertices[tri[0]];
    const Point& b = mesh.vertices[tri[1]];
    const Point& c = mesh.vertices[tri[2]];
    const Eigen::Vector3d u(U[tri[0]], U[tri[1]], U[tri[2]]);
    const auto& pieces = subdivision(level(t));
    const double piece_area = triangle_area(mesh, t) / static_cast<double>(pieces.size());
    double sum = 0.0;
    for (const auto& piece : pieces) {
      for (const auto& q : rule) {
        const Eigen::Vector3d lam =
            q.lambda[0] * piece[0] + q.lambda[1] * piece[1] + q.lambda[2] * piece[2];
        const Point x = lam[0] * a + lam[1] * b + lam[2] * c;
        sum += q.weight * f(x, lam.dot(u));
      }
    }
    total += sum * piece_area;
  }
  return total;
}

int level_for(double diam, double target, int max_level) {
  int s = 0;
  while (s < max_level && diam / std::ldexp(1.0, s) > target) ++s;
  return s;
}

}  // namespace

double l2_error(const TriMesh& mesh, const NodalField& U, const ExactSolution2D& oracle,
                double x_eval, const ErrorQuadrature& quad, double scale) {
  if (!(x_eval > 0.0)) throw std::domain_error("l2_error: x_eval must be positive");
  const double target = quad.resolution * oracle.length_scale(x_eval);
  auto level = [&](int t) { return level_for(diameter(mesh, t), target, quad.max_subdivisions); };
  const double e2 = integrate(mesh, U.values, quad.degree, level, [&](const Point& x, double uh) {
    const double d = oracle(x_eval, x.x(), x.y()) - scale * uh;
    return d * d;
  });
  return std::sqrt(e2);
}

double l2_error(const TriMesh& mesh, const NodalField& U,
                const std::function<double(double, double)>& oracle, int degree,
                int subdivisions, double scale) {
  auto level = [subdivisions](int) { return subdivisions; };
  const double e2 = integrate(mesh, U.values, degree, level, [&](const Point& x, double uh) {
    const double d = oracle(x.x(), x.y()) - scale * uh;
    return d * d;
  });
  return std::sqrt(e2);
}

double fit_amplitude(const TriMesh& mesh, const NodalField& U, const ExactSolution2D& oracle,
                     double x_eval, const ErrorQuadrature& quad) {
  const double target = quad.resolution * oracle.length_scale(x_eval);
  auto level = [&](int t) { return level_for(diameter(mesh, t), target, quad.max_subdivisions); };
  const double cross = integrate(mesh, U.values, quad.degree, level,
                                 [&](const Point& x, double uh) {
                                   return oracle(x_eval, x.x(), x.y()) * uh;
                                 });
  const double self = U.values.dot(mass_matrix(mesh) * U.values);
  return self > 0.0 ? cross / self : 1.0;
}

double mass_norm(const TriMesh& mesh, const Eigen::VectorXd& U) {
  return std::sqrt(std::max(0.0, U.dot(mass_matrix(mesh) * U)));
}

double l2_distance(const TriMesh& coarse, const Eigen::VectorXd& coarse_values,
                   const TriMesh& fine, const Eigen::VectorXd& fine_values) {
  const Eigen::VectorXd prolonged = transfer(coarse, coarse_values, fine);
  return mass_norm(fine, prolonged - fine_values);
}

double triple_norm(const TriMesh& mesh, const std::vector<NodalField>& trajectory,
                   double k_m, double sigma_tr) {
  const SparseMatrix S = eta_stiffness(mesh);
  double total = 0.0;
  for (std::size_t m = 1; m < trajectory.size(); ++m) {
    const Eigen::VectorXd& u = trajectory[m].values;
    double outflow = 0.0;
    for (const auto& e : mesh.boundary_edges) {
      if (e.tag != BoundaryTag::outflow) continue;
      const double n_y = e.side == Side::y_max ? 1.0 : -1.0;
      const Point& a = mesh.vertices[e.v[0]];
      const Point& b = mesh.vertices[e.v[1]];
      const double len = (b - a).norm();
      for (const auto& q : line_rule(3)) {
        const double eta = (1.0 - q.t) * a.y() + q.t * b.y();
        const double val = (1.0 - q.t) * u[e.v[0]] + q.t * u[e.v[1]];
        outflow += q.weight * len * n_y * eta * val * val;
      }
    }
    total += k_m * (outflow + sigma_tr * u.dot(S * u));
  }
  return std::sqrt(std::max(0.0, total));
}

std::string format_table(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "n,elements,vertices,dof,e_n,ratio\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.n << ',' << r.elements << ',' << r.vertices << ',' << r.dof << ',';
    std::snprintf(buf, sizeof buf, "%.3e", r.e_n);
    out << buf << ',';
    if (r.ratio) {
      std::snprintf(buf, sizeof buf, "%.2f", *r.ratio);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << contents;
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void emit_table(const std::vector<ConvergenceRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw std::invalid_argument("emit_table: no rows");
  write_atomic(path, format_table(rows));
}

std::vector<ConvergenceRow> parse_table(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "n,elements,vertices,dof,e_n,ratio")
    throw std::invalid_argument("parse_table: bad header");
  std::vector<ConvergenceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 5) cells.emplace_back();
    if (cells.size() != 6) throw std::invalid_argument("parse_table: bad row '" + line + "'");
    ConvergenceRow r;
    r.n = std::stoi(cells[0]);
    r.elements = std::stoi(cells[1]);
    r.vertices = std::stoi(cells[2]);
    r.dof = std::stoi(cells[3]);
    r.e_n = std::stod(cells[4]);
    if (!cells[5].empty()) r.ratio = std::stod(cells[5]);
    rows.push_back(r);
  }
  return rows;
}

std::string RunManifest::format() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [k, v] : config) out << "config." << k << '=' << v << '\n';
  for (std::size_t i = 0; i < mesh_ids.size(); ++i) {
    out << "mesh." << i << ".id=" << mesh_ids[i] << '\n';
    if (i < mesh_files.size()) out << "mesh." << i << ".file=" << mesh_files[i] << '\n';
  }
  for (const auto& r : rows) {
    out << "row." << r.n << '=' << r.elements << ',' << r.vertices << ',' << r.dof << ','
        << r.e_n;
    if (r.ratio) out << ',' << *r.ratio;
    out << '\n';
  }
  for (const auto& [k, v] : timings) out << "timing." << k << '=' << v << '\n';
  return out.str();
}

}  // namespace fermi
