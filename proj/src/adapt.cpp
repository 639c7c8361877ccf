#include "fermi/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fermi {

void AdaptConfig::validate() const {
  if (!(gamma_tilde > 0.0 && gamma_tilde < 1.0))
    throw std::invalid_argument("AdaptConfig: gamma_tilde must lie in (0, 1)");
  if (max_refinements < 1)
    throw std::invalid_argument("AdaptConfig: max_refinements must be >= 1");
  if (!(tol >= 0.0)) throw std::invalid_argument("AdaptConfig: tol must be >= 0");
}

std::vector<double> error_indicator(const TriMesh& mesh, const NodalField& U,
                                    const std::function<double(double, double)>& oracle,
                                    double scale) {
  if (U.values.size() != mesh.num_vertices())
    throw std::invalid_argument("error_indicator: field does not match the mesh");
  std::vector<double> at_vertex(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
    at_vertex[v] = std::abs(oracle(mesh.vertices[v].x(), mesh.vertices[v].y()) -
                            scale * U.values[v]);
  std::vector<double> eps(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point c =
        (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    const double uh = (U.values[tri[0]] + U.values[tri[1]] + U.values[tri[2]]) / 3.0;
    eps[t] = std::max({at_vertex[tri[0]], at_vertex[tri[1]], at_vertex[tri[2]],
                       std::abs(oracle(c.x(), c.y()) - scale * uh)});
  }
  return eps;
}

std::vector<double> error_indicator(const TriMesh& mesh, const NodalField& U,
                                    const ExactSolution2D& oracle, double x_eval,
                                    double scale) {
  if (!(x_eval > 0.0)) throw std::domain_error("error_indicator: x_eval must be positive");
  return error_indicator(
      mesh, U, [&](double y, double eta) { return oracle(x_eval, y, eta); }, scale);
}

std::set<int> mark(const std::vector<double>& indicators, double gamma_tilde) {
  if (indicators.empty()) throw std::invalid_argument("mark: no elements");
  const double top = *std::max_element(indicators.begin(), indicators.end());
  const double threshold = gamma_tilde * top;
  std::set<int> out;
  for (std::size_t t = 0; t < indicators.size(); ++t)
    if (indicators[t] >= threshold) out.insert(static_cast<int>(t));
  return out;
}

int count_dof(const TriMesh& mesh, bool impose_inflow) {
  if (!impose_inflow) return mesh.num_vertices();
  const auto mask = inflow_nodes(mesh);
  return static_cast<int>(std::count(mask.begin(), mask.end(), false));
}

AdaptResult adaptive_loop(const ExperimentConfig& cfg, const InitialData& data) {
  cfg.adapt.validate();
  cfg.march.validate();
  cfg.form.validate();
  const ExactSolution2D oracle{cfg.form.sigma_tr};
  const double x_eval = cfg.march.L;

  AdaptResult r;
  TriMesh mesh = build_initial_mesh(cfg.domain, cfg.initial_elements);
  for (int n = 0;; ++n) {
    const NodalField u0 = interpolate(mesh, [&](double y, double eta) { return data(y, eta); });
    MarchResult run = run_march(mesh, cfg.march, cfg.form, u0);
    r.max_growth = n == 0 ? run.max_growth : std::max(r.max_growth, run.max_growth);
    r.violations += run.violations;

    const double raw = l2_error(mesh, run.final, oracle, x_eval, cfg.quadrature);
    const double c = fit_amplitude(mesh, run.final, oracle, x_eval, cfg.quadrature);
    const double fitted = l2_error(mesh, run.final, oracle, x_eval, cfg.quadrature, c);
    r.raw_errors.push_back(raw);
    r.fitted_errors.push_back(fitted);
    r.amplitudes.push_back(c);

    ConvergenceRow row;
    row.n = n;
    row.elements = mesh.num_triangles();
    row.vertices = mesh.num_vertices();
    row.dof = count_dof(mesh, cfg.march.impose_inflow);
    row.e_n = cfg.fit_amplitude ? fitted : raw;
    if (n > 0) row.ratio = r.rows.back().e_n / row.e_n;
    r.rows.push_back(row);

    r.distances.push_back(n == 0 ? mass_norm(mesh, run.final.values)
                                 : l2_distance(r.meshes.back(), r.final.values, mesh,
                                               run.final.values));
    r.meshes.push_back(mesh);
    r.final = std::move(run.final);
    if (r.distances.back() < cfg.adapt.tol || n == cfg.adapt.max_refinements) break;

    std::set<int> marked;
    if (cfg.adapt.uniform) {
      for (int t = 0; t < mesh.num_triangles(); ++t) marked.insert(t);
    } else {
      marked = mark(error_indicator(mesh, r.final, oracle, x_eval,
                                    cfg.fit_amplitude ? c : 1.0),
                    cfg.adapt.gamma_tilde);
    }
    r.marked.push_back(marked);
    mesh = refine(mesh, marked);
  }
  return r;
}

}  // namespace fermi
