#include "fermi/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "fermi/adapt.hpp"
#include "fermi/io.hpp"
#include "fermi/report.hpp"
#include "fermi/tensor3d.hpp"

namespace fermi {

namespace {

struct Options {
  std::string data = "maxwellian";
  std::optional<double> alpha;
  std::optional<std::string> scheme;
  double gamma = 0.5;
  double sigma = 0.002;
  std::optional<double> delta;
  double km = 0.01;
  double L = 1.0;
  double tol = 0.0;
  int max_refine = 4;
  int elements = 272;
  bool uniform = false;
  bool fit_amplitude = false;
  bool free_inflow = false;
  bool keep_delta_sigma = false;
  double solver_tol = 1e-10;
  std::string out;
  unsigned seed = 0;
  // tensor3d
  int velocity_n = 3;
  int spatial_cells = 4;
};

struct Preset {
  InitialKind kind;
  double alpha;
  Scheme scheme;
};

const std::map<std::string, Preset> presets = {
    {"test1", {InitialKind::dirac_type, 0.1, Scheme::ssd}},
    {"test2", {InitialKind::maxwellian_type, 0.19, Scheme::csd}},
    {"test3", {InitialKind::hyperbolic_type, 0.19, Scheme::ssd}},
};

InitialKind kind_from_string(const std::string& s) {
  if (s == "dirac") return InitialKind::dirac_type;
  if (s == "maxwellian") return InitialKind::maxwellian_type;
  if (s == "hyperbolic") return InitialKind::hyperbolic_type;
  throw std::invalid_argument("unknown initial data '" + s + "'");
}

const char* kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::dirac_type: return "dirac";
    case InitialKind::maxwellian_type: return "maxwellian";
    case InitialKind::hyperbolic_type: return "hyperbolic";
  }
  return "?";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_experiment(const std::string& command, const Options& o, std::ostream& out) {
  InitialData data;
  Scheme scheme = Scheme::ssd;
  if (auto p = presets.find(command); p != presets.end()) {
    data = {p->second.kind, p->second.alpha};
    scheme = p->second.scheme;
  } else {
    data.kind = kind_from_string(o.data);
  }
  if (o.alpha) data.alpha = *o.alpha;
  if (o.scheme) scheme = scheme_from_string(*o.scheme);
  if (!(data.alpha > 0.0 && data.alpha < 1.0))
    throw std::invalid_argument("--alpha must lie in (0, 1)");

  ExperimentConfig cfg;
  cfg.initial_elements = o.elements;
  cfg.form.sigma_tr = o.sigma;
  cfg.form.delta = o.delta;
  cfg.form.drop_delta_sigma = !o.keep_delta_sigma;
  cfg.march.k_m = o.km;
  cfg.march.L = o.L;
  cfg.march.scheme = scheme;
  cfg.march.solver_tol = o.solver_tol;
  cfg.march.impose_inflow = !o.free_inflow;
  cfg.adapt.gamma_tilde = o.gamma;
  cfg.adapt.max_refinements = o.max_refine;
  cfg.adapt.tol = o.tol;
  cfg.adapt.uniform = o.uniform;
  cfg.fit_amplitude = o.fit_amplitude;

  const auto t0 = std::chrono::steady_clock::now();
  const AdaptResult r = adaptive_loop(cfg, data);
  const double solve_time = seconds_since(t0);

  const std::string table = format_table(r.rows);
  out << table;

  if (o.out.empty()) return exit_ok;
  const std::filesystem::path dir(o.out);
  std::filesystem::create_directories(dir);
  const auto t1 = std::chrono::steady_clock::now();
  RunManifest m;
  m.config = {{"command", command},
              {"data", kind_name(data.kind)},
              {"alpha", num(data.alpha)},
              {"scheme", to_string(scheme)},
              {"gamma", num(o.gamma)},
              {"sigma", num(o.sigma)},
              {"delta", num(cfg.form.effective_delta())},
              {"drop_delta_sigma", cfg.form.drop_delta_sigma ? "1" : "0"},
              {"km", num(o.km)},
              {"L", num(o.L)},
              {"tol", num(o.tol)},
              {"max_refine", std::to_string(o.max_refine)},
              {"elements", std::to_string(o.elements)},
              {"uniform", o.uniform ? "1" : "0"},
              {"impose_inflow", cfg.march.impose_inflow ? "1" : "0"},
              {"fit_amplitude", o.fit_amplitude ? "1" : "0"},
              {"solver_tol", num(o.solver_tol)},
              {"seed", std::to_string(o.seed)}};
  for (std::size_t n = 0; n < r.meshes.size(); ++n) {
    const std::string name = "mesh_" + std::to_string(n) + ".txt";
    write_atomic(dir / name, format_mesh(r.meshes[n]));
    m.mesh_ids.push_back(r.meshes[n].id);
    m.mesh_files.push_back(name);
  }
  m.rows = r.rows;
  for (std::size_t n = 0; n < r.rows.size(); ++n) {
    m.config.emplace_back("raw_error." + std::to_string(n), num(r.raw_errors[n]));
    m.config.emplace_back("fitted_error." + std::to_string(n), num(r.fitted_errors[n]));
    m.config.emplace_back("amplitude." + std::to_string(n), num(r.amplitudes[n]));
    m.config.emplace_back("distance." + std::to_string(n), num(r.distances[n]));
  }
  emit_table(r.rows, dir / "table.csv");
  write_atomic(dir / "field_final.txt", format_field(r.meshes.back(), r.final.values));
  m.timings = {{"solve", solve_time}, {"write", seconds_since(t1)}};
  write_atomic(dir / "manifest.txt", m.format());
  return exit_ok;
}

int run_tensor3d(const Options& o, std::ostream& out) {
  FormConfig form;
  form.sigma_tr = o.sigma;
  form.validate();
  const TriMesh spatial = build_grid_mesh(
      [&] {
        std::vector<double> v(o.spatial_cells + 1);
        for (int i = 0; i <= o.spatial_cells; ++i) v[i] = -1.0 + 2.0 * i / o.spatial_cells;
        return v;
      }(),
      [&] {
        std::vector<double> v(o.spatial_cells + 1);
        for (int i = 0; i <= o.spatial_cells; ++i) v[i] = -1.0 + 2.0 * i / o.spatial_cells;
        return v;
      }());
  const TriMesh velocity = velocity_mesh(velocity_grid(o.velocity_n));
  const double alpha = o.alpha.value_or(0.19);
  const InitialData data{o.data == "dirac"        ? InitialKind::dirac_type
                         : o.data == "hyperbolic" ? InitialKind::hyperbolic_type
                                                  : InitialKind::maxwellian_type,
                         alpha};
  const int ns = spatial.num_vertices(), nv = velocity.num_vertices();
  Eigen::VectorXd u0(static_cast<Eigen::Index>(ns) * nv);
  for (int s = 0; s < ns; ++s)
    for (int v = 0; v < nv; ++v)
      u0[static_cast<Eigen::Index>(s) * nv + v] =
          data(spatial.vertices[s].x(), spatial.vertices[s].y()) *
          data(velocity.vertices[v].x(), velocity.vertices[v].y());

  Run3DConfig run;
  run.k_m = o.km;
  run.L = o.L;
  run.solver_tol = o.solver_tol;
  run.impose_inflow = !o.free_inflow;
  const Run3DResult r = run_3d(spatial, velocity, form, u0, run);
  const Eigen::VectorXd exact = sample_exact_3d(spatial, velocity, o.L, o.sigma);
  char line[256];
  std::snprintf(line, sizeof line,
                "spatial_vertices=%d velocity_vertices=%d steps=%d mass0=%.6e massL=%.6e "
                "norm=%.6e exact_norm=%.6e\n",
                ns, nv, r.steps, r.mass.front(), r.mass.back(),
                l2_norm_3d(spatial, velocity, r.final), l2_norm_3d(spatial, velocity, exact));
  out << line;
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    dump_flat(std::filesystem::path(o.out) / "u_final.txt", r.final, ns, nv);
  }
  return exit_ok;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fermi pencil-beam finite element solver"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--alpha", o.alpha, "initial-data smoothing parameter");
    sub->add_option("--sigma", o.sigma, "transport cross-section");
    sub->add_option("--km", o.km, "step in x");
    sub->add_option("--L", o.L, "slab length");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "seed for randomised utilities");
    sub->add_option("--solver-tol", o.solver_tol, "relative residual tolerance");
    sub->add_flag("--free-inflow", o.free_inflow, "no Dirichlet data on inflow");
  };
  auto experiment = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--gamma", o.gamma, "marking fraction");
    sub->add_option("--scheme", o.scheme, "sg | ssd | csd")
        ->check(CLI::IsMember({"sg", "ssd", "csd"}));
    sub->add_option("--delta", o.delta, "streamline diffusion weight");
    sub->add_option("--tol", o.tol, "stop when successive solutions differ by less");
    sub->add_option("--max-refine", o.max_refine, "refinement cap");
    sub->add_option("--elements", o.elements, "initial element target");
    sub->add_flag("--uniform", o.uniform, "refine every element");
    sub->add_flag("--fit-amplitude", o.fit_amplitude, "report amplitude-fitted errors");
    sub->add_flag("--keep-delta-sigma", o.keep_delta_sigma, "assemble delta*sigma terms");
  };

  std::vector<CLI::App*> subs;
  for (const char* name : {"test1", "test2", "test3"})
    experiment(subs.emplace_back(app.add_subcommand(name, "reference preset")));
  auto* run = app.add_subcommand("run", "fully configured run");
  experiment(run);
  run->add_option("--data", o.data, "dirac | maxwellian | hyperbolic")
      ->check(CLI::IsMember({"dirac", "maxwellian", "hyperbolic"}));
  auto* t3 = app.add_subcommand("tensor3d", "desk-scale 3D phase-space run");
  common(t3);
  t3->add_option("--data", o.data, "dirac | maxwellian | hyperbolic")
      ->check(CLI::IsMember({"dirac", "maxwellian", "hyperbolic"}));
  t3->add_option("--velocity-n", o.velocity_n, "velocity half-resolution")
      ->check(CLI::PositiveNumber);
  t3->add_option("--spatial-cells", o.spatial_cells, "spatial cells per side")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "fermi: " << e.what() << '\n' << app.help();
    return exit_usage;
  }

  try {
    const CLI::App* chosen = app.get_subcommands().front();
    if (chosen == t3) return run_tensor3d(o, out);
    return run_experiment(chosen->get_name(), o, out);
  } catch (const SolverError& e) {
    err << "fermi: solver failure: " << e.what() << '\n';
    return exit_solver;
  } catch (const InvariantViolation& e) {
    err << "fermi: invariant violation: " << e.what() << '\n';
    return exit_invariant;
  } catch (const std::invalid_argument& e) {
    err << "fermi: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::domain_error& e) {
    err << "fermi: " << e.what() << '\n';
    return exit_usage;
  }
}

}  // namespace fermi
