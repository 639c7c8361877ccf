// Acceptance sweep. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fermi/adapt.hpp"
#include "fermi/cli.hpp"
#include "fermi/solver.hpp"
#include "fermi/tensor3d.hpp"
#include "oracles.hpp"

using namespace fermi;

namespace {

// Tolerances and budgets.
constexpr double ratio_lo = 3.3, ratio_hi = 4.7;
constexpr double uniform_budget_s = 120.0;
constexpr double preset_budget_s = 300.0;
constexpr double unit_mass_tol = 1e-8;
constexpr double residual_tol = 1e-6;
constexpr double flux_tol = 1e-7;
constexpr double dense_tol = 1e-13;
constexpr double kernel_tol = 1e-13;
constexpr double ibp_tol = 1e-12;
constexpr double kron_tol = 1e-13;
constexpr double csd_exact_tol = 1e-12;
constexpr double sigma = 0.002;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;
int total_violations = 0;
int audited_runs = 0;
double worst_growth = -1.0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s -- %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void note(const AdaptResult& r, Scheme scheme) {
  if (scheme == Scheme::csd) return;
  total_violations += r.violations;
  ++audited_runs;
  worst_growth = std::max(worst_growth, r.max_growth);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double max_abs(const Eigen::MatrixXd& A) { return A.cwiseAbs().maxCoeff(); }

ExperimentConfig preset_config(Scheme scheme, double gamma) {
  ExperimentConfig cfg;
  cfg.form.sigma_tr = sigma;
  cfg.march.scheme = scheme;
  cfg.march.check_stability = false;
  cfg.adapt.gamma_tilde = gamma;
  cfg.adapt.max_refinements = 4;
  return cfg;
}

void uniform_convergence() {
  ExperimentConfig cfg = preset_config(Scheme::ssd, 0.5);
  cfg.adapt.uniform = true;
  const auto t0 = Clock::now();
  const AdaptResult r = adaptive_loop(cfg, InitialData{InitialKind::maxwellian_type, 0.19});
  const double t = since(t0);
  note(r, Scheme::ssd);
  bool ok = t < uniform_budget_s;
  std::ostringstream d;
  d << "e_n/e_n+1 vs exact:";
  for (std::size_t n = 1; n < r.rows.size(); ++n) {
    d << ' ' << fmt("%.2f", *r.rows[n].ratio);
    if (n >= 2) ok = ok && *r.rows[n].ratio >= ratio_lo && *r.rows[n].ratio <= ratio_hi;
  }
  d << "; successive-distance ratios:";
  for (std::size_t n = 2; n < r.distances.size(); ++n)
    d << ' ' << fmt("%.2f", r.distances[n - 1] / r.distances[n]);
  d << "; e_4=" << fmt("%.4e", r.rows.back().e_n) << " elements=" << r.rows.back().elements
    << " time=" << fmt("%.1fs", t);
  report(1, "uniform refinement ratio", ok, d.str());
}

struct PresetSpec {
  const char* name;
  InitialData data;
  Scheme scheme;
};

const PresetSpec presets[] = {
    {"test1", {InitialKind::dirac_type, 0.1}, Scheme::ssd},
    {"test2", {InitialKind::maxwellian_type, 0.19}, Scheme::csd},
    {"test3", {InitialKind::hyperbolic_type, 0.19}, Scheme::ssd},
};

bool strictly_decreasing_after_first(const AdaptResult& r) {
  for (std::size_t n = 2; n < r.rows.size(); ++n)
    if (!(r.rows[n].e_n < r.rows[n - 1].e_n)) return false;
  return r.rows.size() >= 4;
}

bool csd_monotone = false;
std::string csd_detail;

void adaptive_reduction() {
  bool ok = true;
  std::ostringstream d;
  for (const auto& p : presets) {
    const auto t0 = Clock::now();
    const AdaptResult a = adaptive_loop(preset_config(p.scheme, 0.5), p.data);
    const AdaptResult b = adaptive_loop(preset_config(p.scheme, 0.7), p.data);
    const double t = since(t0);
    note(a, p.scheme);
    note(b, p.scheme);
    const bool dec = strictly_decreasing_after_first(a) && strictly_decreasing_after_first(b);
    const bool better = a.rows.back().e_n < b.rows.back().e_n;
    ok = ok && dec && better && t < preset_budget_s;
    d << p.name << ": decreasing=" << (dec ? "yes" : "no") << " final e(0.5)="
      << fmt("%.6e", a.rows.back().e_n) << " [dof " << a.rows.back().dof << "] e(0.7)="
      << fmt("%.6e", b.rows.back().e_n) << " [dof " << b.rows.back().dof << "] "
      << fmt("%.1fs", t) << "; ";
    if (p.scheme == Scheme::csd) {
      csd_monotone = strictly_decreasing_after_first(a);
      csd_detail = "csd adaptive e_n:";
      for (const auto& row : a.rows) csd_detail += ' ' + fmt("%.6e", row.e_n);
    }
  }
  report(2, "adaptive error reduction", ok, d.str());
}

void stability() {
  // Standard Galerkin marches on each preset's data, on top of the runs above.
  const TriMesh mesh = build_initial_mesh(Rect{}, 272);
  for (const auto& p : presets) {
    MarchConfig march;
    march.scheme = Scheme::standard_galerkin;
    march.check_stability = false;
    FormConfig form;
    form.sigma_tr = sigma;
    const NodalField u0 = interpolate(mesh, [&](double y, double eta) { return p.data(y, eta); });
    const MarchResult r = run_march(mesh, march, form, u0);
    total_violations += r.violations;
    ++audited_runs;
    worst_growth = std::max(worst_growth, r.max_growth);
  }
  report(3, "stability invariants", total_violations == 0,
         "violations=" + std::to_string(total_violations) + " over " +
             std::to_string(audited_runs) + " audited sweeps, worst relative growth " +
             fmt("%.3e", worst_growth));
}

template <typename F>
long double d1(F f, long double x, long double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}
template <typename F>
long double d2(F f, long double x, long double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

void oracle_identities() {
  double mass_err = 0, res2 = 0, res3 = 0, flux_err = 0;
  for (double x : {0.25, 0.5, 1.0})
    mass_err = std::max(mass_err, std::abs(oracle::integrate_2d(
                                               [x](double y, double eta) { return exact_2d(x, y, eta, sigma); },
                                               -1, 1, -1, 1) - 1.0));
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> ux(0.3, 1.0), z(-2.0, 2.0);
  const long double s = sigma;
  for (int i = 0; i < 100; ++i) {
    const long double x = ux(rng);
    const long double eta = z(rng) * std::sqrt(s * x);
    const long double y = 1.5L * eta * x / 2 + z(rng) * std::sqrt(s * x * x * x / 12);
    const long double ux_ = d1([&](long double t) { return exact_2d(t, y, eta, s); }, x, 2e-4L * x);
    const long double uy = d1([&](long double t) { return exact_2d(x, t, eta, s); }, y,
                              2e-2L * std::sqrt(s * x * x * x / 12));
    const long double uee = d2([&](long double t) { return exact_2d(x, y, t, s); }, eta,
                               2e-2L * std::sqrt(s * x / 4));
    const long double scale = std::abs(ux_) + std::abs(eta * uy) + std::abs(s / 2 * uee);
    res2 = std::max(res2, double(std::abs(ux_ + eta * uy - s / 2 * uee) / scale));
  }
  for (int i = 0; i < 100; ++i) {
    const long double x = ux(rng);
    const long double sd = std::sqrt(s * x * x * x / 3);
    const long double y = z(rng) * sd, zz = z(rng) * sd, h = 5e-3L * sd;
    const long double ux_ = d1([&](long double t) { return scalar_flux(t, y, zz, s); }, x, 2e-4L * x);
    const long double rhs = s * x * x / 2 *
                            (d2([&](long double t) { return scalar_flux(x, t, zz, s); }, y, h) +
                             d2([&](long double t) { return scalar_flux(x, y, t, s); }, zz, h));
    res3 = std::max(res3, double(std::abs(ux_ - rhs) / (std::abs(ux_) + std::abs(rhs))));
  }
  std::uniform_real_distribution<double> w(-1.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    const double x = ux(rng), sd = std::sqrt(sigma * x * x * x / 3);
    const double y = w(rng) * sd, zz = w(rng) * sd, half = 12 * std::sqrt(sigma * x / 4);
    const double flux = oracle::integrate_2d(
        [&](double e, double q) { return exact_3d(x, y, zz, e, q, sigma); }, 1.5 * y / x - half,
        1.5 * y / x + half, 1.5 * zz / x - half, 1.5 * zz / x + half, 1e-13);
    flux_err = std::max(flux_err, std::abs(flux / scalar_flux(x, y, zz, sigma) - 1.0));
  }
  const bool ok = mass_err <= unit_mass_tol && res2 <= residual_tol && res3 <= residual_tol &&
                  flux_err <= flux_tol;
  report(4, "analytic oracle identities", ok,
         "unit mass " + fmt("%.1e", mass_err) + ", residual 2d " + fmt("%.1e", res2) +
             ", residual flux " + fmt("%.1e", res3) + ", velocity integral " + fmt("%.1e", flux_err));
}

void assembly_oracles() {
  double dense_err = 0, kernel = 0, ibp = 0, min_eig = 1;
  int largest = 0;
  for (unsigned seed : {1u, 2u, 3u}) {
    const TriMesh m = oracle::random_refined(40, 2, seed);
    if (m.num_triangles() > 200 || m.num_vertices() > 300) continue;
    largest = std::max(largest, m.num_triangles());
    using oracle::Form;
    const std::pair<SparseMatrix, Form> pairs[] = {
        {mass_matrix(m), Form::mass},           {convection_matrix(m), Form::convection},
        {streamline_matrix(m), Form::streamline}, {eta_stiffness(m), Form::eta_stiffness},
        {b_cross_matrix(m), Form::b_cross}};
    for (const auto& [A, f] : pairs)
      dense_err = std::max(dense_err, max_abs(Eigen::MatrixXd(A) - oracle::dense_form(m, f)));
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(m.num_vertices());
    kernel = std::max({kernel, (convection_matrix(m) * one).cwiseAbs().maxCoeff(),
                       (eta_stiffness(m) * one).cwiseAbs().maxCoeff()});
    const Eigen::MatrixXd C = Eigen::MatrixXd(convection_matrix(m));
    ibp = std::max(ibp, max_abs(C + C.transpose() - oracle::dense_boundary_flux(m)));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(mass_matrix(m)));
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  const bool ok = largest > 0 && dense_err <= dense_tol && kernel <= kernel_tol && ibp <= ibp_tol &&
                  min_eig > 0.0;
  report(5, "assembly oracles", ok,
         "dense " + fmt("%.1e", dense_err) + ", kernels " + fmt("%.1e", kernel) + ", boundary " +
             fmt("%.1e", ibp) + ", min eig(M) " + fmt("%.2e", min_eig) + ", up to " +
             std::to_string(largest) + " elements");
}

void kronecker() {
  const TriMesh s = build_initial_mesh(Rect{}, 2), v = build_initial_mesh(Rect{}, 2);
  FormConfig cfg;
  cfg.sigma_tr = 0.3;
  const double k = 0.1;
  const Step3D step = assemble_3d_step(s, v, cfg, k, false);
  const SpatialOperators so = spatial_operators(s);
  const VelocityOperators vo = velocity_operators(v);
  auto D = [](const SparseMatrix& A) { return Eigen::MatrixXd(A); };
  using oracle::dense_kron;
  const Eigen::MatrixXd transport = dense_kron(D(so.Cy), D(vo.M_eta)) + dense_kron(D(so.Cz), D(vo.M_xi));
  const Eigen::MatrixXd lhs = dense_kron(D(so.M), D(vo.M)) + k / 2 * transport +
                              cfg.sigma_tr * k / 4 * dense_kron(D(so.M), D(vo.S));
  const Eigen::MatrixXd rhs = dense_kron(D(so.M), D(vo.M)) - k / 2 * transport -
                              cfg.sigma_tr * k / 4 * dense_kron(D(so.M), D(vo.S));
  double unit = 0;
  for (int j = 0; j < lhs.cols(); ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(lhs.cols());
    e[j] = 1;
    unit = std::max({unit, (kron_apply(step.lhs, e) - lhs.col(j)).cwiseAbs().maxCoeff(),
                     (kron_apply(step.rhs, e) - rhs.col(j)).cwiseAbs().maxCoeff()});
  }

  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  auto random = [&](int r, int c) {
    Eigen::MatrixXd A(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) A(i, j) = g(rng);
    return A;
  };
  const Eigen::MatrixXd A = random(6, 6), B = random(5, 5), Cm = random(6, 6), Dm = random(5, 5);
  const Eigen::MatrixXd mixed = (dense_kron(A, B) * dense_kron(Cm, Dm) - dense_kron(A * Cm, B * Dm));
  const Eigen::VectorXd x = random(30, 1);
  const Eigen::VectorXd two = kron_apply(KronOperator{A.sparseView(), B.sparseView(), 1.0},
                                         kron_apply(KronOperator{Cm.sparseView(), Dm.sparseView(), 1.0}, x));
  const Eigen::VectorXd one = kron_apply(KronOperator{(A * Cm).sparseView(), (B * Dm).sparseView(), 1.0}, x);
  const double mixed_err = std::max(max_abs(mixed) / max_abs(dense_kron(A * Cm, B * Dm)),
                                    (two - one).cwiseAbs().maxCoeff() / one.cwiseAbs().maxCoeff());
  const Eigen::VectorXd a = random(6, 1), b = random(5, 1);
  Eigen::VectorXd ab(30), expect(30);
  const Eigen::VectorXd Aa = A * a, Bb = B * b;
  for (int i = 0; i < 6; ++i) {
    ab.segment(5 * i, 5) = a[i] * b;
    expect.segment(5 * i, 5) = Aa[i] * Bb;
  }
  const double rank1 = (kron_apply(KronOperator{A.sparseView(), B.sparseView(), 1.0}, ab) - expect)
                           .cwiseAbs().maxCoeff() / expect.cwiseAbs().maxCoeff();

  std::vector<double> yz(5);
  for (int i = 0; i <= 4; ++i) yz[i] = -1.0 + 0.5 * i;
  const TriMesh sm = build_grid_mesh(yz, yz), vm = velocity_mesh(velocity_grid(2));
  FormConfig pure;
  pure.sigma_tr = 0.0;
  const int ns = sm.num_vertices(), nv = vm.num_vertices();
  Eigen::VectorXd u0(ns * nv);
  for (int i = 0; i < ns; ++i)
    for (int c = 0; c < nv; ++c) {
      const Point& p = sm.vertices[i];
      const Point& q = vm.vertices[c];
      u0[i * nv + c] = std::exp(-2 * p.squaredNorm()) * std::exp(-q.squaredNorm());
    }
  auto solve = [&](double km) {
    Run3DConfig run;
    run.k_m = km;
    run.L = 0.4;
    run.impose_inflow = false;
    run.solver_tol = 1e-13;
    return run_3d(sm, vm, pure, u0, run).final;
  };
  const Eigen::VectorXd r1 = solve(0.1), r2 = solve(0.05), r3 = solve(0.025);
  const double ratio = l2_norm_3d(sm, vm, r1 - r2) / l2_norm_3d(sm, vm, r2 - r3);

  const bool ok = unit <= kron_tol && mixed_err <= kron_tol && rank1 <= kron_tol &&
                  ratio >= ratio_lo && ratio <= ratio_hi;
  report(6, "Kronecker equivalence", ok,
         "unit vectors " + fmt("%.1e", unit) + ", mixed product " + fmt("%.1e", mixed_err) +
             ", rank one " + fmt("%.1e", rank1) + ", Richardson ratio " + fmt("%.3f", ratio));
}

void csd_exactness() {
  const TriMesh m = refine_uniform(build_initial_mesh(Rect{}, 272));
  MarchConfig march;
  march.scheme = Scheme::csd;
  march.impose_inflow = false;
  march.solver_tol = 1e-13;
  FormConfig form;
  form.sigma_tr = 0.0;
  const NodalField u = interpolate(m, [](double, double eta) { return std::exp(-eta * eta) + eta; });
  const double err = (run_march(m, march, form, u).final.values - u.values).cwiseAbs().maxCoeff();
  report(7, "characteristic transport exactness", err <= csd_exact_tol && csd_monotone,
         "y-invariant drift " + fmt("%.1e", err) + "; " + csd_detail);
}

void replay() {
  auto once = [] {
    std::ostringstream out, err;
    const int code = cli_run({"test1"}, out, err);
    return std::pair{code, out.str()};
  };
  const auto a = once(), b = once();
  report(8, "replay determinism", a.first == 0 && b.first == 0 && a.second == b.second,
         "test1 preset CSV " + std::string(a.second == b.second ? "identical" : "differs") + " (" +
             std::to_string(a.second.size()) + " bytes)");
}

}  // namespace

int main() {
  uniform_convergence();
  adaptive_reduction();
  stability();
  oracle_identities();
  assembly_oracles();
  kronecker();
  csd_exactness();
  replay();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
