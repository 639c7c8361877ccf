#include <gtest/gtest.h>

#include <random>

#include "fermi/analytic.hpp"
#include "oracles.hpp"

using namespace fermi;

namespace {

constexpr double sigma = 0.002;

/// Fourth-order central differences in long double.
template <typename F>
long double d1(F f, long double x, long double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}
template <typename F>
long double d2(F f, long double x, long double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

}  // namespace

TEST(Exact2d, PeakValueAndSymmetry) {
  for (double x : {0.25, 0.5, 1.0})
    EXPECT_NEAR(exact_2d(x, 0.0, 0.0, sigma), std::sqrt(3.0) / (M_PI * sigma * x * x), 1e-12);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (int i = 0; i < 50; ++i) {
    const double y = u(rng), eta = u(rng);
    EXPECT_EQ(exact_2d(0.7, y, eta, sigma), exact_2d(0.7, -y, -eta, sigma));
  }
  EXPECT_THROW(exact_2d(0.0, 0.0, 0.0, sigma), std::domain_error);
  EXPECT_THROW(exact_2d(-1.0, 0.0, 0.0, sigma), std::domain_error);
}

TEST(Exact2d, UnitMassOnTheSquare) {
  for (double x : {0.25, 0.5, 1.0}) {
    const double mass = oracle::integrate_2d(
        [x](double y, double eta) { return exact_2d(x, y, eta, sigma); }, -1, 1, -1, 1);
    EXPECT_NEAR(mass, 1.0, 1e-8) << "x = " << x;
  }
}

TEST(Exact2d, L2NormClosedForm) {
  const ExactSolution2D u{sigma};
  const double q = oracle::integrate_2d(
      [&](double y, double eta) { return u(1.0, y, eta) * u(1.0, y, eta); }, -1, 1, -1, 1);
  EXPECT_NEAR(q, u.l2_norm_squared(1.0), 1e-8 * q);
}

TEST(Exact2d, SatisfiesTheModelEquation) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> ux(0.3, 1.0), z(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const long double x = ux(rng);
    const long double s = sigma;
    // Sample within two standard deviations of the beam.
    const long double eta = z(rng) * std::sqrt(s * x);
    const long double y = 1.5L * eta * x / 2 + z(rng) * std::sqrt(s * x * x * x / 12);
    const long double hx = 2e-4L * x, hy = 2e-2L * std::sqrt(s * x * x * x / 12),
                      he = 2e-2L * std::sqrt(s * x / 4);
    const long double ux_ = d1([&](long double t) { return exact_2d(t, y, eta, s); }, x, hx);
    const long double uy = d1([&](long double t) { return exact_2d(x, t, eta, s); }, y, hy);
    const long double uee = d2([&](long double t) { return exact_2d(x, y, t, s); }, eta, he);
    const long double residual = ux_ + eta * uy - s / 2 * uee;
    const long double scale = std::abs(ux_) + std::abs(eta * uy) + std::abs(s / 2 * uee);
    EXPECT_LE(std::abs(residual), 1e-6L * scale) << "x=" << (double)x;
  }
}

TEST(ScalarFlux, PeakMassAndDiffusionEquation) {
  EXPECT_NEAR(scalar_flux(0.5, 0.0, 0.0, sigma), 3.0 / (2 * M_PI * sigma * 0.125), 1e-9);
  const double mass = oracle::integrate_2d(
      [](double y, double z) { return scalar_flux(1.0, y, z, sigma); }, -1, 1, -1, 1);
  EXPECT_NEAR(mass, 1.0, 1e-8);
  EXPECT_THROW(scalar_flux(0.0, 0.0, 0.0, sigma), std::domain_error);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ux(0.3, 1.0), z(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const long double x = ux(rng), s = sigma;
    const long double sd = std::sqrt(s * x * x * x / 3);
    const long double y = z(rng) * sd, zz = z(rng) * sd;
    const long double h = 5e-3L * sd;
    const long double ux_ = d1([&](long double t) { return scalar_flux(t, y, zz, s); }, x, 2e-4L * x);
    const long double lap = d2([&](long double t) { return scalar_flux(x, t, zz, s); }, y, h) +
                            d2([&](long double t) { return scalar_flux(x, y, t, s); }, zz, h);
    const long double rhs = s * x * x / 2 * lap;
    EXPECT_LE(std::abs(ux_ - rhs), 1e-6L * (std::abs(ux_) + std::abs(rhs) + 1e-30L));
  }
}

TEST(Exact3d, FactorisesAndIntegratesToScalarFlux) {
  EXPECT_NEAR(exact_3d(0.8, 0.0, 0.0, 0.0, 0.0, sigma),
              3.0 / (M_PI * M_PI * sigma * sigma * std::pow(0.8, 4)), 1e-6);
  EXPECT_THROW(exact_3d(0.0, 0.0, 0.0, 0.0, 0.0, sigma), std::domain_error);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> ux(0.3, 1.0), z(-1.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    const double x = ux(rng);
    const double sd = std::sqrt(sigma * x * x * x / 3);
    const double y = z(rng) * sd, zz = z(rng) * sd;
    // The (y, eta) and (z, xi) blocks separate, so only the prefactors differ.
    const double cond = std::sqrt(sigma * x / 4);
    const double eta = 1.5 * y / x + z(rng) * cond, xi = 1.5 * zz / x + z(rng) * cond;
    const double g = std::sqrt(3.0) / (M_PI * sigma * x * x);
    const double ratio = exact_3d(x, y, zz, eta, xi, sigma) /
                         (exact_2d(x, y, eta, sigma) * exact_2d(x, zz, xi, sigma));
    EXPECT_NEAR(ratio, 3.0 / (M_PI * M_PI * sigma * sigma * std::pow(x, 4)) / (g * g), 1e-12);
    // Velocity integral over a window of +-12 conditional deviations.
    const double w = 12 * cond;
    const double flux = oracle::integrate_2d(
        [&](double e, double q) { return exact_3d(x, y, zz, e, q, sigma); }, 1.5 * y / x - w,
        1.5 * y / x + w, 1.5 * zz / x - w, 1.5 * zz / x + w, 1e-13);
    EXPECT_NEAR(flux / scalar_flux(x, y, zz, sigma), 1.0, 1e-7);
  }
}

TEST(InitialData, PresetValues) {
  EXPECT_DOUBLE_EQ(eval_initial({InitialKind::dirac_type, 0.1}, 0, 0), 10.0);
  EXPECT_NEAR(eval_initial({InitialKind::maxwellian_type, 0.19}, 0, 0), 0.8270, 5e-5);
  EXPECT_NEAR(eval_initial({InitialKind::hyperbolic_type, 0.19}, 0, 0), 2.2942, 5e-5);
  EXPECT_THROW(eval_initial({InitialKind::dirac_type, 0.0}, 0, 0), std::invalid_argument);
  EXPECT_THROW(eval_initial({InitialKind::dirac_type, 1.0}, 0, 0), std::invalid_argument);
}

TEST(InitialData, PositiveEvenAndRadiallyDecreasing) {
  for (auto kind : {InitialKind::dirac_type, InitialKind::maxwellian_type, InitialKind::hyperbolic_type}) {
    const InitialData d{kind, 0.19};
    for (double angle = 0; angle < 2 * M_PI; angle += 0.4) {
      double prev = d(0, 0);
      for (double r = 0.05; r <= 1.4; r += 0.05) {
        const double y = r * std::cos(angle), eta = r * std::sin(angle);
        const double v = d(y, eta);
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, prev);
        EXPECT_EQ(v, d(-y, eta));
        EXPECT_EQ(v, d(y, -eta));
        prev = v;
      }
    }
  }
}
