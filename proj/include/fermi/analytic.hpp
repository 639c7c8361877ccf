#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fermi {

/// Closed-form pencil-beam solutions for a point source at the origin.
/// Templated on the scalar so tests can differentiate in extended precision.

template <typename Scalar>
Scalar exact_2d(Scalar x, Scalar y, Scalar eta, Scalar sigma_tr) {
  using std::exp;
  using std::sqrt;
  if (!(x > Scalar(0))) throw std::domain_error("exact_2d: x must be positive");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar q = Scalar(3) * y * y / (x * x * x) - Scalar(3) * y * eta / (x * x) +
                   eta * eta / x;
  return sqrt(Scalar(3)) / (pi * sigma_tr * x * x) * exp(-Scalar(2) / sigma_tr * q);
}

template <typename Scalar>
Scalar exact_3d(Scalar x, Scalar y, Scalar z, Scalar eta, Scalar xi, Scalar sigma_tr) {
  using std::exp;
  if (!(x > Scalar(0))) throw std::domain_error("exact_3d: x must be positive");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar q = (eta * eta + xi * xi) / x -
                   Scalar(3) * (y * eta + z * xi) / (x * x) +
                   Scalar(3) * (y * y + z * z) / (x * x * x);
  return Scalar(3) / (pi * pi * sigma_tr * sigma_tr * x * x * x * x) *
         exp(-Scalar(2) / sigma_tr * q);
}

/// Angular integral of exact_3d over (eta, xi) in R^2.
template <typename Scalar>
Scalar scalar_flux(Scalar x, Scalar y, Scalar z, Scalar sigma_tr) {
  using std::exp;
  if (!(x > Scalar(0))) throw std::domain_error("scalar_flux: x must be positive");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  return Scalar(3) / (Scalar(2) * pi * sigma_tr * x * x * x) *
         exp(-Scalar(3) / (Scalar(2) * sigma_tr) * (y * y + z * z) / (x * x * x));
}

/// The reduced (y, eta) solution bound to a cross-section.
struct ExactSolution2D {
  double sigma_tr = 0.002;

  double operator()(double x, double y, double eta) const {
    return exact_2d(x, y, eta, sigma_tr);
  }

  /// Smallest marginal standard deviation of the Gaussian at depth x.
  /// Var(y) = sigma x^3 / 3, Var(eta) = sigma x.
  double length_scale(double x) const {
    return std::sqrt(sigma_tr * std::min(x * x * x / 3.0, x));
  }

  /// ||u(x, ., .)||^2 over R^2, used to sanity-check quadrature.
  double l2_norm_squared(double x) const {
    return std::sqrt(3.0) / (2.0 * std::numbers::pi * sigma_tr * x * x);
  }
};

enum class InitialKind { dirac_type, maxwellian_type, hyperbolic_type };

struct InitialData {
  InitialKind kind = InitialKind::dirac_type;
  double alpha = 0.1;

  double operator()(double y, double eta) const;
};

inline double eval_initial(const InitialData& data, double y, double eta) {
  if (!(data.alpha > 0.0 && data.alpha < 1.0))
    throw std::invalid_argument("eval_initial: alpha must lie in (0, 1)");
  const double r2 = y * y + eta * eta + data.alpha;
  switch (data.kind) {
    case InitialKind::dirac_type:
      return 1.0 / r2;
    case InitialKind::maxwellian_type:
      return std::exp(-r2);
    case InitialKind::hyperbolic_type:
      return 1.0 / std::sqrt(r2);
  }
  return 0.0;
}

inline double InitialData::operator()(double y, double eta) const {
  return eval_initial(*this, y, eta);
}

}  // namespace fermi
