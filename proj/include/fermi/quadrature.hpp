#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace fermi {

/// Point in barycentric coordinates with a weight normalised to unit area.
struct TriQuadPoint {
  Eigen::Vector3d lambda;
  double weight;
};

/// Symmetric triangle rules (Dunavant). Supported degrees: 1, 2, 4, 8.
std::span<const TriQuadPoint> triangle_rule(int degree);

/// Gauss-Legendre nodes/weights on [0, 1].
struct LineQuadPoint {
  double t;
  double weight;
};
std::span<const LineQuadPoint> line_rule(int points);

}  // namespace fermi
