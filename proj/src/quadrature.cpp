#include "fermi/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace fermi {

namespace {

void add_orbit_1(std::vector<TriQuadPoint>& r, double w) {
  r.push_back({Eigen::Vector3d::Constant(1.0 / 3.0), w});
}

void add_orbit_3(std::vector<TriQuadPoint>& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.push_back({Eigen::Vector3d(a, a, b), w});
  r.push_back({Eigen::Vector3d(a, b, a), w});
  r.push_back({Eigen::Vector3d(b, a, a), w});
}

void add_orbit_6(std::vector<TriQuadPoint>& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  r.push_back({Eigen::Vector3d(a, b, c), w});
  r.push_back({Eigen::Vector3d(a, c, b), w});
  r.push_back({Eigen::Vector3d(b, a, c), w});
  r.push_back({Eigen::Vector3d(b, c, a), w});
  r.push_back({Eigen::Vector3d(c, a, b), w});
  r.push_back({Eigen::Vector3d(c, b, a), w});
}

std::vector<TriQuadPoint> make_rule(int degree) {
  std::vector<TriQuadPoint> r;
  switch (degree) {
    case 1:
      add_orbit_1(r, 1.0);
      break;
    case 2:
      add_orbit_3(r, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 4:
      add_orbit_3(r, 0.44594849091596488632, 0.22338158967801146570);
      add_orbit_3(r, 0.091576213509770743460, 0.10995174365532186764);
      break;
    case 8:
      add_orbit_1(r, 0.14431560767778716825);
      add_orbit_3(r, 0.45929258829272315602, 0.09509163426728462479);
      add_orbit_3(r, 0.17056930775176020662, 0.10321737053471825028);
      add_orbit_3(r, 0.05054722831703097545, 0.03245849762319808031);
      add_orbit_6(r, 0.26311282963463811342, 0.00839477740995760533,
                   0.02723031417443499426);
      break;
    default:
      throw std::invalid_argument("triangle_rule: unsupported degree");
  }
  return r;
}

}  // namespace

std::span<const TriQuadPoint> triangle_rule(int degree) {
  static const std::vector<TriQuadPoint> d1 = make_rule(1), d2 = make_rule(2),
                                         d4 = make_rule(4), d8 = make_rule(8);
  switch (degree) {
    case 1: return d1;
    case 2: return d2;
    case 3:
    case 4: return d4;
    case 5:
    case 6:
    case 7:
    case 8: return d8;
    default: throw std::invalid_argument("triangle_rule: unsupported degree");
  }
}

std::span<const LineQuadPoint> line_rule(int points) {
  static const std::vector<LineQuadPoint> g1{{0.5, 1.0}};
  static const std::vector<LineQuadPoint> g2{
      {0.5 - 0.5 / std::sqrt(3.0), 0.5}, {0.5 + 0.5 / std::sqrt(3.0), 0.5}};
  static const std::vector<LineQuadPoint> g3{
      {0.5 - 0.5 * std::sqrt(0.6), 5.0 / 18.0},
      {0.5, 8.0 / 18.0},
      {0.5 + 0.5 * std::sqrt(0.6), 5.0 / 18.0}};
  switch (points) {
    case 1: return g1;
    case 2: return g2;
    case 3: return g3;
    default: throw std::invalid_argument("line_rule: unsupported point count");
  }
}

}  // namespace fermi
