#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <span>
#include <string_view>

namespace sidql {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

/// Right-handed rotation about a coordinate axis (0 = x, 1 = y, 2 = z).
inline Mat3 axis_rotation(int axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r = Mat3::Identity();
  switch (axis) {
    case 0:
      r << 1, 0, 0, 0, c, -s, 0, s, c;
      break;
    case 1:
      r << c, 0, s, 0, 1, 0, -s, 0, c;
      break;
    default:
      r << c, -s, 0, s, c, 0, 0, 0, 1;
      break;
  }
  return r;
}

/// Euler rotation for an ASF axis-order string such as "XYZ": the first
/// letter is applied first, so "XYZ" yields Rz * Ry * Rx. `xyz` holds the
/// angles for the x, y and z axes regardless of order.
inline Mat3 euler_rotation(std::string_view order, const Vec3& xyz) {
  Mat3 r = Mat3::Identity();
  for (char ch : order) {
    const int axis = (ch == 'X' || ch == 'x') ? 0 : (ch == 'Y' || ch == 'y') ? 1 : 2;
    r = axis_rotation(axis, xyz[axis]) * r;
  }
  return r;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

}  // namespace sidql
