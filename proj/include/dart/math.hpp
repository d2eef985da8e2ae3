#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace dart {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kGravity = 9.80665;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps to [0, 2*pi).
inline double wrap_two_pi(double angle) {
    double w = std::fmod(angle, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w;
}

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace dart
