#pragma once

// Fore-motor mapping layer: a steady throttle plus a sinusoid phase-locked to
// the rotor angle. The sinusoid's amplitude sets the cyclic moment magnitude
// and its phase sets the direction.
//
// Phase convention (motor frame, viewed from above the hub):
//
//          +x (theta = 0, positive blade along +x)
//           ^
//           |   M_d
//           |  /
//           | / phi = atan2(M_x, M_y)
//           |/
//   --------+--------> +y
//
// phi is measured from +y toward +x, so M_d along +y gives phi = 0 and
// M_d along +x gives phi = pi/2.

#include <cmath>

#include <Eigen/Dense>

#include "dart/math.hpp"

namespace dart::control {

inline double modulation_phase(const Eigen::Vector2d& mod) {
    if (mod.x() == 0.0 && mod.y() == 0.0) return 0.0;
    return std::atan2(mod.x(), mod.y());
}

// Command sent to the fore-motor ESC for the current rotor angle.
inline double modulation_signal(double throttle1, const Eigen::Vector2d& mod, double theta,
                                double beta_delay) {
    const double amp = mod.norm();
    if (amp == 0.0) return throttle1;
    return throttle1 + amp * std::sin(theta + modulation_phase(mod) - beta_delay);
}

// Modulation vector with a given magnitude and phase (inverse of the above).
inline Eigen::Vector2d modulation_vector(double amplitude, double phase) {
    return {amplitude * std::sin(phase), amplitude * std::cos(phase)};
}

}  // namespace dart::control
