#pragma once

// Control allocation for the coaxial rotor pair with swashplateless cyclic
// moments and two rear-wing elevons.
//
// Forward map (actuators -> wrench):
//     f     = C_T1 T1 + C_T2 T2
//     tau_x = C_m Mx
//     tau_y = C_m My + k_ey (d1 + d2)
//     tau_z = k_ez (d1 - d2) - K_t1 T1 + K_t2 T2
//
// The map has six inputs and four outputs. lambda in [0, 1] splits pitch and
// yaw moments between the rotors (lambda) and the elevons (1 - lambda), which
// makes the inverse unique.

#include <algorithm>
#include <cmath>

#include "dart/error.hpp"
#include "dart/math.hpp"

namespace dart::control {

struct AllocationGains {
    double ct1 = 6.0 / 900.0;  // N per throttle unit, fore rotor
    double ct2 = 6.0 / 900.0;  // N per throttle unit, aft rotor
    double kt1 = 2e-4;         // N*m per throttle unit
    double kt2 = 2e-4;
    double cm = 5e-4;          // N*m per modulation unit
    double key = 8e-4;         // N*m per servo unit, pitch
    double kez = 6e-4;         // N*m per servo unit, yaw
    double lambda = 1.0;

    double denominator() const { return ct1 * kt2 + ct2 * kt1; }

    void validate() const {
        if (!(ct1 > 0.0 && ct2 > 0.0)) throw ConfigError("thrust coefficients must be > 0");
        if (!(kt1 > 0.0 && kt2 > 0.0)) throw ConfigError("motor torque coefficients must be > 0");
        if (!(cm > 0.0)) throw ConfigError("modulation torque gain C_m must be > 0");
        if (key == 0.0 || kez == 0.0 || !std::isfinite(key) || !std::isfinite(kez)) {
            throw ConfigError("elevon gains must be finite and non-zero");
        }
        if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
        if (!(denominator() > 0.0)) throw ConfigError("allocation denominator must be > 0");
    }
};

struct DerivedParams {
    double eta;
    double kappa;
    double gamma;
    double delta;
};

inline DerivedParams derived_params(const AllocationGains& g) {
    const double den = g.denominator();
    if (!(den > 0.0) || !std::isfinite(den)) throw ConfigError("allocation denominator must be > 0");
    return {g.kt2 / den, g.kt1 / den, -g.lambda * g.ct2 / den, g.lambda * g.ct1 / den};
}

struct Wrench {
    double thrust = 0.0;       // N
    Vec3 torque = Vec3::Zero();  // N*m, body frame

    Wrench operator+(const Wrench& o) const { return {thrust + o.thrust, torque + o.torque}; }
    Wrench operator*(double s) const { return {thrust * s, torque * s}; }
    bool finite() const { return std::isfinite(thrust) && torque.allFinite(); }
};

struct ActuatorCommand {
    double throttle1 = 0.0;  // T_d,1
    double throttle2 = 0.0;  // T_d,2
    double mod_x = 0.0;      // M_d,x
    double mod_y = 0.0;      // M_d,y
    double servo1 = 0.0;     // delta_d,1
    double servo2 = 0.0;     // delta_d,2

    ActuatorCommand operator+(const ActuatorCommand& o) const {
        return {throttle1 + o.throttle1, throttle2 + o.throttle2, mod_x + o.mod_x,
                mod_y + o.mod_y,         servo1 + o.servo1,       servo2 + o.servo2};
    }
    ActuatorCommand operator*(double s) const {
        return {throttle1 * s, throttle2 * s, mod_x * s, mod_y * s, servo1 * s, servo2 * s};
    }
    double modulation_norm() const { return std::hypot(mod_x, mod_y); }
};

inline ActuatorCommand mix(const Wrench& w, const AllocationGains& g) {
    const DerivedParams d = derived_params(g);
    const double lam = g.lambda;
    const double tx = w.torque.x();
    const double ty = w.torque.y();
    const double tz = w.torque.z();
    ActuatorCommand c;
    c.throttle1 = d.eta * w.thrust + d.gamma * tz;
    c.throttle2 = d.kappa * w.thrust + d.delta * tz;
    c.mod_x = tx / g.cm;
    c.mod_y = lam * ty / g.cm;
    const double pitch_share = (1.0 - lam) * ty / (2.0 * g.key);
    const double yaw_share = (1.0 - lam) * tz / (2.0 * g.kez);
    c.servo1 = pitch_share + yaw_share;
    c.servo2 = pitch_share - yaw_share;
    return c;
}

inline Wrench forward_model(const ActuatorCommand& c, const AllocationGains& g) {
    Wrench w;
    w.thrust = g.ct1 * c.throttle1 + g.ct2 * c.throttle2;
    w.torque.x() = g.cm * c.mod_x;
    w.torque.y() = g.cm * c.mod_y + g.key * (c.servo1 + c.servo2);
    w.torque.z() = g.kez * (c.servo1 - c.servo2) - g.kt1 * c.throttle1 + g.kt2 * c.throttle2;
    return w;
}

struct ActuatorLimits {
    double throttle_min = 0.0;
    double throttle_max = 2000.0;
    double servo_max = 500.0;  // symmetric
};

struct SaturatedCommand {
    ActuatorCommand command;
    double torque_scale = 1.0;  // 1 when the full torque demand fits
    bool thrust_clipped = false;
};

inline bool within_limits(const ActuatorCommand& c, const ActuatorLimits& lim) {
    constexpr double tol = 1e-9;
    const auto in = [&](double v, double lo, double hi) { return v >= lo - tol && v <= hi + tol; };
    if (!in(c.throttle1, lim.throttle_min, lim.throttle_max)) return false;
    if (!in(c.throttle2, lim.throttle_min, lim.throttle_max)) return false;
    if (!in(c.servo1, -lim.servo_max, lim.servo_max)) return false;
    if (!in(c.servo2, -lim.servo_max, lim.servo_max)) return false;
    // The modulated fore-motor command must stay inside the throttle range.
    const double head = std::min(c.throttle1 - lim.throttle_min, lim.throttle_max - c.throttle1);
    return c.modulation_norm() <= head + tol;
}

// Thrust-priority saturation: the thrust share is kept (clamped only if it is
// infeasible on its own) and the torque share is scaled uniformly by the
// largest factor in [0, 1] that satisfies every actuator limit.
inline SaturatedCommand saturate(const Wrench& w, const AllocationGains& g, const ActuatorLimits& lim) {
    SaturatedCommand out;
    ActuatorCommand base = mix(Wrench{w.thrust, Vec3::Zero()}, g);
    const ActuatorCommand torque_part = mix(Wrench{0.0, w.torque}, g);

    const double lo = lim.throttle_min;
    const double hi = lim.throttle_max;
    const double t1 = std::clamp(base.throttle1, lo, hi);
    const double t2 = std::clamp(base.throttle2, lo, hi);
    out.thrust_clipped = t1 != base.throttle1 || t2 != base.throttle2;
    base.throttle1 = t1;
    base.throttle2 = t2;

    if (within_limits(base + torque_part, lim)) {
        out.command = base + torque_part;
        return out;
    }
    double s_ok = 0.0;
    double s_bad = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double s = 0.5 * (s_ok + s_bad);
        if (within_limits(base + torque_part * s, lim)) {
            s_ok = s;
        } else {
            s_bad = s;
        }
    }
    out.torque_scale = s_ok;
    out.command = base + torque_part * s_ok;
    return out;
}

}  // namespace dart::control
