#pragma once

// Newton-Euler rigid body with a fixed-step RK4 integrator.
//
// Frames: world is NED, body is FRD. Orientation q maps body vectors into the
// world frame; angular rate is expressed in the body frame.

#include <cmath>
#include <string>

#include "dart/error.hpp"
#include "dart/math.hpp"

namespace dart::sim {

struct RigidBodyState {
    Vec3 position = Vec3::Zero();  // m, world
    Vec3 velocity = Vec3::Zero();  // m/s, world
    Quat orientation = Quat::Identity();
    Vec3 rate = Vec3::Zero();      // rad/s, body

    bool finite() const {
        return position.allFinite() && velocity.allFinite() && orientation.coeffs().allFinite() &&
               rate.allFinite();
    }
};

struct RigidBodyParams {
    double mass = 1.0;                    // kg
    Mat3 inertia = Mat3::Identity();      // kg m^2, body
    Vec3 gravity = Vec3(0, 0, kGravity);  // m/s^2, world (NED: +z is down)

    void validate() const {
        if (!(mass > 0.0)) throw ConfigError("mass must be > 0");
        if (!inertia.allFinite() || !inertia.isApprox(inertia.transpose(), 1e-12) ||
            Eigen::LLT<Mat3>(inertia).info() != Eigen::Success) {
            throw ConfigError("inertia tensor must be symmetric positive definite");
        }
        if (!gravity.allFinite()) throw ConfigError("gravity must be finite");
    }
};

// Loads held constant over one step. Body-frame forces rotate with the body
// inside the step; world-frame forces do not.
struct BodyLoads {
    Vec3 force_body = Vec3::Zero();   // N
    Vec3 torque_body = Vec3::Zero();  // N*m
    Vec3 force_world = Vec3::Zero();  // N

    bool finite() const { return force_body.allFinite() && torque_body.allFinite() && force_world.allFinite(); }
};

namespace detail {

struct Deriv {
    Vec3 dp;
    Vec3 dv;
    Eigen::Vector4d dq;  // w, x, y, z
    Vec3 dw;
};

inline Deriv rigid_body_deriv(const Vec3& v, const Eigen::Vector4d& q4, const Vec3& w, const BodyLoads& loads,
                              const RigidBodyParams& p, const Mat3& inertia_inv) {
    const Quat q(q4[0], q4[1], q4[2], q4[3]);
    Deriv d;
    d.dp = v;
    d.dv = (q * loads.force_body + loads.force_world) / p.mass + p.gravity;
    // q' = 1/2 q (x) (0, w)
    const Quat qw = q * Quat(0.0, w.x(), w.y(), w.z());
    d.dq = 0.5 * Eigen::Vector4d(qw.w(), qw.x(), qw.y(), qw.z());
    d.dw = inertia_inv * (loads.torque_body - w.cross(p.inertia * w));
    return d;
}

}  // namespace detail

inline RigidBodyState step_6dof(const RigidBodyState& s, const BodyLoads& loads, const RigidBodyParams& p,
                                double dt, long tick = -1) {
    if (!(dt > 0.0 && dt <= 1e-3)) throw ParameterError("rigid-body step must satisfy 0 < dt <= 1 ms");
    if (!loads.finite()) throw SimulationFault(tick, "non-finite force or torque input");
    if (!s.finite()) throw SimulationFault(tick, "non-finite vehicle state");

    const Mat3 inertia_inv = p.inertia.inverse();
    const Eigen::Vector4d q0(s.orientation.w(), s.orientation.x(), s.orientation.y(), s.orientation.z());
    const auto f = [&](const Vec3& v, const Eigen::Vector4d& q, const Vec3& w) {
        return detail::rigid_body_deriv(v, q, w, loads, p, inertia_inv);
    };
    const double h = 0.5 * dt;
    const auto k1 = f(s.velocity, q0, s.rate);
    const auto k2 = f(s.velocity + h * k1.dv, q0 + h * k1.dq, s.rate + h * k1.dw);
    const auto k3 = f(s.velocity + h * k2.dv, q0 + h * k2.dq, s.rate + h * k2.dw);
    const auto k4 = f(s.velocity + dt * k3.dv, q0 + dt * k3.dq, s.rate + dt * k3.dw);

    RigidBodyState out;
    out.position = s.position + (dt / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    out.velocity = s.velocity + (dt / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    const Eigen::Vector4d q1 = q0 + (dt / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    out.orientation = Quat(q1[0], q1[1], q1[2], q1[3]).normalized();
    out.rate = s.rate + (dt / 6.0) * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
    if (!out.finite()) throw SimulationFault(tick, "state became non-finite");
    return out;
}

inline Vec3 angular_momentum_world(const RigidBodyState& s, const RigidBodyParams& p) {
    return s.orientation * (p.inertia * s.rate);
}

// Quadratic bluff-body drag from the air-relative velocity v_rel = wind - v.
inline Vec3 wind_force(const Vec3& vehicle_velocity, const Vec3& wind, double area, double cd, double rho) {
    const Vec3 v_rel = wind - vehicle_velocity;
    return 0.5 * rho * cd * area * v_rel.norm() * v_rel;
}

}  // namespace dart::sim
