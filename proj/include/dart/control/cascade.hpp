#pragma once

// Cascaded flight controller:
//
//   position P -> velocity PID -> thrust vector -> attitude P -> rate PID -> torque
//
// Every loop runs on its own sub-rate of the base clock and holds its output
// in between. Two operating modes share the attitude and rate loops:
//   Hover       position hold, thrust vector from the velocity loop.
//   Transition  attitude follows a pitch schedule; the horizontal loops are
//               off and collective thrust holds altitude together with a
//               wing-lift feedforward supplied by the caller.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "dart/control/mixer.hpp"
#include "dart/error.hpp"
#include "dart/math.hpp"
#include "dart/sim/rigid_body.hpp"

namespace dart::control {

struct LoopRates {
    double position = 50.0;   // Hz
    double velocity = 250.0;
    double attitude = 1000.0;
    double rate_rp = 1000.0;  // roll/pitch rate
    double rate_yaw = 200.0;
};

struct CascadeGains {
    Vec3 pos_p{1.0, 1.0, 1.2};
    Vec3 vel_p{3.0, 3.0, 4.0};
    Vec3 vel_i{1.0, 1.0, 1.5};
    Vec3 vel_d{0.0, 0.0, 0.0};
    double vel_i_limit = 4.0;        // m/s^2
    double vel_max_xy = 5.0;         // m/s
    double vel_max_z = 3.0;          // m/s
    double tilt_max = deg2rad(40.0); // hover mode

    Vec3 att_p{6.0, 6.0, 3.0};
    double yaw_weight = 0.5;

    Vec3 rate_p{20.0, 20.0, 8.0};
    Vec3 rate_i{5.0, 5.0, 2.0};
    Vec3 rate_d{0.0, 0.0, 0.0};
    double rate_i_limit = 10.0;      // rad/s^2

    // Transition-mode altitude hold (acceleration per metre and per m/s).
    double alt_p = 1.5;
    double alt_d = 3.0;
    double tilt_cos_min = std::cos(deg2rad(85.0));

    LoopRates rates;

    // Number of base ticks between two updates of a loop running at `hz`.
    static int divider(double base_hz, double hz, const char* name) {
        if (!(hz > 0.0) || hz > base_hz * (1.0 + 1e-12)) {
            throw ConfigError(std::string(name) + " rate must lie in (0, base rate]");
        }
        const double ratio = base_hz / hz;
        const long n = std::lround(ratio);
        if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
            throw ConfigError(std::string(name) + " rate must divide the simulation base rate");
        }
        return static_cast<int>(n);
    }

    void validate(double base_hz) const {
        const auto finite = [](const Vec3& v) { return v.allFinite(); };
        if (!finite(pos_p) || !finite(vel_p) || !finite(vel_i) || !finite(vel_d) || !finite(att_p) ||
            !finite(rate_p) || !finite(rate_i) || !finite(rate_d)) {
            throw ConfigError("cascade gains must be finite");
        }
        if (!(vel_i_limit >= 0.0) || !(rate_i_limit >= 0.0)) throw ConfigError("integrator limits must be >= 0");
        if (!(yaw_weight >= 0.0 && yaw_weight <= 1.0)) throw ConfigError("yaw weight must lie in [0, 1]");
        if (!(tilt_max > 0.0 && tilt_max < 0.5 * kPi)) throw ConfigError("tilt limit must lie in (0, 90) deg");
        divider(base_hz, rates.position, "position loop");
        divider(base_hz, rates.velocity, "velocity loop");
        divider(base_hz, rates.attitude, "attitude loop");
        divider(base_hz, rates.rate_rp, "roll/pitch rate loop");
        divider(base_hz, rates.rate_yaw, "yaw rate loop");
    }
};

enum class ControlMode { Hover, Transition };

struct Setpoint {
    ControlMode mode = ControlMode::Hover;
    Vec3 position = Vec3::Zero();  // hover: world NED; transition: only z is used
    double yaw = 0.0;
    double pitch = 0.0;            // transition only
    double lift_ff = 0.0;          // N, upward wing lift estimate (transition only)
};

// Shortest-rotation attitude error with the tilt (body z axis) corrected first
// and the remaining rotation about z scaled by yaw_weight. Returns the
// rotation vector, body frame.
inline Vec3 attitude_error(const Quat& q, const Quat& q_sp, double yaw_weight) {
    const Vec3 e_z = q * Vec3::UnitZ();
    const Vec3 e_z_d = q_sp * Vec3::UnitZ();
    Quat qd_red = Quat::FromTwoVectors(e_z, e_z_d);
    if (std::abs(qd_red.x()) > 1.0 - 1e-5 || std::abs(qd_red.y()) > 1.0 - 1e-5) {
        // Thrust axes nearly opposite: the reduced attitude is ill defined.
        qd_red = q_sp;
    } else {
        qd_red = qd_red * q;
    }
    Quat q_mix = qd_red.conjugate() * q_sp;
    if (q_mix.w() < 0.0) q_mix.coeffs() *= -1.0;
    const double w = std::clamp(q_mix.w(), -1.0, 1.0);
    const double z = std::clamp(q_mix.z(), -1.0, 1.0);
    const Quat yaw_part(std::cos(yaw_weight * std::acos(w)), 0.0, 0.0, std::sin(yaw_weight * std::asin(z)));
    const Quat qd = qd_red * yaw_part;
    Quat qe = q.conjugate() * qd;
    if (qe.w() < 0.0) qe.coeffs() *= -1.0;
    return 2.0 * qe.vec();
}

// Attitude whose body z axis is `body_z` (unit, world) with the given heading.
inline Quat attitude_from_thrust_axis(const Vec3& body_z, double yaw) {
    const Vec3 y_c(-std::sin(yaw), std::cos(yaw), 0.0);
    Vec3 body_x = y_c.cross(body_z);
    if (body_z.z() < 0.0) body_x = -body_x;
    if (body_x.norm() < 1e-9) body_x = Vec3::UnitX();  // thrust axis horizontal along y_c
    body_x.normalize();
    const Vec3 body_y = body_z.cross(body_x);
    Mat3 r;
    r.col(0) = body_x;
    r.col(1) = body_y;
    r.col(2) = body_z;
    return Quat(r).normalized();
}

inline Quat attitude_from_pitch(double pitch, double yaw) {
    return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()));
}

// PID on a 3-vector with per-axis gains and a symmetric integrator clamp.
class VectorPid {
public:
    VectorPid() = default;
    VectorPid(Vec3 p, Vec3 i, Vec3 d, double i_limit) : p_(p), i_(i), d_(d), limit_(i_limit) {}

    Vec3 update(const Vec3& error, double dt, const Vec3& mask = Vec3::Ones()) {
        Vec3 deriv = Vec3::Zero();
        if (has_prev_) deriv = (error - prev_) / dt;
        prev_ = error;
        has_prev_ = true;
        integral_ += (i_.cwiseProduct(error) * dt).cwiseProduct(mask);
        integral_ = integral_.cwiseMax(-limit_).cwiseMin(limit_);
        return (p_.cwiseProduct(error) + integral_ + d_.cwiseProduct(deriv)).cwiseProduct(mask);
    }

    const Vec3& integral() const { return integral_; }
    void reset() {
        integral_.setZero();
        prev_.setZero();
        has_prev_ = false;
    }

private:
    Vec3 p_ = Vec3::Zero();
    Vec3 i_ = Vec3::Zero();
    Vec3 d_ = Vec3::Zero();
    double limit_ = 0.0;
    Vec3 integral_ = Vec3::Zero();
    Vec3 prev_ = Vec3::Zero();
    bool has_prev_ = false;
};

// Loop-level trace of the most recent tick.
struct ControllerTrace {
    Vec3 velocity_sp = Vec3::Zero();
    Vec3 accel_sp = Vec3::Zero();
    Quat attitude_sp = Quat::Identity();
    Vec3 rate_sp = Vec3::Zero();
    Wrench wrench;
};

class CascadeController {
public:
    CascadeController(CascadeGains gains, double mass, Mat3 inertia, double base_rate_hz = 1000.0,
                      double gravity = kGravity)
        : g_(std::move(gains)), mass_(mass), inertia_(std::move(inertia)), base_hz_(base_rate_hz), grav_(gravity) {
        g_.validate(base_hz_);
        if (!(mass_ > 0.0)) throw ConfigError("controller mass must be > 0");
        div_pos_ = CascadeGains::divider(base_hz_, g_.rates.position, "position loop");
        div_vel_ = CascadeGains::divider(base_hz_, g_.rates.velocity, "velocity loop");
        div_att_ = CascadeGains::divider(base_hz_, g_.rates.attitude, "attitude loop");
        div_rp_ = CascadeGains::divider(base_hz_, g_.rates.rate_rp, "roll/pitch rate loop");
        div_yaw_ = CascadeGains::divider(base_hz_, g_.rates.rate_yaw, "yaw rate loop");
        vel_pid_ = VectorPid(g_.vel_p, g_.vel_i, g_.vel_d, g_.vel_i_limit);
        rate_rp_pid_ = VectorPid(g_.rate_p, g_.rate_i, g_.rate_d, g_.rate_i_limit);
        rate_yaw_pid_ = VectorPid(g_.rate_p, g_.rate_i, g_.rate_d, g_.rate_i_limit);
    }

    const CascadeGains& gains() const { return g_; }
    const ControllerTrace& trace() const { return trace_; }
    std::uint64_t ticks() const { return tick_; }
    const VectorPid& rate_pid() const { return rate_rp_pid_; }
    const VectorPid& velocity_pid() const { return vel_pid_; }

    void reset() {
        tick_ = 0;
        vel_pid_.reset();
        rate_rp_pid_.reset();
        rate_yaw_pid_.reset();
        trace_ = ControllerTrace{};
        thrust_ = 0.0;
        torque_ = Vec3::Zero();
    }

    // One base-rate tick.
    Wrench step(const Setpoint& sp, const sim::RigidBodyState& s) {
        const double dt_base = 1.0 / base_hz_;
        const Vec3 up_accel(0.0, 0.0, -grav_);  // gravity compensation, NED
        const Vec3 thrust_axis = -(s.orientation * Vec3::UnitZ());

        if (sp.mode == ControlMode::Hover) {
            if (due(div_pos_)) {
                Vec3 v = g_.pos_p.cwiseProduct(sp.position - s.position);
                const double vxy = std::hypot(v.x(), v.y());
                if (vxy > g_.vel_max_xy) v.head<2>() *= g_.vel_max_xy / vxy;
                v.z() = std::clamp(v.z(), -g_.vel_max_z, g_.vel_max_z);
                trace_.velocity_sp = v;
            }
            if (due(div_vel_)) {
                Vec3 a = vel_pid_.update(trace_.velocity_sp - s.velocity, div_vel_ * dt_base);
                // Limit tilt: horizontal acceleration against the vertical demand.
                const double vertical = grav_ - a.z();
                const double a_xy_max = std::max(0.0, vertical) * std::tan(g_.tilt_max);
                const double a_xy = std::hypot(a.x(), a.y());
                if (a_xy > a_xy_max && a_xy > 0.0) a.head<2>() *= a_xy_max / a_xy;
                trace_.accel_sp = a;
                const Vec3 force = mass_ * (a + up_accel);  // desired world force from the rotors
                const double fn = force.norm();
                const Vec3 body_z = fn > 1e-9 ? Vec3(-force / fn) : Vec3(0, 0, 1);
                trace_.attitude_sp = attitude_from_thrust_axis(body_z, sp.yaw);
                thrust_ = std::max(0.0, force.dot(thrust_axis));
            }
        } else {
            trace_.attitude_sp = attitude_from_pitch(sp.pitch, sp.yaw);
            if (due(div_vel_)) {
                // Upward acceleration demand, NED: z grows downward.
                const double a_up = g_.alt_p * (s.position.z() - sp.position.z()) + g_.alt_d * s.velocity.z();
                trace_.accel_sp = Vec3(0.0, 0.0, -a_up);
                const double cos_tilt = std::max(g_.tilt_cos_min, -thrust_axis.z());
                thrust_ = std::max(0.0, (mass_ * (grav_ + a_up) - sp.lift_ff) / cos_tilt);
            }
        }

        if (due(div_att_)) {
            trace_.rate_sp = g_.att_p.cwiseProduct(attitude_error(s.orientation, trace_.attitude_sp, g_.yaw_weight));
        }
        const Vec3 rate_err = trace_.rate_sp - s.rate;
        if (due(div_rp_)) {
            const Vec3 acc = rate_rp_pid_.update(rate_err, div_rp_ * dt_base, Vec3(1, 1, 0));
            const Vec3 tau = inertia_ * Vec3(acc.x(), acc.y(), 0.0);
            torque_.x() = tau.x();
            torque_.y() = tau.y();
        }
        if (due(div_yaw_)) {
            const Vec3 acc = rate_yaw_pid_.update(rate_err, div_yaw_ * dt_base, Vec3(0, 0, 1));
            torque_.z() = (inertia_ * Vec3(0.0, 0.0, acc.z())).z();
        }
        ++tick_;
        trace_.wrench = Wrench{thrust_, torque_};
        return trace_.wrench;
    }

private:
    bool due(int divider) const { return tick_ % static_cast<std::uint64_t>(divider) == 0; }

    CascadeGains g_;
    double mass_;
    Mat3 inertia_;
    double base_hz_;
    double grav_;
    int div_pos_ = 1, div_vel_ = 1, div_att_ = 1, div_rp_ = 1, div_yaw_ = 1;
    VectorPid vel_pid_;
    VectorPid rate_rp_pid_;
    VectorPid rate_yaw_pid_;
    ControllerTrace trace_;
    double thrust_ = 0.0;
    Vec3 torque_ = Vec3::Zero();
    std::uint64_t tick_ = 0;
};

}  // namespace dart::control
