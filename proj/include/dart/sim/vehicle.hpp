#pragma once

// Vehicle plant: rigid body + tandem wings + bluff-body drag + coaxial rotors.
//
// Body frame is the multicopter FRD frame: rotor thrust acts along -z_b, the
// wing span lies along y_b, and in wing-borne flight the wings lift along
// roughly -x_b. Pitching the vehicle nose-down by 80 deg from hover leaves the
// thrust axis 10 deg above the horizon.

#include <cmath>
#include <string>

#include "dart/aero/tandem.hpp"
#include "dart/control/cascade.hpp"
#include "dart/control/mixer.hpp"
#include "dart/error.hpp"
#include "dart/math.hpp"
#include "dart/propulsion/propeller.hpp"
#include "dart/sim/rigid_body.hpp"
#include "dart/splm/rotor.hpp"

namespace dart::sim {

struct VehicleParams {
    double mass = 1.2;  // kg
    Mat3 inertia = Vec3(0.025, 0.02, 0.012).asDiagonal();
    Vec3 gravity = Vec3(0, 0, kGravity);

    // Rotor hubs on the body z axis (coaxial), m from the CG.
    Vec3 fore_rotor_offset = Vec3(0, 0, -0.06);
    Vec3 aft_rotor_offset = Vec3(0, 0, 0.04);

    aero::TandemConfig aero = aero::baseline_config();
    // Body AoA at which both wings sit at their design incidences: the
    // wing-borne attitude with the thrust axis 10 deg above the horizon.
    double cruise_body_aoa = deg2rad(10.0);

    // Bluff-body drag: area seen along the thrust axis, blended with the
    // wing-mode frontal area for flow across it.
    double cd = 1.0;
    double axial_area = 0.0216;  // m^2

    splm::SplmParams splm = splm::default_splm_params(splm::HingeVariant::Decoupled);
    control::AllocationGains allocation;
    control::ActuatorLimits limits;
    control::CascadeGains cascade;

    // Aft propeller coefficients (7 in, synthetic). Its static thrust matches
    // C_T2 * T_d2; forward inflow lowers it through the advance ratio.
    propulsion::PropellerTable aft_prop =
        propulsion::synthetic_table("aft7in", 0.1778, 0.12, -0.105, 0.052, -0.03, 1.1, 23);

    RigidBodyParams body() const { return {mass, inertia, gravity}; }

    void validate() const {
        body().validate();
        aero.validate();
        allocation.validate();
        if (!(cd >= 0.0) || !(axial_area >= 0.0)) throw ConfigError("drag parameters must be >= 0");
        if (!(limits.throttle_max > limits.throttle_min) || !(limits.servo_max > 0.0)) {
            throw ConfigError("actuator limits are empty");
        }
        if (!(aft_prop.coefficients(0.0, aft_prop.multi_sheet() ? aft_prop.speed_min() : 0.0).ct > 0.0)) {
            throw ConfigError("aft propeller needs positive static thrust coefficient");
        }
    }
};

struct VehicleState {
    RigidBodyState body;
    aero::WingMode wing_mode = aero::WingMode::Retracted;
    splm::RotorState fore_rotor;  // passenger SPLM hub state
    double fore_angle = 0.0;      // rad, unwrapped nominal rotor angle
    double aft_speed = 0.0;       // rev/s
};

struct WingLoads {
    Vec3 force_body = Vec3::Zero();
    double pitch_torque = 0.0;  // N*m about y_b, nose-up positive
    double body_aoa = 0.0;      // rad
    double airspeed = 0.0;      // m/s in the x-z plane
};

// Wing lift of both panels over the full AoA envelope. Zero when retracted.
inline WingLoads wing_loads(const VehicleParams& p, const RigidBodyState& s, aero::WingMode mode, const Vec3& wind) {
    WingLoads out;
    const Vec3 v_air_b = s.orientation.conjugate() * (s.velocity - wind);
    const double vx = v_air_b.x();
    const double vz = v_air_b.z();
    out.airspeed = std::hypot(vx, vz);
    out.body_aoa = std::atan2(vx, -vz);
    if (mode == aero::WingMode::Retracted || out.airspeed < 1e-9) return out;

    const double delta = out.body_aoa - p.cruise_body_aoa;
    const double q = aero::dynamic_pressure(p.aero.rho, out.airspeed);
    const auto& f = p.aero.front;
    const auto& r = p.aero.rear;
    const double lf = q * f.area * aero::envelope_lift_coefficient(f.incidence + delta, f);
    const double lr = q * r.area * aero::envelope_lift_coefficient(r.incidence + delta, r);
    // Lift is normal to the x-z airflow, on the side that opposes -x_b flow.
    const Vec3 dir = Vec3(vz, 0.0, -vx) / out.airspeed;
    out.force_body = (lf + lr) * dir;
    out.pitch_torque = lf * f.arm - lr * r.arm;
    return out;
}

// Area seen by the relative wind: axial area along the thrust axis, the
// wing-mode frontal area across it.
inline double projected_area(const VehicleParams& p, const Quat& q, const Vec3& v_rel, aero::WingMode mode) {
    const double n = v_rel.norm();
    if (n < 1e-12) return aero::frontal_area(p.aero, mode);
    const Vec3 axis = q * Vec3::UnitZ();
    const double c = v_rel.dot(axis) / n;
    return p.axial_area * c * c + aero::frontal_area(p.aero, mode) * (1.0 - c * c);
}

inline Vec3 drag_force(const VehicleParams& p, const RigidBodyState& s, aero::WingMode mode, const Vec3& wind) {
    const Vec3 v_rel = wind - s.velocity;
    return wind_force(s.velocity, wind, projected_area(p, s.orientation, v_rel, mode), p.cd, p.aero.rho);
}

struct AftRotorOutput {
    double speed = 0.0;   // rev/s
    double thrust = 0.0;  // N
};

// Aft rotor: throttle sets the rotation speed through the static calibration
// C_T2 * T_d2 = C_T(0) rho n^2 D^4; thrust follows the table at the current
// axial inflow. Inflow beyond the table's J range is clamped to the end row.
inline AftRotorOutput aft_rotor(const VehicleParams& p, double throttle2, double axial_inflow) {
    const auto& t = p.aft_prop;
    const double d = t.diameter();
    const double d4 = d * d * d * d;
    const double rho = p.aero.rho;
    const double thrust_cmd = std::max(0.0, p.allocation.ct2 * throttle2);
    AftRotorOutput out;
    if (thrust_cmd <= 0.0) return out;
    const double ref_speed = t.multi_sheet() ? t.speed_min() : 0.0;
    const double ct0 = t.coefficients(std::max(0.0, t.j_min()), ref_speed).ct;
    double n = std::sqrt(thrust_cmd / (ct0 * rho * d4));
    if (t.multi_sheet()) n = std::clamp(n, t.speed_min(), t.speed_max());
    const double j = std::clamp(std::max(0.0, axial_inflow) / (n * d), t.j_min(), t.j_max());
    const double ct = t.coefficients(j, n).ct;
    out.speed = n;
    out.thrust = std::max(0.0, ct * rho * n * n * d4);
    return out;
}

struct PlantLoads {
    BodyLoads loads;
    WingLoads wing;
    Vec3 drag = Vec3::Zero();
    double fore_thrust = 0.0;
    AftRotorOutput aft;
};

inline PlantLoads plant_loads(const VehicleParams& p, const VehicleState& s, const control::ActuatorCommand& cmd,
                              const Vec3& wind) {
    PlantLoads out;
    out.wing = wing_loads(p, s.body, s.wing_mode, wind);
    out.drag = drag_force(p, s.body, s.wing_mode, wind);
    const Vec3 thrust_axis = -(s.body.orientation * Vec3::UnitZ());
    const double inflow = (s.body.velocity - wind).dot(thrust_axis);
    out.fore_thrust = std::max(0.0, p.allocation.ct1 * cmd.throttle1);
    out.aft = aft_rotor(p, cmd.throttle2, inflow);

    // Torques from cyclic modulation, elevons and rotor drag follow the
    // allocation model exactly.
    const control::Wrench w = control::forward_model(cmd, p.allocation);
    const Vec3 f1(0, 0, -out.fore_thrust);
    const Vec3 f2(0, 0, -out.aft.thrust);
    out.loads.force_body = f1 + f2 + out.wing.force_body;
    out.loads.torque_body = w.torque + p.fore_rotor_offset.cross(f1) + p.aft_rotor_offset.cross(f2) +
                            Vec3(0.0, out.wing.pitch_torque, 0.0);
    out.loads.force_world = out.drag;
    return out;
}

// Upward (world) component of the modelled wing force; the transition
// controller uses it as lift feedforward.
inline double wing_lift_up(const VehicleParams& p, const RigidBodyState& s, aero::WingMode mode, const Vec3& wind) {
    const WingLoads w = wing_loads(p, s, mode, wind);
    return -(s.orientation * w.force_body).z();
}

// Pitch angle of the body (Z-Y-X Euler), rad.
inline double body_pitch(const Quat& q) {
    const Mat3 r = q.toRotationMatrix();
    return std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
}

}  // namespace dart::sim
