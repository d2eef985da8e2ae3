#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dart/control/cascade.hpp"
#include "dart/sim/rigid_body.hpp"
#include "dart/sim/vehicle.hpp"

using namespace dart;
using namespace dart::control;

namespace {

const Mat3 kInertia = Vec3(0.025, 0.02, 0.012).asDiagonal();

Quat yaw_quat(double psi) { return Quat(Eigen::AngleAxisd(psi, Vec3::UnitZ())); }

}  // namespace

TEST(Cascade, EquilibriumWrenchIsWeight) {
    CascadeController c(CascadeGains{}, 1.2, kInertia);
    sim::RigidBodyState s;
    s.position = Vec3(1.0, -2.0, -5.0);
    Setpoint sp;
    sp.position = s.position;
    for (int k = 0; k < 100; ++k) {
        const Wrench w = c.step(sp, s);
        EXPECT_NEAR(w.thrust, 1.2 * kGravity, 1e-12);
        EXPECT_LT(w.torque.norm(), 1e-12);
    }
}

TEST(Cascade, PureYawErrorGivesOnlyYawTorque) {
    CascadeGains g;
    g.pos_p.setZero();
    g.vel_p.setZero();
    g.vel_i.setZero();
    g.att_p = Vec3(0, 0, 3);
    g.rate_p = Vec3(0, 0, 8);
    g.rate_i.setZero();
    CascadeController c(g, 1.2, kInertia);
    sim::RigidBodyState s;
    s.orientation = yaw_quat(0.3);
    Setpoint sp;
    sp.yaw = 0.0;
    double tz = 0.0;
    for (int k = 0; k < 10; ++k) {
        const Wrench w = c.step(sp, s);
        EXPECT_EQ(w.torque.x(), 0.0);
        EXPECT_EQ(w.torque.y(), 0.0);
        tz = w.torque.z();
    }
    EXPECT_LT(tz, 0.0);  // rotate back toward yaw 0
}

TEST(Cascade, AttitudeErrorSignsAndDoubleCover) {
    const Quat q = Quat(Eigen::AngleAxisd(0.2, Vec3(1, 2, 3).normalized()));
    const Quat qn(-q.w(), -q.x(), -q.y(), -q.z());
    const Vec3 e1 = attitude_error(q, Quat::Identity(), 1.0);
    const Vec3 e2 = attitude_error(qn, Quat::Identity(), 1.0);
    EXPECT_LT((e1 - e2).norm(), 1e-12);
    // Small pitch-up setpoint yields a positive y error.
    const Vec3 ep = attitude_error(Quat::Identity(), Quat(Eigen::AngleAxisd(0.1, Vec3::UnitY())), 0.5);
    EXPECT_NEAR(ep.y(), 0.1, 1e-3);
    EXPECT_NEAR(ep.x(), 0.0, 1e-12);
}

TEST(Cascade, AttitudeFromPitch) {
    for (double deg : {-80.0, -45.0, -10.0, 0.0, 20.0}) {
        const Quat q = attitude_from_pitch(deg2rad(deg), 0.4);
        EXPECT_NEAR(rad2deg(sim::body_pitch(q)), deg, 1e-9);
    }
}

// Vertical channel at level attitude: thrust maps one-to-one to the
// acceleration demand, so the closed loop is a double integrator driven by a
// P (50 Hz) / PI (250 Hz) cascade. The oracle runs that loop in plain scalars
// with an exact zero-order-hold integration of z'' = a.
TEST(Cascade, StepMatchesDoubleIntegratorOracle) {
    const CascadeGains g;
    const double m = 1.2;
    const double dt = 1e-3;
    const double step = 1.0;
    CascadeController c(g, m, kInertia);
    sim::RigidBodyParams p{m, kInertia, Vec3(0, 0, kGravity)};
    sim::RigidBodyState s;
    Setpoint sp;
    sp.position = Vec3(0, 0, -step);

    double z = 0.0, vz = 0.0, vsp = 0.0, integ = 0.0, a = 0.0;
    double worst = 0.0;
    double settle_time = -1.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
        // Oracle.
        if (k % 20 == 0) vsp = std::clamp(g.pos_p.z() * (-step - z), -g.vel_max_z, g.vel_max_z);
        if (k % 4 == 0) {
            const double e = vsp - vz;
            integ = std::clamp(integ + g.vel_i.z() * e * 4 * dt, -g.vel_i_limit, g.vel_i_limit);
            a = g.vel_p.z() * e + integ;
        }
        z += vz * dt + 0.5 * a * dt * dt;
        vz += a * dt;

        // Controller + rigid body.
        const Wrench w = c.step(sp, s);
        sim::BodyLoads l;
        l.force_body = Vec3(0, 0, -w.thrust);
        l.torque_body = w.torque;
        s = sim::step_6dof(s, l, p, dt);

        worst = std::max(worst, std::abs(s.position.z() - z));
        const double err = std::abs(s.position.z() + step);
        if (err >= 0.02 * step) settle_time = -1.0;
        else if (settle_time < 0.0) settle_time = (k + 1) * dt;
    }
    EXPECT_LT(worst, 1e-9);
    ASSERT_GT(settle_time, 0.0);
    EXPECT_LT(settle_time, 10.0);
    EXPECT_LT(std::abs(s.position.z() + step), 0.02 * step);
}

TEST(Cascade, IntegratorClampHolds) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    VectorPid pid(Vec3(1, 2, 3), Vec3(40, 80, 10), Vec3::Zero(), 10.0);
    for (int k = 0; k < 100000; ++k) {
        pid.update(Vec3(u(rng), u(rng), u(rng)), 1e-3);
        ASSERT_LE(pid.integral().cwiseAbs().maxCoeff(), 10.0);
    }
    // Saturated rate loop in the full controller.
    CascadeController c(CascadeGains{}, 1.2, kInertia);
    sim::RigidBodyState s;
    s.rate = Vec3(30.0, -30.0, 30.0);
    for (int k = 0; k < 20000; ++k) c.step(Setpoint{}, s);
    EXPECT_LE(c.rate_pid().integral().cwiseAbs().maxCoeff(), CascadeGains{}.rate_i_limit);
}

TEST(Cascade, LoopRatesMustDivideBaseRate) {
    CascadeGains g;
    g.rates.velocity = 300.0;
    EXPECT_THROW(CascadeController(g, 1.2, kInertia), ConfigError);
    g = CascadeGains{};
    g.rates.rate_rp = 2000.0;
    EXPECT_THROW(CascadeController(g, 1.2, kInertia, 1000.0), ConfigError);
    EXPECT_NO_THROW(CascadeController(g, 1.2, kInertia, 2000.0));
}

TEST(Cascade, YawLoopRunsAt200Hz) {
    CascadeGains g;
    g.rate_i.setZero();
    CascadeController c(g, 1.2, kInertia);
    sim::RigidBodyState s;
    Setpoint sp;
    int changes = 0;
    double prev = 0.0;
    for (int k = 0; k < 1000; ++k) {
        s.rate.z() = 0.001 * k;  // changing error every tick
        const double tz = c.step(sp, s).torque.z();
        if (k > 0 && tz != prev) ++changes;
        prev = tz;
    }
    EXPECT_EQ(changes, 199);
}
