#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dart/sim/rigid_body.hpp"

using namespace dart;
using namespace dart::sim;

namespace {

RigidBodyParams free_params() {
    RigidBodyParams p;
    p.mass = 1.3;
    p.inertia = Vec3(0.02, 0.035, 0.05).asDiagonal();
    p.gravity = Vec3::Zero();
    return p;
}

}  // namespace

TEST(RigidBody, FreeBodyKeepsVelocityAndRate) {
    const auto p = free_params();
    RigidBodyState s;
    s.velocity = Vec3(1.0, -2.0, 0.5);
    s.rate = Vec3(0.0, 0.0, 0.7);  // principal axis: constant rate
    for (int k = 0; k < 10000; ++k) s = step_6dof(s, {}, p, 1e-3);
    EXPECT_LT((s.velocity - Vec3(1.0, -2.0, 0.5)).norm(), 1e-12);
    EXPECT_LT((s.rate - Vec3(0.0, 0.0, 0.7)).norm(), 1e-12);
    EXPECT_NEAR(s.position.x(), 10.0, 1e-9);
}

TEST(RigidBody, FreeFall) {
    RigidBodyParams p = free_params();
    p.gravity = Vec3(0, 0, 9.81);
    RigidBodyState s;
    for (int k = 0; k < 1000; ++k) s = step_6dof(s, {}, p, 1e-3);
    EXPECT_NEAR(s.velocity.z(), 9.81, 1e-9);
    EXPECT_NEAR(s.position.z(), 0.5 * 9.81, 1e-9);
}

TEST(RigidBody, TumblingConservesAngularMomentum) {
    const auto p = free_params();
    RigidBodyState s;
    s.rate = Vec3(0.3, 2.0, -0.4);  // near the unstable intermediate axis
    const Vec3 h0 = angular_momentum_world(s, p);
    const double e0 = 0.5 * s.rate.dot(p.inertia * s.rate);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        s = step_6dof(s, {}, p, 1e-3);
        worst = std::max(worst, (angular_momentum_world(s, p) - h0).norm() / h0.norm());
        ASSERT_NEAR(s.orientation.norm(), 1.0, 1e-9);
    }
    EXPECT_LT(worst, 1e-6);
    EXPECT_NEAR(0.5 * s.rate.dot(p.inertia * s.rate), e0, 1e-6 * e0);
}

TEST(RigidBody, BodyForceRotatesWithBody) {
    RigidBodyParams p = free_params();
    p.inertia = Mat3::Identity();
    RigidBodyState s;
    s.rate = Vec3(0, 0, 2.0 * kPi);  // one turn per second about z
    BodyLoads l;
    l.force_body = Vec3(p.mass, 0, 0);
    for (int k = 0; k < 1000; ++k) s = step_6dof(s, l, p, 1e-3);
    // A spinning unit body-x acceleration averages to zero over a full turn.
    EXPECT_LT(s.velocity.norm(), 1e-6);
}

TEST(RigidBody, DeterministicBitExact) {
    RigidBodyParams p = free_params();
    p.gravity = Vec3(0, 0, kGravity);
    BodyLoads l;
    l.force_body = Vec3(0.1, -0.3, -12.0);
    l.torque_body = Vec3(0.001, -0.002, 0.0005);
    l.force_world = Vec3(0.4, 0.0, 0.0);
    RigidBodyState a, b;
    for (int k = 0; k < 5000; ++k) {
        a = step_6dof(a, l, p, 1e-3);
        b = step_6dof(b, l, p, 1e-3);
    }
    EXPECT_EQ(a.position, b.position);
    EXPECT_EQ(a.velocity, b.velocity);
    EXPECT_EQ(a.orientation.coeffs(), b.orientation.coeffs());
    EXPECT_EQ(a.rate, b.rate);
}

TEST(RigidBody, FaultsOnNonFiniteInput) {
    const auto p = free_params();
    BodyLoads l;
    l.torque_body.x() = std::numeric_limits<double>::quiet_NaN();
    try {
        step_6dof(RigidBodyState{}, l, p, 1e-3, 42);
        FAIL() << "expected SimulationFault";
    } catch (const SimulationFault& e) {
        EXPECT_EQ(e.tick(), 42);
    }
    RigidBodyState bad;
    bad.velocity.y() = std::numeric_limits<double>::infinity();
    EXPECT_THROW(step_6dof(bad, {}, p, 1e-3), SimulationFault);
}

TEST(RigidBody, StepSizeBounds) {
    const auto p = free_params();
    EXPECT_THROW(step_6dof(RigidBodyState{}, {}, p, 2e-3), ParameterError);
    EXPECT_THROW(step_6dof(RigidBodyState{}, {}, p, 0.0), ParameterError);
    EXPECT_NO_THROW(step_6dof(RigidBodyState{}, {}, p, 1e-3));
}

TEST(RigidBody, ParamsValidation) {
    RigidBodyParams p = free_params();
    p.mass = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = free_params();
    p.inertia(0, 1) = 0.01;
    EXPECT_THROW(p.validate(), ConfigError);  // asymmetric
    p = free_params();
    p.inertia(2, 2) = -1.0;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(WindForce, Examples) {
    const Vec3 v(1.0, 2.0, 0.0);
    EXPECT_EQ(wind_force(v, v, 0.1, 1.0, 1.225), Vec3::Zero());
    const Vec3 f = wind_force(Vec3::Zero(), Vec3(5, 0, 0), 0.1, 1.0, 1.225);
    EXPECT_NEAR(f.x(), 1.53125, 1e-12);
    const Vec3 h = wind_force(Vec3::Zero(), Vec3(5, 0, 0), 0.05, 1.0, 1.225);
    EXPECT_DOUBLE_EQ(h.x(), 0.5 * f.x());
    // Force points along the relative flow.
    const Vec3 g = wind_force(Vec3(3, 0, 0), Vec3::Zero(), 0.1, 1.0, 1.225);
    EXPECT_LT(g.x(), 0.0);
}
