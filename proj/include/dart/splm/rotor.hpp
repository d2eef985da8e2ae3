#pragma once

// Second-order dynamics of the swashplateless rotor hub:
//
//     M x'' + C x' + K(beta) x = [u / (a sigma), 0, 0]^T,   x = [theta, zeta, beta]
//
// with K = K_c + K_beta. K_beta is a rank-one matrix acting on the lag column
// only. With the coupled lag-pitch/flap hinge its magnitude follows
// tan(beta + pi/4); with the decoupled flapping hinge the ratio is one and
// the whole system becomes linear time-invariant.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dart/error.hpp"
#include "dart/math.hpp"

namespace dart::splm {

enum class HingeVariant { Coupled, Decoupled };

inline const char* to_string(HingeVariant v) {
    return v == HingeVariant::Coupled ? "coupled" : "decoupled";
}

inline HingeVariant hinge_variant_from_string(const std::string& s) {
    if (s == "coupled") return HingeVariant::Coupled;
    if (s == "decoupled") return HingeVariant::Decoupled;
    throw ConfigError("unknown hinge variant '" + s + "' (expected coupled|decoupled)");
}

// Piecewise-linear blade phase lag versus mean motor speed; held constant
// beyond the table ends, zero when empty.
class PhaseLagTable {
public:
    PhaseLagTable() = default;
    explicit PhaseLagTable(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i].first > points_[i - 1].first)) {
                throw ConfigError("phase-lag table speeds must be strictly increasing");
            }
            if (points_[i].second < points_[i - 1].second) {
                throw ConfigError("phase-lag table must be monotone in speed");
            }
        }
    }

    double operator()(double omega) const {
        if (points_.empty()) return 0.0;
        if (omega <= points_.front().first) return points_.front().second;
        if (omega >= points_.back().first) return points_.back().second;
        const auto hi = std::upper_bound(points_.begin(), points_.end(), omega,
                                         [](double w, const auto& p) { return w < p.first; });
        const auto lo = hi - 1;
        const double f = (omega - lo->first) / (hi->first - lo->first);
        return lo->second + f * (hi->second - lo->second);
    }

    const std::vector<std::pair<double, double>>& points() const { return points_; }

private:
    std::vector<std::pair<double, double>> points_;
};

struct SplmParams {
    Mat3 inertia = Mat3::Identity();
    Mat3 damping = Mat3::Identity();
    Mat3 stiffness = Mat3::Identity();  // constant part K_c
    double downwash = 0.1;              // Phi_3/4, rad
    double hinge_offset = 0.1;          // e, fraction of tip radius
    double lift_slope = 5.73;           // a, 1/rad
    int blades = 2;
    double chord = 0.03;                // m
    double radius = 0.2032;             // m
    HingeVariant variant = HingeVariant::Decoupled;
    double torque_gain = 5e-4;          // C_m, N*m per modulation unit
    PhaseLagTable phase_lag;            // beta_delay(omega)
    double speed_per_throttle = 2.0 * kPi * 40.0 / 900.0;  // rad/s per throttle unit
    double input_per_throttle = 2e-5;   // model input per throttle unit

    void validate() const;
};

inline double rotor_solidity(int blades, double chord, double radius) {
    if (blades < 1) throw ConfigError("blade count must be >= 1");
    if (!(chord > 0.0) || !(radius > 0.0)) throw ConfigError("chord and radius must be > 0");
    return blades * chord / (kPi * radius);
}

inline void SplmParams::validate() const {
    if (!inertia.allFinite() || !damping.allFinite() || !stiffness.allFinite()) {
        throw ConfigError("SPLM matrices must be finite");
    }
    if (!inertia.isApprox(inertia.transpose(), 1e-12)) {
        throw ConfigError("SPLM inertia matrix must be symmetric");
    }
    if (Eigen::LLT<Mat3>(inertia).info() != Eigen::Success) {
        throw ConfigError("SPLM inertia matrix must be positive definite");
    }
    const Mat3 c_sym = 0.5 * (damping + damping.transpose());
    if (Eigen::LLT<Mat3>(c_sym).info() != Eigen::Success) {
        throw ConfigError("SPLM damping matrix must be positive definite");
    }
    if (!(hinge_offset > 0.0 && hinge_offset < 1.0)) {
        throw ConfigError("hinge offset must lie in (0, 1)");
    }
    rotor_solidity(blades, chord, radius);
    if (!(lift_slope > 0.0)) throw ConfigError("blade lift slope must be > 0");
    if (!(input_per_throttle > 0.0)) throw ConfigError("input_per_throttle must be > 0");
    if (!(speed_per_throttle > 0.0)) throw ConfigError("speed_per_throttle must be > 0");
    if (!std::isfinite(downwash)) throw ConfigError("downwash angle must be finite");
}

inline constexpr double kTanGuard = 1e-6;

// d(alpha_b)/d(zeta) for the given hinge variant.
inline double pitch_lag_ratio(HingeVariant variant, double beta) {
    if (variant == HingeVariant::Decoupled) return 1.0;
    // std::tan(pi/4) rounds to 1 - 2^-53; keep the two variants identical at beta = 0.
    if (beta == 0.0) return 1.0;
    const double arg = beta + 0.25 * kPi;
    // Distance to the nearest pole pi/2 + k*pi.
    const double off = std::remainder(arg - 0.5 * kPi, kPi);
    if (std::abs(off) < kTanGuard) {
        throw DomainError("tan(beta + pi/4) singular at beta = " + std::to_string(beta));
    }
    return std::tan(arg);
}

// Column vector multiplying the lag-column entry of K_beta (already /8).
inline Vec3 kbeta_direction(double downwash, double hinge_offset) {
    const double e43 = 4.0 * hinge_offset / 3.0;
    return Vec3(downwash, -downwash * (1.0 - e43), e43 - 1.0) / 8.0;
}

inline Mat3 kbeta_matrix(const SplmParams& p, double beta) {
    Mat3 kb = Mat3::Zero();
    kb.col(1) = kbeta_direction(p.downwash, p.hinge_offset) * pitch_lag_ratio(p.variant, beta);
    return kb;
}

inline Mat3 stiffness_matrix(const SplmParams& p, double beta) {
    return p.stiffness + kbeta_matrix(p, beta);
}

struct RotorState {
    Vec3 x = Vec3::Zero();     // theta, zeta, beta (rad)
    Vec3 xdot = Vec3::Zero();  // rad/s

    double theta_wrapped() const { return wrap_two_pi(x[0]); }
};

// Validated model with cached inverse inertia. One instance may be shared
// read-only between threads; each thread steps its own RotorState.
class SplmModel {
public:
    explicit SplmModel(SplmParams params) : p_(std::move(params)) {
        p_.validate();
        inertia_inv_ = p_.inertia.inverse();
        input_scale_ = 1.0 / (p_.lift_slope * rotor_solidity(p_.blades, p_.chord, p_.radius));
    }

    const SplmParams& params() const { return p_; }
    double solidity() const { return rotor_solidity(p_.blades, p_.chord, p_.radius); }
    // 1 / (a sigma): maps modulation input u to the generalized force on theta.
    double input_scale() const { return input_scale_; }

    Vec3 acceleration(const Vec3& x, const Vec3& xdot, double u) const {
        Vec3 force(u * input_scale_, 0.0, 0.0);
        force -= p_.damping * xdot + stiffness_matrix(p_, x[2]) * x;
        return inertia_inv_ * force;
    }

    // Classic RK4 with the input sampled at the stage times. K(beta) is
    // re-evaluated at every stage.
    template <class InputFn>
    RotorState step(const RotorState& s, InputFn&& u_of_t, double t0, double dt) const {
        if (!(dt > 0.0 && dt <= 2e-3)) throw ParameterError("SPLM step must satisfy 0 < dt <= 2 ms");
        const double h2 = 0.5 * dt;
        const double u0 = u_of_t(t0);
        const double um = u_of_t(t0 + h2);
        const double u1 = u_of_t(t0 + dt);

        const Vec3 k1x = s.xdot;
        const Vec3 k1v = acceleration(s.x, s.xdot, u0);
        const Vec3 k2x = s.xdot + h2 * k1v;
        const Vec3 k2v = acceleration(s.x + h2 * k1x, k2x, um);
        const Vec3 k3x = s.xdot + h2 * k2v;
        const Vec3 k3v = acceleration(s.x + h2 * k2x, k3x, um);
        const Vec3 k4x = s.xdot + dt * k3v;
        const Vec3 k4v = acceleration(s.x + dt * k3x, k4x, u1);

        RotorState out;
        out.x = s.x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        out.xdot = s.xdot + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        return out;
    }

    RotorState step(const RotorState& s, double u, double dt) const {
        return step(s, [u](double) { return u; }, 0.0, dt);
    }

    // Static equilibrium K(beta) x = [u/(a sigma), 0, 0] for a constant input.
    // Fixed-point iteration on beta for the coupled hinge.
    Vec3 static_equilibrium(double u) const {
        const Vec3 b(u * input_scale_, 0.0, 0.0);
        Vec3 x = stiffness_matrix(p_, 0.0).partialPivLu().solve(b);
        if (p_.variant == HingeVariant::Decoupled) return x;
        for (int i = 0; i < 200; ++i) {
            const Vec3 next = stiffness_matrix(p_, x[2]).partialPivLu().solve(b);
            const double change = (next - x).cwiseAbs().maxCoeff();
            x = next;
            if (change < 1e-15) return x;
        }
        throw ParameterError("no static rotor equilibrium for the coupled hinge at this input");
    }

    double energy(const RotorState& s) const {
        const Mat3 k = stiffness_matrix(p_, s.x[2]);
        return 0.5 * s.xdot.dot(p_.inertia * s.xdot) + 0.5 * s.x.dot(k * s.x);
    }

private:
    SplmParams p_;
    Mat3 inertia_inv_;
    double input_scale_ = 1.0;
};

// One RK4 step with a constant input.
inline RotorState splm_step(const RotorState& state, double u, const SplmParams& params, double dt) {
    if (!state.x.allFinite() || !state.xdot.allFinite()) throw ParameterError("rotor state not finite");
    return SplmModel(params).step(state, u, dt);
}

// Physically plausible default hub: light, lightly damped lag and flap modes
// placed near one rotor revolution at hover speed (40 rev/s), coning and lag
// offsets that grow with throttle. Matrices are in normalized model units;
// only relative comparisons between hinge variants are meaningful.
inline SplmParams default_splm_params(HingeVariant variant = HingeVariant::Decoupled) {
    SplmParams p;
    const double w_theta = 2.0 * kPi * 15.0;
    const double w_lag = 2.0 * kPi * 36.0;
    const double w_flap = 2.0 * kPi * 42.0;
    const Vec3 m(1e-5, 2e-6, 2e-6);
    const Vec3 k(m[0] * w_theta * w_theta, m[1] * w_lag * w_lag, m[2] * w_flap * w_flap);
    p.inertia = m.asDiagonal();
    p.stiffness = k.asDiagonal();
    // Motor-angle offset drags the lag hinge back and cones the blades up.
    p.stiffness(1, 0) = -0.3 * k[0];
    p.stiffness(2, 0) = -0.3 * k[0];
    const Vec3 zeta_ratio(0.3, 0.08, 0.08);
    Vec3 c;
    for (int i = 0; i < 3; ++i) c[i] = 2.0 * zeta_ratio[i] * std::sqrt(k[i] * m[i]);
    p.damping = c.asDiagonal();
    p.downwash = 0.1;
    p.hinge_offset = 0.1;
    p.variant = variant;
    return p;
}

}  // namespace dart::splm
