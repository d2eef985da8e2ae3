#pragma once

// Tandem-wing lift and pitching-moment model with the longitudinal static
// stability analysis, plus frontal-area bookkeeping for the wing modes.
//
// Sign convention: pitching moment is positive nose-up. The front wing sits
// ahead of the CG, so its lift produces a nose-up moment; the rear wing's lift
// produces a nose-down moment:
//
//     M = F_front * L_front - F_rear * L_rear
//
// A statically stable configuration has dM/d(delta_alpha) < 0.

#include <algorithm>
#include <cmath>
#include <string>

#include "dart/error.hpp"
#include "dart/math.hpp"

namespace dart::aero {

// Linear-validity range of the airfoil lift curve.
inline constexpr double kAlphaMin = deg2rad(-5.0);
inline constexpr double kAlphaMax = deg2rad(10.0);

struct WingPanel {
    double area = 0.0;          // m^2
    double lift_slope = 0.0;    // 1/rad
    double cl0 = 0.0;           // lift coefficient at zero airfoil AoA
    double incidence = 0.0;     // rad, airfoil AoA at the cruise equilibrium
    double arm = 0.0;           // m, aerodynamic centre to CG

    void validate(const std::string& name = "wing") const {
        if (!(area > 0.0)) throw ConfigError(name + ": area must be > 0");
        if (!(arm > 0.0)) throw ConfigError(name + ": moment arm must be > 0");
        if (!(lift_slope > 0.0)) throw ConfigError(name + ": lift slope must be > 0");
        if (!std::isfinite(cl0) || !std::isfinite(incidence)) {
            throw ConfigError(name + ": non-finite airfoil parameters");
        }
    }
};

enum class WingMode { Extended, Retracted };

inline const char* to_string(WingMode m) {
    return m == WingMode::Extended ? "extended" : "retracted";
}

inline WingMode wing_mode_from_string(const std::string& s) {
    if (s == "extended") return WingMode::Extended;
    if (s == "retracted") return WingMode::Retracted;
    throw ConfigError("unknown wing mode '" + s + "' (expected extended|retracted)");
}

struct TandemConfig {
    WingPanel front;
    WingPanel rear;
    double rho = 1.225;                // kg/m^3
    double frontal_area_ext = 0.0;     // m^2, lateral exposure with wings extended
    double retracted_fraction = 0.338; // retracted / extended exposure

    void validate() const {
        front.validate("front wing");
        rear.validate("rear wing");
        if (!(rho > 0.0)) throw ConfigError("air density must be > 0");
        if (!(frontal_area_ext > 0.0)) throw ConfigError("extended frontal area must be > 0");
        if (!(retracted_fraction > 0.0 && retracted_fraction <= 1.0)) {
            throw ConfigError("retracted fraction must lie in (0, 1]");
        }
    }
};

inline double lift_coefficient(double alpha_airfoil, const WingPanel& panel) {
    // 1e-12 rad slack so that endpoints computed in degrees still pass.
    constexpr double slack = 1e-12;
    if (!(alpha_airfoil >= kAlphaMin - slack && alpha_airfoil <= kAlphaMax + slack)) {
        throw RangeError("airfoil AoA " + std::to_string(rad2deg(alpha_airfoil)) +
                         " deg outside the linear lift range [-5, 10] deg");
    }
    return panel.lift_slope * alpha_airfoil + panel.cl0;
}

inline double dynamic_pressure(double rho, double v) { return 0.5 * rho * v * v; }

inline double wing_force(double v, double alpha_airfoil, const WingPanel& panel, double rho) {
    if (!(v >= 0.0)) throw ParameterError("airspeed must be >= 0");
    return dynamic_pressure(rho, v) * panel.area * lift_coefficient(alpha_airfoil, panel);
}

inline double pitch_moment(const TandemConfig& config, double v, double delta_alpha) {
    const double ff = wing_force(v, config.front.incidence + delta_alpha, config.front, config.rho);
    const double fr = wing_force(v, config.rear.incidence + delta_alpha, config.rear, config.rho);
    return ff * config.front.arm - fr * config.rear.arm;
}

inline double total_lift(const TandemConfig& config, double v, double delta_alpha) {
    return wing_force(v, config.front.incidence + delta_alpha, config.front, config.rho) +
           wing_force(v, config.rear.incidence + delta_alpha, config.rear, config.rho);
}

// Interval of vehicle AoA offsets for which both wings stay in the linear range.
struct AlphaInterval {
    double lo;
    double hi;
};

inline AlphaInterval linear_delta_alpha_range(const TandemConfig& config) {
    const double lo = kAlphaMin - std::min(config.front.incidence, config.rear.incidence);
    const double hi = kAlphaMax - std::max(config.front.incidence, config.rear.incidence);
    return {lo, hi};
}

// Analytic dM/d(delta_alpha) at airspeed v. Valid for any airfoil pair since
// M is affine in delta_alpha inside the linear range.
inline double moment_slope(const TandemConfig& config, double v) {
    const double q = dynamic_pressure(config.rho, v);
    return q * (config.front.area * config.front.arm * config.front.lift_slope -
                config.rear.area * config.rear.arm * config.rear.lift_slope);
}

struct StabilityReport {
    bool trim_exists = false;
    bool stable = false;
    double margin = 0.0;  // dM/d(delta_alpha), N*m/rad at the reference speed
};

// The closed-form stability conditions assume both wings share one airfoil.
// `v_ref` only scales the margin; the verdict is speed independent.
inline StabilityReport static_stability_check(const TandemConfig& config, double v_ref = 1.0) {
    config.validate();
    const auto same = [](double a, double b) {
        return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    if (!same(config.front.lift_slope, config.rear.lift_slope) ||
        !same(config.front.cl0, config.rear.cl0)) {
        throw ConfigError("stability check requires identical front/rear airfoils");
    }
    StabilityReport report;
    const double sl_front = config.front.area * config.front.arm;
    const double sl_rear = config.rear.area * config.rear.arm;
    report.stable = config.rear.incidence < config.front.incidence && sl_front < sl_rear;
    report.margin = moment_slope(config, v_ref);

    // M(delta) = q * (c0 + c1 * delta); look for the root inside the linear range.
    const double k = config.front.lift_slope;
    const double c0 = sl_front * lift_coefficient(config.front.incidence, config.front) -
                      sl_rear * lift_coefficient(config.rear.incidence, config.rear);
    const double c1 = k * (sl_front - sl_rear);
    if (c1 != 0.0) {
        const double root = -c0 / c1;
        const auto range = linear_delta_alpha_range(config);
        report.trim_exists = root >= range.lo && root <= range.hi;
    } else {
        report.trim_exists = c0 == 0.0;
    }
    return report;
}

struct TrimResult {
    double delta_alpha = 0.0;   // rad
    double moment = 0.0;        // residual pitching moment, N*m
    double wing_lift = 0.0;     // N, lift of both wings at the trim offset
    double thrust_lift = 0.0;   // N, remainder the thrust line has to carry
    int iterations = 0;
};

inline constexpr double kTrimMomentTol = 1e-9;
inline constexpr int kTrimMaxIterations = 200;

// Finds the AoA offset with zero pitching moment by bisection over the linear
// range. The wings carry what they can at that offset; the thrust line closes
// the vertical balance. Infeasible when no moment-trim point exists or when the
// wings cannot reach the required lift anywhere in the linear range.
inline TrimResult trim_solve(const TandemConfig& config, double v, double required_lift) {
    config.validate();
    if (!(v >= 0.0)) throw ParameterError("airspeed must be >= 0");
    const auto range = linear_delta_alpha_range(config);
    if (range.lo > range.hi) {
        throw InfeasibleError("incidences leave no common linear AoA range");
    }
    TrimResult result;
    if (v == 0.0) {
        if (required_lift > 0.0) throw InfeasibleError("no lift available at zero airspeed");
        result.thrust_lift = required_lift;
        return result;
    }

    const double max_lift = std::max(total_lift(config, v, range.lo), total_lift(config, v, range.hi));
    if (required_lift > max_lift) {
        throw InfeasibleError("required lift " + std::to_string(required_lift) +
                              " N exceeds the linear-range maximum " + std::to_string(max_lift) + " N");
    }

    double lo = range.lo;
    double hi = range.hi;
    double m_lo = pitch_moment(config, v, lo);
    const double m_hi = pitch_moment(config, v, hi);
    if (std::abs(m_lo) < kTrimMomentTol) {
        hi = lo;
    } else if (std::abs(m_hi) < kTrimMomentTol) {
        lo = hi;
    } else if ((m_lo > 0.0) == (m_hi > 0.0)) {
        throw InfeasibleError("no zero-moment AoA offset inside the linear range");
    }

    double mid = 0.5 * (lo + hi);
    double m_mid = pitch_moment(config, v, mid);
    int it = 0;
    while (std::abs(m_mid) >= kTrimMomentTol && it < kTrimMaxIterations) {
        if ((m_mid > 0.0) == (m_lo > 0.0)) {
            lo = mid;
            m_lo = m_mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        m_mid = pitch_moment(config, v, mid);
        ++it;
    }
    if (std::abs(m_mid) >= kTrimMomentTol) {
        throw InfeasibleError("trim bisection did not converge");
    }
    result.delta_alpha = mid;
    result.moment = m_mid;
    result.wing_lift = total_lift(config, v, mid);
    result.thrust_lift = required_lift - result.wing_lift;
    result.iterations = it;
    return result;
}

inline double frontal_area(const TandemConfig& config, WingMode mode) {
    return mode == WingMode::Extended ? config.frontal_area_ext
                                      : config.frontal_area_ext * config.retracted_fraction;
}

// Lift coefficient over the full AoA envelope, used by the flight simulator.
// Inside the linear range it is exactly lift_coefficient(); beyond it the
// coefficient fades along a cosine to zero at +/-90 deg (flat plate edge-on
// to the normal-force regime, which the bluff-body drag term covers).
inline double envelope_lift_coefficient(double alpha_airfoil, const WingPanel& panel) {
    const double a = alpha_airfoil;
    if (a >= kAlphaMin && a <= kAlphaMax) return panel.lift_slope * a + panel.cl0;
    const double half_pi = 0.5 * kPi;
    if (a > kAlphaMax) {
        if (a >= half_pi) return 0.0;
        const double edge = panel.lift_slope * kAlphaMax + panel.cl0;
        return edge * std::cos(half_pi * (a - kAlphaMax) / (half_pi - kAlphaMax));
    }
    if (a <= -half_pi) return 0.0;
    const double edge = panel.lift_slope * kAlphaMin + panel.cl0;
    return edge * std::cos(half_pi * (kAlphaMin - a) / (half_pi + kAlphaMin));
}

// Baseline wing geometry (480/560 mm spans, 100 mm chords, 4.5/2 deg incidences).
// Airfoil slope/intercept are illustrative values for a high-lift section; the
// moment arms make the configuration trimmed at zero AoA offset.
inline TandemConfig baseline_config() {
    TandemConfig c;
    c.front.area = 0.480 * 0.100;
    c.front.lift_slope = 0.1 * 180.0 / kPi;  // 0.1 per degree
    c.front.cl0 = 0.4;
    c.front.incidence = deg2rad(4.5);
    c.front.arm = 0.10;
    c.rear.area = 0.560 * 0.100;
    c.rear.lift_slope = c.front.lift_slope;
    c.rear.cl0 = c.front.cl0;
    c.rear.incidence = deg2rad(2.0);
    // S_f L_f Cl_f(4.5 deg) = S_r L_r Cl_r(2 deg)
    c.rear.arm = c.front.area * c.front.arm * (c.front.lift_slope * c.front.incidence + c.front.cl0) /
                 (c.rear.area * (c.rear.lift_slope * c.rear.incidence + c.rear.cl0));
    c.rho = 1.225;
    c.frontal_area_ext = 0.16;
    c.retracted_fraction = 0.338;
    return c;
}

}  // namespace dart::aero
