#pragma once

// Declarative flight experiments and the closed-loop runner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dart/aero/tandem.hpp"
#include "dart/control/cascade.hpp"
#include "dart/control/mixer.hpp"
#include "dart/control/modulation.hpp"
#include "dart/error.hpp"
#include "dart/io/csv.hpp"
#include "dart/math.hpp"
#include "dart/sim/rigid_body.hpp"
#include "dart/sim/vehicle.hpp"
#include "dart/splm/rotor.hpp"

namespace dart::sim {

// Pitch schedule of the transition flight: hold -10 deg, ramp to -80 deg,
// hold, ramp back to hover.
inline double transition_profile(double t) {
    if (!(t >= 0.0)) throw ParameterError("transition profile time must be >= 0");
    if (t < 2.0) return deg2rad(-10.0);
    if (t < 22.0) return deg2rad(-10.0 - 70.0 * (t - 2.0) / 20.0);
    if (t < 42.0) return deg2rad(-80.0);
    if (t < 44.0) return deg2rad(-80.0 + 80.0 * (t - 42.0) / 2.0);
    return 0.0;
}

inline constexpr double kTransitionRampStart = 2.0;
inline constexpr double kTransitionRampEnd = 22.0;
inline constexpr double kTransitionCruiseEnd = 42.0;

struct WindProfile {
    double speed = 0.0;              // m/s
    double direction = kPi;          // rad, azimuth the wind blows from (NED, 0 = north)
    double start = 0.0;              // s
    double stop = std::numeric_limits<double>::infinity();
    double ramp = 0.5;               // s, linear ramp-up

    Vec3 at(double t) const {
        if (speed == 0.0 || t < start || t >= stop) return Vec3::Zero();
        const double k = ramp > 0.0 ? std::min(1.0, (t - start) / ramp) : 1.0;
        // Blowing from `direction` means moving toward direction + pi.
        return -k * speed * Vec3(std::cos(direction), std::sin(direction), 0.0);
    }
};

struct ModeChange {
    double time = 0.0;
    aero::WingMode mode = aero::WingMode::Extended;
};

// Rotor share of pitch/yaw moments versus body pitch.
struct LambdaSchedule {
    double hover = 1.0;
    double fixed_wing = 0.3;
    double start_pitch = deg2rad(-30.0);  // blend begins below this pitch
    double end_pitch = deg2rad(-70.0);    // fully fixed-wing share from here

    double at(double pitch) const {
        if (pitch >= start_pitch) return hover;
        if (pitch <= end_pitch) return fixed_wing;
        const double f = (pitch - start_pitch) / (end_pitch - start_pitch);
        return hover + f * (fixed_wing - hover);
    }
};

struct Waypoint {
    double time = 0.0;
    Vec3 position = Vec3::Zero();
    double yaw = 0.0;
};

enum class ScenarioKind { Hover, Transition };

struct ScenarioSpec {
    std::string name = "scenario";
    ScenarioKind kind = ScenarioKind::Hover;
    double duration = 10.0;  // s
    double dt = 1e-3;        // s
    Vec3 initial_position = Vec3::Zero();
    std::vector<Waypoint> waypoints;  // hover: piecewise-constant position/yaw setpoints
    double altitude_hold = 0.0;       // transition: NED z to hold
    WindProfile wind;
    aero::WingMode initial_mode = aero::WingMode::Extended;
    std::vector<ModeChange> mode_changes;
    LambdaSchedule lambda;
    std::uint64_t seed = 0;  // recorded for reproducibility; the runner is deterministic

    void validate() const {
        if (!(duration > 0.0)) throw ConfigError("scenario duration must be > 0");
        if (!(dt > 0.0 && dt <= 1e-3)) throw ConfigError("scenario dt must lie in (0, 1 ms]");
        const double steps = duration / dt;
        if (steps > 1e8) throw ConfigError("scenario has too many steps");
        for (std::size_t i = 1; i < waypoints.size(); ++i) {
            if (!(waypoints[i].time >= waypoints[i - 1].time)) throw ConfigError("waypoints must be time ordered");
        }
        for (std::size_t i = 1; i < mode_changes.size(); ++i) {
            if (!(mode_changes[i].time >= mode_changes[i - 1].time)) {
                throw ConfigError("wing-mode changes must be time ordered");
            }
        }
        if (!(wind.speed >= 0.0) || !(wind.ramp >= 0.0)) throw ConfigError("wind speed and ramp must be >= 0");
        if (!(lambda.hover >= 0.0 && lambda.hover <= 1.0 && lambda.fixed_wing >= 0.0 && lambda.fixed_wing <= 1.0)) {
            throw ConfigError("lambda values must lie in [0, 1]");
        }
        if (!(lambda.end_pitch < lambda.start_pitch)) throw ConfigError("lambda blend must end below its start pitch");
        if (!initial_position.allFinite()) throw ConfigError("initial position must be finite");
    }

    aero::WingMode mode_at(double t) const {
        aero::WingMode m = initial_mode;
        for (const auto& c : mode_changes) {
            if (t >= c.time) m = c.mode;
        }
        return m;
    }

    Waypoint waypoint_at(double t) const {
        Waypoint w{0.0, initial_position, 0.0};
        for (const auto& p : waypoints) {
            if (t >= p.time) w = p;
        }
        return w;
    }
};

struct SimRow {
    double t;
    Vec3 p;
    Vec3 v;
    Quat q;
    Vec3 w;
    control::ActuatorCommand cmd;
    aero::WingMode mode;
    double lambda;
    // Not part of the CSV schema; kept for metrics.
    Vec3 p_sp;
    double pitch_sp;
};

struct SimLog {
    std::string name;
    std::string config_snapshot;  // emitted as '#' comment lines
    std::vector<SimRow> rows;

    static const char* header() { return "t,px,py,pz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,Td1,Td2,Mdx,Mdy,d1,d2,mode,lambda"; }

    std::string to_csv() const {
        std::ostringstream os;
        std::istringstream snap(config_snapshot);
        std::string line;
        while (std::getline(snap, line)) os << "# " << line << '\n';
        os << header() << '\n';
        const auto n = [](double v) { return io::format_number(v); };
        for (const auto& r : rows) {
            os << n(r.t) << ',' << n(r.p.x()) << ',' << n(r.p.y()) << ',' << n(r.p.z()) << ',' << n(r.v.x()) << ','
               << n(r.v.y()) << ',' << n(r.v.z()) << ',' << n(r.q.w()) << ',' << n(r.q.x()) << ',' << n(r.q.y())
               << ',' << n(r.q.z()) << ',' << n(r.w.x()) << ',' << n(r.w.y()) << ',' << n(r.w.z()) << ','
               << n(r.cmd.throttle1) << ',' << n(r.cmd.throttle2) << ',' << n(r.cmd.mod_x) << ','
               << n(r.cmd.mod_y) << ',' << n(r.cmd.servo1) << ',' << n(r.cmd.servo2) << ','
               << (r.mode == aero::WingMode::Extended ? 1 : 0) << ',' << n(r.lambda) << '\n';
        }
        return os.str();
    }
};

inline SimLog run_scenario(const ScenarioSpec& spec, const VehicleParams& params) {
    spec.validate();
    params.validate();
    const double base_hz = 1.0 / spec.dt;
    control::CascadeController ctrl(params.cascade, params.mass, params.inertia, base_hz, params.gravity.z());
    const splm::SplmModel rotor(params.splm);
    const RigidBodyParams body = params.body();

    VehicleState s;
    s.body.position = spec.initial_position;
    s.wing_mode = spec.mode_at(0.0);
    // Start hovering: hub at its static equilibrium for the hover throttle.
    const double hover_throttle1 = control::mix(control::Wrench{params.mass * params.gravity.z(), Vec3::Zero()},
                                                params.allocation).throttle1;
    s.fore_rotor.x = rotor.static_equilibrium(params.splm.input_per_throttle * hover_throttle1);

    const auto steps = static_cast<long>(std::llround(spec.duration / spec.dt));
    SimLog log;
    log.name = spec.name;
    log.rows.reserve(static_cast<std::size_t>(steps) + 1);
    control::AllocationGains alloc = params.allocation;

    for (long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * spec.dt;
        const Vec3 wind = spec.wind.at(t);
        s.wing_mode = spec.mode_at(t);

        control::Setpoint sp;
        double pitch_sp = 0.0;
        if (spec.kind == ScenarioKind::Hover) {
            const Waypoint wp = spec.waypoint_at(t);
            sp.mode = control::ControlMode::Hover;
            sp.position = wp.position;
            sp.yaw = wp.yaw;
        } else {
            pitch_sp = transition_profile(t);
            sp.mode = control::ControlMode::Transition;
            sp.position = Vec3(s.body.position.x(), s.body.position.y(), spec.altitude_hold);
            sp.pitch = pitch_sp;
            sp.lift_ff = wing_lift_up(params, s.body, s.wing_mode, wind);
        }
        const control::Wrench wrench = ctrl.step(sp, s.body);
        // Scheduled on the measured pitch: the elevons stay live for as long as
        // the vehicle is actually wing-borne, including the pull-up back to hover.
        alloc.lambda = spec.kind == ScenarioKind::Transition ? spec.lambda.at(body_pitch(s.body.orientation))
                                                             : spec.lambda.hover;
        const control::ActuatorCommand cmd = control::saturate(wrench, alloc, params.limits).command;

        log.rows.push_back({t, s.body.position, s.body.velocity, s.body.orientation, s.body.rate, cmd, s.wing_mode,
                            alloc.lambda, sp.position, pitch_sp});

        const PlantLoads pl = plant_loads(params, s, cmd, wind);
        s.body = step_6dof(s.body, pl.loads, body, spec.dt, k);
        s.aft_speed = pl.aft.speed;

        // Fore hub rides along with the phase-locked modulation command.
        const double omega = params.splm.speed_per_throttle * cmd.throttle1;
        const double lag = params.splm.phase_lag(omega);
        const Eigen::Vector2d mod(cmd.mod_x, cmd.mod_y);
        const double angle0 = s.fore_angle;
        const double g_in = params.splm.input_per_throttle;
        const auto input = [&](double tau) {
            return g_in * control::modulation_signal(cmd.throttle1, mod, angle0 + omega * tau, lag);
        };
        s.fore_rotor = rotor.step(s.fore_rotor, input, 0.0, spec.dt);
        s.fore_angle += omega * spec.dt;
        if (!s.fore_rotor.x.allFinite() || !s.fore_rotor.xdot.allFinite()) {
            throw SimulationFault(k, "fore rotor hub state diverged");
        }
    }
    const double t_end = static_cast<double>(steps) * spec.dt;
    log.rows.push_back({t_end, s.body.position, s.body.velocity, s.body.orientation, s.body.rate,
                        log.rows.empty() ? control::ActuatorCommand{} : log.rows.back().cmd, s.wing_mode,
                        log.rows.empty() ? alloc.lambda : log.rows.back().lambda,
                        log.rows.empty() ? spec.initial_position : log.rows.back().p_sp,
                        spec.kind == ScenarioKind::Transition ? transition_profile(t_end) : 0.0});
    return log;
}

// ---------------------------------------------------------------------------
// Metrics over a log.

inline double max_position_error(const SimLog& log, double t_from = 0.0, double t_to = 1e300) {
    double m = 0.0;
    for (const auto& r : log.rows) {
        if (r.t >= t_from && r.t <= t_to) m = std::max(m, (r.p - r.p_sp).norm());
    }
    return m;
}

inline double pitch_rms_error(const SimLog& log, double t_from, double t_to) {
    double acc = 0.0;
    long n = 0;
    for (const auto& r : log.rows) {
        if (r.t >= t_from && r.t <= t_to) {
            const double e = body_pitch(r.q) - r.pitch_sp;
            acc += e * e;
            ++n;
        }
    }
    if (n == 0) throw ParameterError("empty metric window");
    return std::sqrt(acc / static_cast<double>(n));
}

inline const SimRow& row_at(const SimLog& log, double t) {
    if (log.rows.empty()) throw ParameterError("empty log");
    const auto it = std::lower_bound(log.rows.begin(), log.rows.end(), t,
                                     [](const SimRow& r, double v) { return r.t < v; });
    return it == log.rows.end() ? log.rows.back() : *it;
}

inline double horizontal_speed_at(const SimLog& log, double t) {
    const auto& r = row_at(log, t);
    return std::hypot(r.v.x(), r.v.y());
}

}  // namespace dart::sim
