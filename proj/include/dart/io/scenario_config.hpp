#pragma once

// Builders from config sections to model parameters and scenario specs.
// Every builder starts from the shipped defaults and overrides what the file
// sets, so a file only needs the keys it changes.

#include <filesystem>
#include <string>
#include <vector>

#include "dart/aero/tandem.hpp"
#include "dart/control/cascade.hpp"
#include "dart/control/mixer.hpp"
#include "dart/io/config.hpp"
#include "dart/propulsion/study.hpp"
#include "dart/sim/scenario.hpp"
#include "dart/sim/vehicle.hpp"
#include "dart/splm/rotor.hpp"

namespace dart::io {

inline const std::vector<std::string>& known_sections() {
    static const std::vector<std::string> s = {"scenario", "wind", "schedule", "vehicle", "aero",
                                               "splm", "gains.allocation", "gains.cascade"};
    return s;
}

inline control::AllocationGains build_allocation(const ConfigFile& c, control::AllocationGains g = {}) {
    const std::string s = "gains.allocation";
    if (!c.has_section(s)) return g;
    g.ct1 = c.number(s, "ct1", Dim::ForcePerThrottle, g.ct1);
    g.ct2 = c.number(s, "ct2", Dim::ForcePerThrottle, g.ct2);
    g.kt1 = c.number(s, "kt1", Dim::TorquePerThrottle, g.kt1);
    g.kt2 = c.number(s, "kt2", Dim::TorquePerThrottle, g.kt2);
    g.cm = c.number(s, "cm", Dim::TorquePerModulation, g.cm);
    g.key = c.number(s, "key", Dim::TorquePerServo, g.key);
    g.kez = c.number(s, "kez", Dim::TorquePerServo, g.kez);
    g.lambda = c.number(s, "lambda", Dim::None, g.lambda);
    g.validate();
    return g;
}

inline control::ActuatorLimits build_limits(const ConfigFile& c, control::ActuatorLimits l = {}) {
    const std::string s = "gains.allocation";
    if (!c.has_section(s)) return l;
    l.throttle_min = c.number(s, "throttle_min", Dim::None, l.throttle_min);
    l.throttle_max = c.number(s, "throttle_max", Dim::None, l.throttle_max);
    l.servo_max = c.number(s, "servo_max", Dim::None, l.servo_max);
    if (!(l.throttle_max > l.throttle_min) || !(l.servo_max > 0.0)) throw ConfigError("actuator limits are empty");
    return l;
}

inline control::CascadeGains build_cascade(const ConfigFile& c, control::CascadeGains g = {}) {
    const std::string s = "gains.cascade";
    if (!c.has_section(s)) return g;
    g.pos_p = c.vec3(s, "pos_p", Dim::PerTime, g.pos_p);
    g.vel_p = c.vec3(s, "vel_p", Dim::PerTime, g.vel_p);
    g.vel_i = c.vec3(s, "vel_i", Dim::PerTime2, g.vel_i);
    g.vel_d = c.vec3(s, "vel_d", Dim::None, g.vel_d);
    g.vel_i_limit = c.number(s, "vel_i_limit", Dim::Accel, g.vel_i_limit);
    g.vel_max_xy = c.number(s, "vel_max_xy", Dim::Speed, g.vel_max_xy);
    g.vel_max_z = c.number(s, "vel_max_z", Dim::Speed, g.vel_max_z);
    g.tilt_max = c.number(s, "tilt_max", Dim::Angle, g.tilt_max);
    g.att_p = c.vec3(s, "att_p", Dim::PerTime, g.att_p);
    g.yaw_weight = c.number(s, "yaw_weight", Dim::None, g.yaw_weight);
    g.rate_p = c.vec3(s, "rate_p", Dim::PerTime, g.rate_p);
    g.rate_i = c.vec3(s, "rate_i", Dim::PerTime2, g.rate_i);
    g.rate_d = c.vec3(s, "rate_d", Dim::None, g.rate_d);
    g.rate_i_limit = c.number(s, "rate_i_limit", Dim::AngularAccel, g.rate_i_limit);
    g.alt_p = c.number(s, "alt_p", Dim::PerTime2, g.alt_p);
    g.alt_d = c.number(s, "alt_d", Dim::PerTime, g.alt_d);
    if (c.has(s, "tilt_limit_transition")) {
        g.tilt_cos_min = std::cos(c.number(s, "tilt_limit_transition", Dim::Angle));
    }
    g.rates.position = c.number(s, "rate.position", Dim::Frequency, g.rates.position);
    g.rates.velocity = c.number(s, "rate.velocity", Dim::Frequency, g.rates.velocity);
    g.rates.attitude = c.number(s, "rate.attitude", Dim::Frequency, g.rates.attitude);
    g.rates.rate_rp = c.number(s, "rate.roll_pitch", Dim::Frequency, g.rates.rate_rp);
    g.rates.rate_yaw = c.number(s, "rate.yaw", Dim::Frequency, g.rates.rate_yaw);
    return g;
}

inline aero::WingPanel build_panel(const ConfigFile& c, const std::string& prefix, aero::WingPanel p) {
    const std::string s = "aero";
    p.area = c.number(s, prefix + ".area", Dim::Area, p.area);
    p.lift_slope = c.number(s, prefix + ".lift_slope", Dim::PerAngle, p.lift_slope);
    p.cl0 = c.number(s, prefix + ".cl0", Dim::None, p.cl0);
    p.incidence = c.number(s, prefix + ".incidence", Dim::Angle, p.incidence);
    return p;
}

// `rear.arm = trim` sizes the rear arm so the configuration is trimmed at the
// design incidences.
inline aero::TandemConfig build_aero(const ConfigFile& c, aero::TandemConfig a = aero::baseline_config()) {
    const std::string s = "aero";
    if (!c.has_section(s)) return a;
    a.front = build_panel(c, "front", a.front);
    a.rear = build_panel(c, "rear", a.rear);
    a.front.arm = c.number(s, "front.arm", Dim::Length, a.front.arm);
    const bool trim_rear = c.has(s, "rear.arm") && c.text(s, "rear.arm") == "trim";
    if (!trim_rear) a.rear.arm = c.number(s, "rear.arm", Dim::Length, a.rear.arm);
    a.rho = c.number(s, "rho", Dim::Density, a.rho);
    a.frontal_area_ext = c.number(s, "frontal_area_ext", Dim::Area, a.frontal_area_ext);
    a.retracted_fraction = c.number(s, "retracted_fraction", Dim::None, a.retracted_fraction);
    if (trim_rear) {
        const double cf = a.front.lift_slope * a.front.incidence + a.front.cl0;
        const double cr = a.rear.lift_slope * a.rear.incidence + a.rear.cl0;
        if (!(cr > 0.0)) throw ConfigError("rear.arm = trim needs positive rear lift at its incidence");
        a.rear.arm = a.front.area * a.front.arm * cf / (a.rear.area * cr);
    }
    a.validate();
    return a;
}

inline splm::SplmParams build_splm(const ConfigFile& c, splm::SplmParams p = splm::default_splm_params()) {
    const std::string s = "splm";
    if (!c.has_section(s)) return p;
    if (c.has(s, "variant")) p.variant = splm::hinge_variant_from_string(c.text(s, "variant"));
    p.inertia = c.mat3(s, "inertia", Dim::Inertia, p.inertia);
    p.damping = c.mat3(s, "damping", Dim::Damping, p.damping);
    p.stiffness = c.mat3(s, "stiffness", Dim::Stiffness, p.stiffness);
    p.downwash = c.number(s, "downwash", Dim::Angle, p.downwash);
    p.hinge_offset = c.number(s, "hinge_offset", Dim::None, p.hinge_offset);
    p.lift_slope = c.number(s, "lift_slope", Dim::PerAngle, p.lift_slope);
    if (c.has(s, "blades")) {
        const double b = c.number(s, "blades", Dim::None);
        if (b != std::floor(b)) throw ConfigError("blade count must be an integer");
        p.blades = static_cast<int>(b);
    }
    p.chord = c.number(s, "chord", Dim::Length, p.chord);
    p.radius = c.number(s, "radius", Dim::Length, p.radius);
    p.torque_gain = c.number(s, "torque_gain", Dim::TorquePerModulation, p.torque_gain);
    p.speed_per_throttle = c.number(s, "speed_per_throttle", Dim::RatePerThrottle, p.speed_per_throttle);
    p.input_per_throttle = c.number(s, "input_per_throttle", Dim::None, p.input_per_throttle);
    if (c.has(s, "phase_lag.speed") || c.has(s, "phase_lag.lag")) {
        const auto w = c.numbers(s, "phase_lag.speed", Dim::AngularRate);
        const auto lag = c.numbers(s, "phase_lag.lag", Dim::Angle);
        if (w.size() != lag.size()) throw ConfigError("phase_lag.speed and phase_lag.lag differ in length");
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < w.size(); ++i) pts.emplace_back(w[i], lag[i]);
        p.phase_lag = splm::PhaseLagTable(std::move(pts));
    }
    p.validate();
    return p;
}

inline sim::VehicleParams build_vehicle(const ConfigFile& c, sim::VehicleParams v = {}) {
    const std::string s = "vehicle";
    if (c.has_section(s)) {
        v.mass = c.number(s, "mass", Dim::Mass, v.mass);
        v.inertia = c.mat3(s, "inertia", Dim::Inertia, v.inertia);
        v.gravity.z() = c.number(s, "gravity", Dim::Accel, v.gravity.z());
        v.fore_rotor_offset = c.vec3(s, "fore_rotor_offset", Dim::Length, v.fore_rotor_offset);
        v.aft_rotor_offset = c.vec3(s, "aft_rotor_offset", Dim::Length, v.aft_rotor_offset);
        v.cruise_body_aoa = c.number(s, "cruise_body_aoa", Dim::Angle, v.cruise_body_aoa);
        v.cd = c.number(s, "cd", Dim::None, v.cd);
        v.axial_area = c.number(s, "axial_area", Dim::Area, v.axial_area);
        if (c.has(s, "aft_prop.tables")) {
            namespace fs = std::filesystem;
            fs::path dir = c.text(s, "aft_prop.tables");
            if (dir.is_relative()) dir = fs::path(c.origin()).parent_path() / dir;
            v.aft_prop = propulsion::load_propeller_dir(dir.string(), c.text(s, "aft_prop.name"),
                                                        c.number(s, "aft_prop.diameter", Dim::Length));
        }
    }
    v.aero = build_aero(c, v.aero);
    v.splm = build_splm(c, v.splm);
    v.allocation = build_allocation(c, v.allocation);
    v.limits = build_limits(c, v.limits);
    v.cascade = build_cascade(c, v.cascade);
    v.validate();
    return v;
}

inline sim::ScenarioSpec build_scenario(const ConfigFile& c) {
    sim::ScenarioSpec spec;
    const std::string s = "scenario";
    spec.name = c.text(s, "name", spec.name);
    const std::string kind = c.text(s, "kind", "hover");
    if (kind == "hover") spec.kind = sim::ScenarioKind::Hover;
    else if (kind == "transition") spec.kind = sim::ScenarioKind::Transition;
    else throw ConfigError("unknown scenario kind '" + kind + "' (expected hover|transition)");
    spec.duration = c.number(s, "duration", Dim::Time);
    spec.dt = c.number(s, "dt", Dim::Time, spec.dt);
    spec.initial_position = c.vec3(s, "initial_position", Dim::Length, spec.initial_position);
    spec.altitude_hold = c.number(s, "altitude_hold", Dim::Length, spec.initial_position.z());
    if (c.has(s, "seed")) {
        const double seed = c.number(s, "seed", Dim::None);
        if (!(seed >= 0.0) || seed != std::floor(seed)) throw ConfigError("seed must be a non-negative integer");
        spec.seed = static_cast<std::uint64_t>(seed);
    }
    if (c.has(s, "waypoint.time")) {
        const auto t = c.numbers(s, "waypoint.time", Dim::Time);
        const auto north = c.numbers(s, "waypoint.north", Dim::Length);
        const auto east = c.numbers(s, "waypoint.east", Dim::Length);
        const auto down = c.numbers(s, "waypoint.down", Dim::Length);
        const auto yaw = c.has(s, "waypoint.yaw") ? c.numbers(s, "waypoint.yaw", Dim::Angle)
                                                  : std::vector<double>(t.size(), 0.0);
        if (north.size() != t.size() || east.size() != t.size() || down.size() != t.size() ||
            yaw.size() != t.size()) {
            throw ConfigError("waypoint lists must have equal length");
        }
        for (std::size_t i = 0; i < t.size(); ++i) {
            spec.waypoints.push_back({t[i], Vec3(north[i], east[i], down[i]), yaw[i]});
        }
    }

    const std::string w = "wind";
    if (c.has_section(w)) {
        spec.wind.speed = c.number(w, "speed", Dim::Speed, spec.wind.speed);
        spec.wind.direction = c.number(w, "direction", Dim::Angle, spec.wind.direction);
        spec.wind.start = c.number(w, "start", Dim::Time, spec.wind.start);
        spec.wind.stop = c.number(w, "stop", Dim::Time, spec.wind.stop);
        spec.wind.ramp = c.number(w, "ramp", Dim::Time, spec.wind.ramp);
    }

    const std::string sc = "schedule";
    if (c.has_section(sc)) {
        if (c.has(sc, "wing_mode")) spec.initial_mode = aero::wing_mode_from_string(c.text(sc, "wing_mode"));
        if (c.has(sc, "change.time")) {
            const auto t = c.numbers(sc, "change.time", Dim::Time);
            const auto modes = split(c.text(sc, "change.mode"), ',');
            if (modes.size() != t.size()) throw ConfigError("change.time and change.mode differ in length");
            for (std::size_t i = 0; i < t.size(); ++i) {
                spec.mode_changes.push_back({t[i], aero::wing_mode_from_string(modes[i])});
            }
        }
        spec.lambda.hover = c.number(sc, "lambda.hover", Dim::None, spec.lambda.hover);
        spec.lambda.fixed_wing = c.number(sc, "lambda.fixed_wing", Dim::None, spec.lambda.fixed_wing);
        spec.lambda.start_pitch = c.number(sc, "lambda.start_pitch", Dim::Angle, spec.lambda.start_pitch);
        spec.lambda.end_pitch = c.number(sc, "lambda.end_pitch", Dim::Angle, spec.lambda.end_pitch);
    }
    spec.validate();
    return spec;
}

struct LoadedScenario {
    sim::ScenarioSpec spec;
    sim::VehicleParams vehicle;
    std::string snapshot;  // source text, embedded in the log header
};

inline LoadedScenario load_scenario(const ConfigFile& c) {
    LoadedScenario out{build_scenario(c), build_vehicle(c), c.text()};
    out.vehicle.cascade.validate(1.0 / out.spec.dt);
    c.check_consumed(known_sections());
    return out;
}

inline LoadedScenario load_scenario_file(const std::string& path) { return load_scenario(ConfigFile::load(path)); }

}  // namespace dart::io
