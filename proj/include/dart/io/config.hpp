#pragma once

// Structured-text config files:
//
//     # comment
//     [section]
//     key = 1.5 m                 scalar with unit
//     key = 0, 0, -1.5 m          vector, one trailing unit for all entries
//     key = 1, 0, 0; 0, 2, 0; 0, 0, 3 kg*m^2   matrix rows separated by ';'
//     key = extended              text
//
// Dimensioned quantities must carry a unit; values are converted to SI (and
// radians) on read. Every key must be consumed by a builder, otherwise
// check_consumed() reports it as unknown.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dart/error.hpp"
#include "dart/io/csv.hpp"
#include "dart/math.hpp"

namespace dart::io {

enum class Dim {
    None,
    Length,
    Mass,
    Time,
    Speed,
    Accel,
    Angle,
    AngularRate,
    AngularAccel,
    Area,
    Density,
    Inertia,
    Frequency,
    PerAngle,
    PerTime,
    PerTime2,
    ForcePerThrottle,
    TorquePerThrottle,
    TorquePerModulation,
    TorquePerServo,
    RatePerThrottle,
    Damping,    // N*m*s/rad
    Stiffness,  // N*m/rad
};

inline const char* to_string(Dim d) {
    switch (d) {
        case Dim::None: return "dimensionless";
        case Dim::Length: return "length";
        case Dim::Mass: return "mass";
        case Dim::Time: return "time";
        case Dim::Speed: return "speed";
        case Dim::Accel: return "acceleration";
        case Dim::Angle: return "angle";
        case Dim::AngularRate: return "angular rate";
        case Dim::AngularAccel: return "angular acceleration";
        case Dim::Area: return "area";
        case Dim::Density: return "density";
        case Dim::Inertia: return "inertia";
        case Dim::Frequency: return "frequency";
        case Dim::PerAngle: return "per angle";
        case Dim::PerTime: return "per time";
        case Dim::PerTime2: return "per time squared";
        case Dim::ForcePerThrottle: return "force per throttle unit";
        case Dim::TorquePerThrottle: return "torque per throttle unit";
        case Dim::TorquePerModulation: return "torque per modulation unit";
        case Dim::TorquePerServo: return "torque per servo unit";
        case Dim::RatePerThrottle: return "angular rate per throttle unit";
        case Dim::Damping: return "rotational damping";
        case Dim::Stiffness: return "rotational stiffness";
    }
    return "?";
}

struct UnitInfo {
    Dim dim;
    double factor;  // to SI / radians
};

inline const std::map<std::string, UnitInfo>& unit_table() {
    static const std::map<std::string, UnitInfo> t = {
        {"m", {Dim::Length, 1.0}},
        {"cm", {Dim::Length, 1e-2}},
        {"mm", {Dim::Length, 1e-3}},
        {"in", {Dim::Length, 0.0254}},
        {"kg", {Dim::Mass, 1.0}},
        {"g", {Dim::Mass, 1e-3}},
        {"s", {Dim::Time, 1.0}},
        {"ms", {Dim::Time, 1e-3}},
        {"m/s", {Dim::Speed, 1.0}},
        {"km/h", {Dim::Speed, 1.0 / 3.6}},
        {"m/s^2", {Dim::Accel, 1.0}},
        {"rad", {Dim::Angle, 1.0}},
        {"deg", {Dim::Angle, kPi / 180.0}},
        {"rad/s", {Dim::AngularRate, 1.0}},
        {"deg/s", {Dim::AngularRate, kPi / 180.0}},
        {"rpm", {Dim::AngularRate, 2.0 * kPi / 60.0}},
        {"rad/s^2", {Dim::AngularAccel, 1.0}},
        {"m^2", {Dim::Area, 1.0}},
        {"cm^2", {Dim::Area, 1e-4}},
        {"kg/m^3", {Dim::Density, 1.0}},
        {"kg*m^2", {Dim::Inertia, 1.0}},
        {"Hz", {Dim::Frequency, 1.0}},
        {"1/rad", {Dim::PerAngle, 1.0}},
        {"1/deg", {Dim::PerAngle, 180.0 / kPi}},
        {"1/s", {Dim::PerTime, 1.0}},
        {"1/s^2", {Dim::PerTime2, 1.0}},
        {"N/throttle", {Dim::ForcePerThrottle, 1.0}},
        {"N*m/throttle", {Dim::TorquePerThrottle, 1.0}},
        {"N*m/modulation", {Dim::TorquePerModulation, 1.0}},
        {"N*m/servo", {Dim::TorquePerServo, 1.0}},
        {"rad/s/throttle", {Dim::RatePerThrottle, 1.0}},
        {"rpm/throttle", {Dim::RatePerThrottle, 2.0 * kPi / 60.0}},
        {"N*m*s/rad", {Dim::Damping, 1.0}},
        {"N*m/rad", {Dim::Stiffness, 1.0}},
    };
    return t;
}

struct ConfigEntry {
    std::string value;  // raw text after '='
    int line = 0;
    mutable bool used = false;
};

class ConfigFile {
public:
    using Section = std::map<std::string, ConfigEntry>;

    static ConfigFile parse(const std::string& text, const std::string& origin = "<config>") {
        ConfigFile cfg;
        cfg.origin_ = origin;
        cfg.text_ = text;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int n = 0;
        while (std::getline(in, line)) {
            ++n;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw cfg.error(n, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) throw cfg.error(n, "empty section name");
                if (cfg.sections_.count(section)) throw cfg.error(n, "duplicate section [" + section + "]");
                cfg.sections_[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw cfg.error(n, "expected 'key = value'");
            if (section.empty()) throw cfg.error(n, "key outside of any section");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw cfg.error(n, "empty key");
            if (value.empty()) throw cfg.error(n, "empty value for '" + key + "'");
            auto& sec = cfg.sections_[section];
            if (sec.count(key)) throw cfg.error(n, "duplicate key '" + key + "' in [" + section + "]");
            sec[key] = ConfigEntry{value, n, false};
        }
        return cfg;
    }

    static ConfigFile load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse(ss.str(), path);
    }

    const std::string& origin() const { return origin_; }
    const std::string& text() const { return text_; }

    bool has_section(const std::string& s) const { return sections_.count(s) != 0; }
    bool has(const std::string& s, const std::string& key) const {
        const auto it = sections_.find(s);
        return it != sections_.end() && it->second.count(key) != 0;
    }

    std::string text(const std::string& s, const std::string& key) const { return entry(s, key).value; }
    std::string text(const std::string& s, const std::string& key, const std::string& fallback) const {
        return has(s, key) ? text(s, key) : fallback;
    }

    // Matrix of numbers in SI. Rows separated by ';', entries by ','.
    std::vector<std::vector<double>> table(const std::string& s, const std::string& key, Dim dim) const {
        const ConfigEntry& e = entry(s, key);
        std::string body = e.value;
        double factor = 1.0;
        const auto sp = body.find_last_of(" \t");
        std::string unit;
        if (sp != std::string::npos) {
            const std::string tail = body.substr(sp + 1);
            if (!is_number(tail)) {
                unit = tail;
                body = trim(body.substr(0, sp));
            }
        }
        if (unit.empty()) {
            if (dim != Dim::None) {
                throw error(e.line, "'" + key + "' needs a unit (" + std::string(to_string(dim)) + ")");
            }
        } else {
            const auto& units = unit_table();
            const auto it = units.find(unit);
            if (it == units.end()) throw error(e.line, "'" + key + "': unknown unit '" + unit + "'");
            if (it->second.dim != dim) {
                throw error(e.line, "'" + key + "': unit '" + unit + "' is " + to_string(it->second.dim) +
                                        ", expected " + to_string(dim));
            }
            factor = it->second.factor;
        }
        std::vector<std::vector<double>> rows;
        for (const auto& row : split(body, ';')) {
            std::vector<double> r;
            for (const auto& cell : split(row, ',')) {
                const std::string c = trim(cell);
                if (!is_number(c)) throw error(e.line, "'" + key + "': bad number '" + c + "'");
                r.push_back(std::stod(c) * factor);
            }
            rows.push_back(std::move(r));
        }
        return rows;
    }

    std::vector<double> numbers(const std::string& s, const std::string& key, Dim dim) const {
        const auto t = table(s, key, dim);
        if (t.size() != 1) throw error(entry(s, key).line, "'" + key + "': expected a single row");
        return t.front();
    }

    double number(const std::string& s, const std::string& key, Dim dim) const {
        const auto v = numbers(s, key, dim);
        if (v.size() != 1) throw error(entry(s, key).line, "'" + key + "': expected one value");
        return v.front();
    }
    double number(const std::string& s, const std::string& key, Dim dim, double fallback) const {
        return has(s, key) ? number(s, key, dim) : fallback;
    }

    Vec3 vec3(const std::string& s, const std::string& key, Dim dim) const {
        const auto v = numbers(s, key, dim);
        if (v.size() != 3) throw error(entry(s, key).line, "'" + key + "': expected 3 values");
        return Vec3(v[0], v[1], v[2]);
    }
    Vec3 vec3(const std::string& s, const std::string& key, Dim dim, const Vec3& fallback) const {
        return has(s, key) ? vec3(s, key, dim) : fallback;
    }

    Mat3 mat3(const std::string& s, const std::string& key, Dim dim) const {
        const auto t = table(s, key, dim);
        if (t.size() != 3) throw error(entry(s, key).line, "'" + key + "': expected 3 rows");
        Mat3 m;
        for (int i = 0; i < 3; ++i) {
            if (t[i].size() != 3) throw error(entry(s, key).line, "'" + key + "': expected 3 columns");
            for (int j = 0; j < 3; ++j) m(i, j) = t[i][j];
        }
        return m;
    }
    Mat3 mat3(const std::string& s, const std::string& key, Dim dim, const Mat3& fallback) const {
        return has(s, key) ? mat3(s, key, dim) : fallback;
    }

    // Every section and key must be recognised by some builder.
    void check_consumed(const std::vector<std::string>& known_sections) const {
        for (const auto& [name, sec] : sections_) {
            bool known = false;
            for (const auto& k : known_sections) known = known || k == name;
            if (!known) throw ConfigError(origin_ + ": unknown section [" + name + "]");
            for (const auto& [key, e] : sec) {
                if (!e.used) throw error(e.line, "unknown key '" + key + "' in [" + name + "]");
            }
        }
    }

private:
    const ConfigEntry& entry(const std::string& s, const std::string& key) const {
        const auto it = sections_.find(s);
        if (it == sections_.end()) throw ConfigError(origin_ + ": missing section [" + s + "]");
        const auto k = it->second.find(key);
        if (k == it->second.end()) throw ConfigError(origin_ + ": missing key '" + key + "' in [" + s + "]");
        k->second.used = true;
        return k->second;
    }

    static bool is_number(const std::string& s) {
        if (s.empty()) return false;
        char* end = nullptr;
        std::strtod(s.c_str(), &end);
        return end == s.c_str() + s.size();
    }

    ConfigError error(int line, const std::string& msg) const {
        return ConfigError(origin_ + ":" + std::to_string(line) + ": " + msg);
    }

    std::string origin_;
    std::string text_;
    std::map<std::string, Section> sections_;
};

}  // namespace dart::io
