#pragma once

// Heterogeneous vs homogeneous coaxial propulsion comparison: per-mode power
// for each configuration, mission-average power over the hover-time ratio and
// the crossover between two configurations.

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "dart/error.hpp"
#include "dart/io/csv.hpp"
#include "dart/propulsion/propeller.hpp"

namespace dart::propulsion {

enum class FlightMode { MultiRotor, FixedWing };

// Propeller whose per-mode electrical power is given directly instead of
// being computed from coefficient tables.
struct FixedPower {
    std::string name;
    double multirotor_w = 0.0;
    double fixed_wing_w = 0.0;
};

using PropellerModel = std::variant<PropellerTable, FixedPower>;

inline std::string model_name(const PropellerModel& m) {
    return std::visit([](const auto& p) -> std::string {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, FixedPower>) {
            return p.name;
        } else {
            return p.name();
        }
    }, m);
}

struct ActiveSet {
    bool fore = true;
    bool aft = true;
    int count() const { return static_cast<int>(fore) + static_cast<int>(aft); }
};

struct PropulsionConfig {
    std::string name;
    PropellerModel fore;
    PropellerModel aft;
    ActiveSet fixed_wing_active{true, true};  // multi-rotor mode always uses both

    ActiveSet active(FlightMode mode) const {
        return mode == FlightMode::MultiRotor ? ActiveSet{true, true} : fixed_wing_active;
    }
};

struct PropellerPower {
    double thrust = 0.0;  // N
    double speed = 0.0;   // rev/s, 0 for fixed-power models
    double power = 0.0;   // W
};

inline PropellerPower propeller_power(const PropellerModel& model, FlightMode mode, double rho, double v,
                                      double thrust) {
    if (const auto* fixed = std::get_if<FixedPower>(&model)) {
        return {thrust, 0.0, mode == FlightMode::MultiRotor ? fixed->multirotor_w : fixed->fixed_wing_w};
    }
    const auto& table = std::get<PropellerTable>(model);
    const double n = solve_rpm_for_thrust(table, rho, v, thrust);
    if (n <= 0.0) return {thrust, 0.0, 0.0};
    return {thrust, n, thrust_power(table, rho, v, n).power};
}

struct ModePowerBreakdown {
    double total = 0.0;
    std::optional<PropellerPower> fore;
    std::optional<PropellerPower> aft;
};

// Thrust is split equally over the propellers active in the given mode.
inline ModePowerBreakdown mode_power_detail(const PropulsionConfig& cfg, FlightMode mode, double rho, double v,
                                            double total_thrust) {
    const ActiveSet act = cfg.active(mode);
    if (act.count() == 0) throw ConfigError(cfg.name + ": no active propeller in this mode");
    const double share = total_thrust / act.count();
    ModePowerBreakdown out;
    if (act.fore) {
        out.fore = propeller_power(cfg.fore, mode, rho, v, share);
        out.total += out.fore->power;
    }
    if (act.aft) {
        out.aft = propeller_power(cfg.aft, mode, rho, v, share);
        out.total += out.aft->power;
    }
    return out;
}

inline double mode_power(const PropulsionConfig& cfg, FlightMode mode, double rho, double v, double total_thrust) {
    return mode_power_detail(cfg, mode, rho, v, total_thrust).total;
}

struct ModePowers {
    std::string name;
    double hover_w = 0.0;
    double cruise_w = 0.0;

    double average(double hover_ratio) const { return hover_ratio * hover_w + (1.0 - hover_ratio) * cruise_w; }
};

struct MissionPowerCurve {
    std::vector<double> ratios;
    std::vector<std::string> names;
    std::vector<std::vector<double>> power;  // power[config][ratio index]
};

inline MissionPowerCurve average_power_curve(const std::vector<ModePowers>& configs,
                                             const std::vector<double>& ratios) {
    MissionPowerCurve c;
    c.ratios = ratios;
    for (double r : ratios) {
        if (!(r >= 0.0 && r <= 1.0)) throw ParameterError("hover-time ratio must lie in [0, 1]");
    }
    for (const auto& cfg : configs) {
        c.names.push_back(cfg.name);
        std::vector<double> row;
        row.reserve(ratios.size());
        for (double r : ratios) row.push_back(cfg.average(r));
        c.power.push_back(std::move(row));
    }
    return c;
}

struct Crossover {
    std::optional<double> ratio;
    bool degenerate = false;
};

inline Crossover crossover_ratio(const ModePowers& a, const ModePowers& b) {
    // P_a(r) - P_b(r) = dc + (dh - dc) r
    const double dh = a.hover_w - b.hover_w;
    const double dc = a.cruise_w - b.cruise_w;
    Crossover out;
    if (dh == 0.0 && dc == 0.0) {
        out.degenerate = true;
        return out;
    }
    const double slope = dh - dc;
    if (slope == 0.0) return out;
    const double r = dc / (dc - dh);
    if (r >= 0.0 && r <= 1.0) out.ratio = r;
    return out;
}

// Mission definition of the comparison study.
struct StudyConditions {
    double rho = 1.225;
    double hover_thrust = 12.0;  // N, multi-rotor total
    double cruise_thrust = 4.0;  // N, fixed-wing total
    double cruise_speed = 16.0;  // m/s
};

inline ModePowers evaluate_config(const PropulsionConfig& cfg, const StudyConditions& cond = {}) {
    return {cfg.name, mode_power(cfg, FlightMode::MultiRotor, cond.rho, 0.0, cond.hover_thrust),
            mode_power(cfg, FlightMode::FixedWing, cond.rho, cond.cruise_speed, cond.cruise_thrust)};
}

// HPC: large fore + small aft, cruise on the small one.
// HLC: two large propellers; one alone cannot carry the cruise thrust.
// HSC: two small propellers, cruise on one.
inline std::vector<PropulsionConfig> standard_configs(const PropellerModel& large, const PropellerModel& small) {
    return {
        {"HPC", large, small, {false, true}},
        {"HLC", large, large, {true, true}},
        {"HSC", small, small, {false, true}},
    };
}

// Per-propeller wattages of the reference study: 16 in at 33 W hover / 61 W
// cruise, 7 in at 105.3 W hover / 63.5 W cruise.
inline std::vector<PropulsionConfig> paper_2025_fixture() {
    return standard_configs(FixedPower{"16in", 33.0, 61.0}, FixedPower{"7in", 105.3, 63.5});
}

inline double relative_reduction(double value, double reference) {
    if (reference == 0.0) throw UndefinedError("reference power is zero");
    return (reference - value) / reference;
}

// ---------------------------------------------------------------------------
// Table ingestion: one CSV per propeller per RPM sheet, header `J,CT,CP`,
// file name `<name>_<rpm>.csv`.

inline std::vector<CoefficientRow> load_coefficient_csv(const std::string& path) {
    const io::CsvTable t = io::read_csv(path);
    const int cj = t.column("J");
    const int ct = t.column("CT");
    const int cp = t.column("CP");
    if (cj < 0 || ct < 0 || cp < 0) throw ConfigError(path + ": header must contain J,CT,CP");
    std::vector<CoefficientRow> rows;
    rows.reserve(t.rows.size());
    for (const auto& r : t.rows) rows.push_back({r[cj], r[ct], r[cp]});
    if (rows.empty()) throw ConfigError(path + ": no data rows");
    return rows;
}

inline PropellerTable load_propeller_dir(const std::string& dir, const std::string& name, double diameter) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ConfigError("'" + dir + "' is not a directory");
    const std::regex pattern("^" + std::regex_replace(name, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)") +
                             R"(_([0-9]+(\.[0-9]+)?)\.csv$)");
    std::map<double, std::vector<CoefficientRow>> sheets;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string file = entry.path().filename().string();
        if (std::regex_match(file, m, pattern)) {
            const double rpm = std::stod(m[1].str());
            sheets[rpm / 60.0] = load_coefficient_csv(entry.path().string());
        }
    }
    if (sheets.empty()) throw ConfigError("no '" + name + "_<rpm>.csv' tables in '" + dir + "'");
    std::vector<RpmSheet> out;
    for (auto& [speed, rows] : sheets) out.push_back({sheets.size() > 1 ? speed : 0.0, std::move(rows)});
    return PropellerTable(name, diameter, std::move(out));
}

}  // namespace dart::propulsion
