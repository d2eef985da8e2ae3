#pragma once

// Command-line front end. Exit codes: 0 success, 1 validation error (bad
// arguments, config, ranges), 2 runtime fault (infeasible, undefined,
// simulation fault, I/O). Errors print one machine-readable line on stderr:
//
//     error kind=<kind> message="<text>"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dart/analysis/spectral.hpp"
#include "dart/control/mixer.hpp"
#include "dart/error.hpp"
#include "dart/io/config.hpp"
#include "dart/io/csv.hpp"
#include "dart/io/scenario_config.hpp"
#include "dart/propulsion/study.hpp"
#include "dart/sim/scenario.hpp"
#include "dart/splm/bench.hpp"

namespace dart::cli {

using io::format_number;

inline std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const RangeError*>(&e)) return "range";
    if (dynamic_cast<const ConfigError*>(&e)) return "config";
    if (dynamic_cast<const ParameterError*>(&e)) return "parameter";
    if (dynamic_cast<const DomainError*>(&e)) return "domain";
    if (dynamic_cast<const ExtrapolationError*>(&e)) return "extrapolation";
    if (dynamic_cast<const InfeasibleError*>(&e)) return "infeasible";
    if (dynamic_cast<const UndefinedError*>(&e)) return "undefined";
    if (dynamic_cast<const SimulationFault*>(&e)) return "simulation_fault";
    if (dynamic_cast<const ValidationError*>(&e)) return "validation";
    return "runtime";
}

inline int exit_code(const std::exception& e) { return dynamic_cast<const ValidationError*>(&e) ? 1 : 2; }

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c == '\n' ? ' ' : c;
    }
    return out;
}

inline void kv(std::ostream& out, const std::string& key, double v) { out << key << '=' << format_number(v) << '\n'; }

// ---------------------------------------------------------------------------
// mix-check

struct RoundTripReport {
    int trials = 0;
    double max_residual = 0.0;
};

// forward_model(mix(w)) against w over random wrenches and lambdas. Gains are
// random too unless fixed ones are given.
inline RoundTripReport mix_roundtrip(int trials, std::uint64_t seed,
                                     const std::optional<control::AllocationGains>& fixed) {
    if (trials < 1) throw ParameterError("trials must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(0.01, 10.0);
    std::uniform_real_distribution<double> mag(0.01, 10.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> w(-25.0, 25.0);
    std::bernoulli_distribution flip(0.5);
    RoundTripReport r;
    r.trials = trials;
    for (int i = 0; i < trials; ++i) {
        control::AllocationGains g;
        if (fixed) {
            g = *fixed;
        } else {
            g.ct1 = pos(rng);
            g.ct2 = pos(rng);
            g.kt1 = 0.1 * pos(rng);
            g.kt2 = 0.1 * pos(rng);
            g.cm = 0.01 * pos(rng);
            g.key = (flip(rng) ? 1.0 : -1.0) * 0.01 * mag(rng);
            g.kez = (flip(rng) ? 1.0 : -1.0) * 0.01 * mag(rng);
        }
        g.lambda = unit(rng);
        const control::Wrench in{std::abs(w(rng)), Vec3(w(rng), w(rng), w(rng))};
        const control::Wrench back = control::forward_model(control::mix(in, g), g);
        const double res = std::max(std::abs(back.thrust - in.thrust), (back.torque - in.torque).cwiseAbs().maxCoeff());
        r.max_residual = std::max(r.max_residual, res);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Shared scenario helpers

inline sim::ScenarioSpec default_wind_spec(aero::WingMode mode) {
    sim::ScenarioSpec s;
    s.name = std::string("wind_") + aero::to_string(mode);
    s.duration = 8.0;
    s.initial_position = Vec3(0.0, 0.0, -1.5);
    s.waypoints = {{0.0, s.initial_position, 0.0}};
    s.initial_mode = mode;
    s.wind.speed = 5.0;
    s.wind.direction = kPi;
    s.wind.start = 2.0;
    return s;
}

inline void scenario_summary(std::ostream& out, const sim::ScenarioSpec& spec, const sim::SimLog& log) {
    out << "scenario=" << spec.name << '\n';
    kv(out, "samples", static_cast<double>(log.rows.size()));
    const auto& last = log.rows.back();
    kv(out, "final_north_m", last.p.x());
    kv(out, "final_east_m", last.p.y());
    kv(out, "final_down_m", last.p.z());
    if (spec.kind == sim::ScenarioKind::Hover) {
        const double from = spec.wind.speed > 0.0 ? spec.wind.start : std::min(2.0, spec.duration);
        kv(out, "peak_deviation_m", sim::max_position_error(log, from, spec.duration));
    } else {
        if (spec.duration >= sim::kTransitionRampEnd) {
            kv(out, "pitch_rms_ramp_deg",
               rad2deg(sim::pitch_rms_error(log, sim::kTransitionRampStart, sim::kTransitionRampEnd)));
        }
        if (spec.duration >= sim::kTransitionCruiseEnd) {
            kv(out, "speed_end_cruise_mps", sim::horizontal_speed_at(log, sim::kTransitionCruiseEnd));
        }
    }
}

// ---------------------------------------------------------------------------
// power-analysis

inline void power_summary(std::ostream& out, const std::vector<propulsion::ModePowers>& p) {
    const auto find = [&](const std::string& n) -> const propulsion::ModePowers& {
        for (const auto& m : p) {
            if (m.name == n) return m;
        }
        throw Error("missing configuration " + n);
    };
    const auto& hpc = find("HPC");
    const auto& hlc = find("HLC");
    const auto& hsc = find("HSC");
    for (const auto& m : p) {
        kv(out, "hover_" + m.name + "_W", m.hover_w);
        kv(out, "cruise_" + m.name + "_W", m.cruise_w);
    }
    // Headline metrics are rounded for reading: ratios to 3 decimals,
    // percentages to 1 decimal. The CSV keeps full precision.
    char buf[64];
    const auto ratio = [&](const std::string& key, const propulsion::ModePowers& b) {
        const auto c = propulsion::crossover_ratio(hpc, b);
        if (c.ratio) {
            std::snprintf(buf, sizeof(buf), "%.3f", *c.ratio);
            out << key << '=' << buf << '\n';
        } else {
            out << key << "=none\n";
        }
    };
    const auto pct = [&](const std::string& key, double v) {
        std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * v);
        out << key << '=' << buf << '\n';
    };
    ratio("crossover_HPC_HLC", hlc);
    ratio("crossover_HPC_HSC", hsc);
    pct("reduction_at_r0.2_vs_HLC", propulsion::relative_reduction(hpc.average(0.2), hlc.average(0.2)));
    pct("reduction_at_r0.2_vs_HSC", propulsion::relative_reduction(hpc.average(0.2), hsc.average(0.2)));
    pct("multirotor_gap_vs_HSC", propulsion::relative_reduction(hpc.hover_w, hsc.hover_w));
    pct("fixedwing_gap_vs_HLC", propulsion::relative_reduction(hpc.cruise_w, hlc.cruise_w));
}

inline std::string power_curve_csv(const propulsion::MissionPowerCurve& c) {
    std::ostringstream os;
    os << 'r';
    for (const auto& n : c.names) os << ',' << n << "_W";
    os << '\n';
    for (std::size_t i = 0; i < c.ratios.size(); ++i) {
        os << format_number(c.ratios[i]);
        for (const auto& row : c.power) os << ',' << format_number(row[i]);
        os << '\n';
    }
    return os.str();
}

// "name:diameter" with the diameter in metres.
inline std::pair<std::string, double> parse_prop_spec(const std::string& s) {
    const auto colon = s.rfind(':');
    if (colon == std::string::npos) throw ParameterError("propeller spec must be NAME:DIAMETER_M, got '" + s + "'");
    const double d = io::parse_double(s.substr(colon + 1), "propeller diameter");
    if (!(d > 0.0)) throw ParameterError("propeller diameter must be > 0");
    return {s.substr(0, colon), d};
}

// ---------------------------------------------------------------------------
// psd

inline analysis::TimeSeries read_series(const std::string& path, const std::string& column) {
    const io::CsvTable t = io::read_csv(path);
    if (t.header.size() < 2 || t.header[0] != "t") throw ConfigError(path + ": expected header 't,<value>'");
    int col = 1;
    if (!column.empty()) {
        col = t.column(column);
        if (col < 1) throw ConfigError(path + ": no column '" + column + "'");
    }
    if (t.rows.size() < 2) throw ParameterError(path + ": need at least 2 samples");
    analysis::TimeSeries s;
    const double dt = (t.rows.back()[0] - t.rows.front()[0]) / static_cast<double>(t.rows.size() - 1);
    if (!(dt > 0.0)) throw ParameterError(path + ": time column must increase");
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        const double step = t.rows[i][0] - t.rows[i - 1][0];
        if (std::abs(step - dt) > 1e-6 * dt + 1e-12) throw ParameterError(path + ": samples are not uniformly spaced");
    }
    s.fs = 1.0 / dt;
    s.unit = t.header[static_cast<std::size_t>(col)];
    s.values.reserve(t.rows.size());
    for (const auto& r : t.rows) s.values.push_back(r[static_cast<std::size_t>(col)]);
    return s;
}

inline std::string series_csv(const analysis::TimeSeries& s, const std::string& name) {
    std::ostringstream os;
    os << "t," << name << '\n';
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        os << format_number(static_cast<double>(i) / s.fs) << ',' << format_number(s.values[i]) << '\n';
    }
    return os.str();
}

inline void spectrum_summary(std::ostream& out, const analysis::TimeSeries& s, std::size_t window,
                             std::size_t segment, double overlap) {
    const analysis::TimeSeries ms = window > 0 ? analysis::mean_subtract(s, window) : s;
    const analysis::PsdResult r = analysis::psd(ms, std::min(segment, ms.size()), overlap);
    kv(out, "samples", static_cast<double>(s.size()));
    kv(out, "fs_hz", s.fs);
    kv(out, "mean_subtract_window", static_cast<double>(window));
    kv(out, "peak_to_peak", analysis::peak_to_peak(ms));
    kv(out, "avg_psd_db_per_hz", r.avg_db);
    kv(out, "segments", static_cast<double>(r.segments));
}

// ---------------------------------------------------------------------------

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Flight-dynamics and control-analysis toolkit for a coaxial dual-rotor tailsitter", "dart"};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario file and log the flight");
    std::string sim_cfg, sim_out;
    sim_cmd->add_option("scenario", sim_cfg, "Scenario config file")->required();
    sim_cmd->add_option("--out", sim_out, "SimLog CSV path");

    // bench-splm
    auto* bench_cmd = app.add_subcommand("bench-splm", "Torque-bench replay of the swashplateless rotor");
    std::string variant = "decoupled", bench_out, bench_cfg;
    double throttle = 900.0, amplitude = 200.0, phase_deg = 0.0, duration = 10.0, fs = 1000.0;
    int bench_window = -1;
    bench_cmd->add_option("--variant", variant, "coupled|decoupled")->check(CLI::IsMember({"coupled", "decoupled"}));
    bench_cmd->add_option("--throttle", throttle, "Steady throttle");
    bench_cmd->add_option("--amplitude", amplitude, "Modulation amplitude (throttle units)");
    bench_cmd->add_option("--phase", phase_deg, "Modulation phase, deg");
    bench_cmd->add_option("--duration", duration, "Recorded duration, s");
    bench_cmd->add_option("--fs", fs, "Sample rate, Hz");
    bench_cmd->add_option("--window", bench_window, "Mean-subtraction window in samples (default: one revolution)");
    bench_cmd->add_option("--config", bench_cfg, "Config file with an [splm] section");
    bench_cmd->add_option("--out", bench_out, "Torque CSV path (t,torque)");

    // power-analysis
    auto* power_cmd = app.add_subcommand("power-analysis", "Heterogeneous vs homogeneous propulsion study");
    std::string fixture, tables, large = "synth16in:0.4064", small = "synth7in:0.1778", power_out = "power_curve.csv";
    double r_step = 0.05;
    auto* fixture_opt = power_cmd->add_option("--fixture", fixture, "Built-in wattage fixture")
                            ->check(CLI::IsMember({"paper-2025"}));
    auto* tables_opt = power_cmd->add_option("--tables", tables, "Directory of <name>_<rpm>.csv propeller tables");
    fixture_opt->excludes(tables_opt);
    power_cmd->add_option("--large", large, "Large propeller NAME:DIAMETER_M (with --tables)");
    power_cmd->add_option("--small", small, "Small propeller NAME:DIAMETER_M (with --tables)");
    power_cmd->add_option("--step", r_step, "Hover-time ratio grid step");
    power_cmd->add_option("--out", power_out, "Power curve CSV path");

    // wind-test
    auto* wind_cmd = app.add_subcommand("wind-test", "Gust-rejection hover with extended or retracted wings");
    std::string wind_mode = "extended", wind_cfg, wind_out;
    double wind_speed = 5.0;
    wind_cmd->add_option("--mode", wind_mode, "extended|retracted")->check(CLI::IsMember({"extended", "retracted"}));
    wind_cmd->add_option("--config", wind_cfg, "Scenario config overriding the built-in gust test");
    wind_cmd->add_option("--speed", wind_speed, "Wind speed, m/s (built-in test only)");
    wind_cmd->add_option("--out", wind_out, "SimLog CSV path");

    // mix-check
    auto* mix_cmd = app.add_subcommand("mix-check", "Mixer round-trip property run");
    std::string mix_cfg;
    int trials = 1000;
    std::uint64_t seed = 1;
    mix_cmd->add_option("--gains", mix_cfg, "Config with a [gains.allocation] section (random gains if omitted)");
    mix_cmd->add_option("--trials", trials, "Number of random trials");
    mix_cmd->add_option("--seed", seed, "RNG seed");

    // psd
    auto* psd_cmd = app.add_subcommand("psd", "Mean subtraction + averaged-periodogram PSD of a t,<value> CSV");
    std::string psd_in, psd_column, psd_out;
    std::size_t segment = 1024;
    double overlap = 0.5;
    std::size_t psd_window = 0;
    psd_cmd->add_option("input", psd_in, "Input CSV")->required();
    psd_cmd->add_option("--column", psd_column, "Value column (default: second)");
    psd_cmd->add_option("--segment", segment, "Segment length, samples");
    psd_cmd->add_option("--overlap", overlap, "Segment overlap fraction");
    psd_cmd->add_option("--window", psd_window, "Mean-subtraction window, samples (0 = none)");
    psd_cmd->add_option("--out", psd_out, "Density CSV path (f,density)");

    if (argc > 1 && argv[1][0] != '-') {
        const std::string name = argv[1];
        bool known = false;
        for (const auto* sc : app.get_subcommands([](const CLI::App*) { return true; })) {
            known = known || sc->get_name() == name;
        }
        if (!known) {
            err << "error kind=usage message=\"unknown subcommand '" << escape(name) << "'\"\n" << app.help();
            return 1;
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error kind=usage message=\"" << escape(e.what()) << "\"\n" << app.help();
        return 1;
    }

    try {
        if (*sim_cmd) {
            const io::LoadedScenario sc = io::load_scenario_file(sim_cfg);
            sim::SimLog log = sim::run_scenario(sc.spec, sc.vehicle);
            log.config_snapshot = sc.snapshot;
            if (!sim_out.empty()) io::write_text(sim_out, log.to_csv());
            scenario_summary(out, sc.spec, log);
        } else if (*bench_cmd) {
            splm::SplmParams p = splm::default_splm_params();
            if (!bench_cfg.empty()) {
                const io::ConfigFile c = io::ConfigFile::load(bench_cfg);
                p = io::build_splm(c, p);
                c.check_consumed({"splm"});
            }
            p.variant = splm::hinge_variant_from_string(variant);
            const splm::BenchRun run =
                splm::bench_run(p, throttle, amplitude, deg2rad(phase_deg), duration, fs);
            std::size_t window = 0;
            if (bench_window < 0) {
                window = static_cast<std::size_t>(std::max(1.0, std::round(fs * 2.0 * kPi / run.rotor_speed)));
            } else {
                window = static_cast<std::size_t>(bench_window);
            }
            if (!bench_out.empty()) io::write_text(bench_out, series_csv(run.torque, "torque"));
            out << "variant=" << variant << '\n';
            kv(out, "rotor_speed_hz", run.rotor_speed / (2.0 * kPi));
            spectrum_summary(out, run.torque, window, 1024, 0.5);
        } else if (*power_cmd) {
            if (fixture.empty() && tables.empty()) throw ParameterError("power-analysis needs --fixture or --tables");
            if (!(r_step > 0.0 && r_step <= 1.0)) throw ParameterError("--step must lie in (0, 1]");
            std::vector<propulsion::PropulsionConfig> cfgs;
            if (!fixture.empty()) {
                cfgs = propulsion::paper_2025_fixture();
            } else {
                const auto [ln, ld] = parse_prop_spec(large);
                const auto [sn, sd] = parse_prop_spec(small);
                cfgs = propulsion::standard_configs(propulsion::load_propeller_dir(tables, ln, ld),
                                                    propulsion::load_propeller_dir(tables, sn, sd));
            }
            std::vector<propulsion::ModePowers> powers;
            for (const auto& c : cfgs) powers.push_back(propulsion::evaluate_config(c));
            std::vector<double> grid;
            const int n = static_cast<int>(std::llround(1.0 / r_step));
            for (int i = 0; i <= n; ++i) grid.push_back(std::min(1.0, i * r_step));
            if (grid.back() < 1.0) grid.push_back(1.0);
            io::write_text(power_out, power_curve_csv(propulsion::average_power_curve(powers, grid)));
            power_summary(out, powers);
        } else if (*wind_cmd) {
            const aero::WingMode mode = aero::wing_mode_from_string(wind_mode);
            sim::ScenarioSpec spec;
            sim::VehicleParams params;
            std::string snapshot;
            if (!wind_cfg.empty()) {
                const io::LoadedScenario sc = io::load_scenario_file(wind_cfg);
                spec = sc.spec;
                params = sc.vehicle;
                snapshot = sc.snapshot;
                spec.initial_mode = mode;
                spec.mode_changes.clear();
            } else {
                spec = default_wind_spec(mode);
                spec.wind.speed = wind_speed;
                spec.validate();
            }
            sim::SimLog log = sim::run_scenario(spec, params);
            log.config_snapshot = snapshot;
            if (!wind_out.empty()) io::write_text(wind_out, log.to_csv());
            out << "mode=" << wind_mode << '\n';
            kv(out, "frontal_area_m2", aero::frontal_area(params.aero, mode));
            scenario_summary(out, spec, log);
        } else if (*mix_cmd) {
            std::optional<control::AllocationGains> gains;
            if (!mix_cfg.empty()) {
                const io::ConfigFile c = io::ConfigFile::load(mix_cfg);
                gains = io::build_allocation(c);
                io::build_limits(c);
                io::build_cascade(c);
                c.check_consumed({"gains.allocation", "gains.cascade"});
            }
            const RoundTripReport r = mix_roundtrip(trials, seed, gains);
            kv(out, "trials", r.trials);
            kv(out, "max_residual", r.max_residual);
            const bool ok = r.max_residual < 1e-9;
            out << "roundtrip=" << (ok ? "pass" : "fail") << '\n';
            if (!ok) {
                err << "error kind=roundtrip message=\"max residual " << format_number(r.max_residual)
                    << " exceeds 1e-9\"\n";
                return 2;
            }
        } else if (*psd_cmd) {
            const analysis::TimeSeries s = read_series(psd_in, psd_column);
            spectrum_summary(out, s, psd_window, segment, overlap);
            if (!psd_out.empty()) {
                const analysis::TimeSeries ms = psd_window > 0 ? analysis::mean_subtract(s, psd_window) : s;
                const analysis::PsdResult r = analysis::psd(ms, segment, overlap);
                std::ostringstream os;
                os << "f,density\n";
                for (std::size_t i = 0; i < r.freqs.size(); ++i) {
                    os << format_number(r.freqs[i]) << ',' << format_number(r.density[i]) << '\n';
                }
                io::write_text(psd_out, os.str());
            }
        }
    } catch (const std::exception& e) {
        err << "error kind=" << error_kind(e) << " message=\"" << escape(e.what()) << "\"\n";
        return exit_code(e);
    }
    return 0;
}

}  // namespace dart::cli
