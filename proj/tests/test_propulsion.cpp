#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "dart/propulsion/propeller.hpp"
#include "dart/propulsion/study.hpp"

using namespace dart;
using namespace dart::propulsion;

namespace {

const ModePowers& find(const std::vector<ModePowers>& v, const std::string& name) {
    for (const auto& m : v) {
        if (m.name == name) return m;
    }
    throw std::runtime_error("missing " + name);
}

std::vector<ModePowers> fixture_powers() {
    std::vector<ModePowers> out;
    for (const auto& cfg : paper_2025_fixture()) out.push_back(evaluate_config(cfg));
    return out;
}

}  // namespace

TEST(AdvanceRatio, Examples) {
    EXPECT_EQ(advance_ratio(0.0, 100.0, 0.1778), 0.0);
    EXPECT_NEAR(advance_ratio(16.0, 100.0, 0.1778), 0.8999, 1e-4);
    EXPECT_NEAR(advance_ratio(8.0, 50.0, 0.2), 2.0 * advance_ratio(4.0, 50.0, 0.2), 1e-15);
    EXPECT_THROW(advance_ratio(1.0, 0.0, 0.2), DomainError);
    EXPECT_THROW(advance_ratio(1.0, 10.0, 0.0), DomainError);
    EXPECT_THROW(advance_ratio(-1.0, 10.0, 0.2), DomainError);
}

TEST(ThrustPower, SingleRowOracle) {
    const auto t = PropellerTable::single("p", 0.4064, {{0.0, 0.1, 0.05}});
    const auto tp = thrust_power(t, 1.225, 0.0, 100.0);
    EXPECT_NEAR(tp.thrust, 0.1 * 1.225 * 1e4 * std::pow(0.4064, 4), 1e-9);
    EXPECT_NEAR(tp.thrust, 33.41, 0.01);
    EXPECT_NEAR(tp.power, 0.05 * 1.225 * 1e6 * std::pow(0.4064, 5), 1e-9);
}

TEST(ThrustPower, ZeroCoefficient) {
    const auto t = PropellerTable::single("p", 0.2, {{0.0, 0.1, 0.05}, {1.0, 0.0, 0.02}});
    // J = 1 with n = 50 rev/s, D = 0.2 -> V = 10
    EXPECT_EQ(thrust_power(t, 1.225, 10.0, 50.0).thrust, 0.0);
}

TEST(ThrustPower, MidpointInterpolation) {
    const auto t = PropellerTable::single("p", 0.2, {{0.2, 0.1, 0.06}, {0.6, 0.04, 0.02}});
    const auto c = t.coefficients(0.4, 0.0);
    EXPECT_NEAR(c.ct, 0.07, 1e-15);
    EXPECT_NEAR(c.cp, 0.04, 1e-15);
}

TEST(ThrustPower, NoExtrapolation) {
    const auto t = PropellerTable::single("p", 0.2, {{0.2, 0.1, 0.06}, {0.6, 0.04, 0.02}});
    EXPECT_THROW(t.coefficients(0.1, 0.0), ExtrapolationError);
    EXPECT_THROW(t.coefficients(0.7, 0.0), ExtrapolationError);
    EXPECT_THROW(thrust_power(t, 1.225, 0.0, 50.0), ExtrapolationError);  // J = 0
}

TEST(ThrustPower, Homogeneity) {
    const auto t = synthetic_table("s", 0.25, 0.12, -0.1, 0.05, -0.02);
    const auto base = thrust_power(t, 1.2, 0.0, 80.0);
    EXPECT_NEAR(thrust_power(t, 2.4, 0.0, 80.0).thrust, 2.0 * base.thrust, 1e-12);
    EXPECT_NEAR(thrust_power(t, 1.2, 0.0, 160.0).thrust, 4.0 * base.thrust, 1e-12);
    EXPECT_NEAR(thrust_power(t, 1.2, 0.0, 160.0).power, 8.0 * base.power, 1e-9);
}

TEST(ThrustPower, InterpolationStaysInsideBracket) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<CoefficientRow> rows;
    for (int i = 0; i < 12; ++i) rows.push_back({0.1 * i, 0.15 * u(rng) - 0.02, 0.01 + 0.05 * u(rng)});
    const auto t = PropellerTable::single("r", 0.2, rows);
    for (int k = 0; k < 1000; ++k) {
        const double j = 1.1 * u(rng);
        const auto i = static_cast<std::size_t>(std::min(10.0, std::floor(j / 0.1)));
        const double lo = std::min(rows[i].ct, rows[i + 1].ct);
        const double hi = std::max(rows[i].ct, rows[i + 1].ct);
        const double ct = t.coefficients(j, 0.0).ct;
        EXPECT_GE(ct, lo - 1e-15);
        EXPECT_LE(ct, hi + 1e-15);
    }
}

TEST(ThrustPower, InterpolatesAcrossSheets) {
    const PropellerTable t("m", 0.2,
                           {RpmSheet{50.0, {{0.0, 0.10, 0.04}, {1.0, 0.02, 0.02}}},
                            RpmSheet{100.0, {{0.0, 0.14, 0.06}, {1.0, 0.04, 0.03}}}});
    const auto c = t.coefficients(0.5, 75.0);
    EXPECT_NEAR(c.ct, 0.5 * (0.06 + 0.09), 1e-15);
    EXPECT_NEAR(c.cp, 0.5 * (0.03 + 0.045), 1e-15);
    EXPECT_THROW(t.coefficients(0.5, 40.0), ExtrapolationError);
    EXPECT_THROW(t.coefficients(0.5, 101.0), ExtrapolationError);
}

TEST(TableValidation, RejectsBadRows) {
    EXPECT_THROW(PropellerTable::single("a", 0.2, {{0.2, 0.1, 0.05}, {0.2, 0.1, 0.05}}), ConfigError);
    EXPECT_THROW(PropellerTable::single("a", 0.2, {{0.2, 0.1, 0.0}}), ConfigError);
    EXPECT_THROW(PropellerTable::single("a", 0.0, {{0.2, 0.1, 0.05}}), ConfigError);
}

TEST(SolveRpm, ZeroThrustStatic) {
    const auto t = synthetic_table("s", 0.2, 0.1, 0.0, 0.05, 0.0);
    EXPECT_EQ(solve_rpm_for_thrust(t, 1.225, 0.0, 0.0), 0.0);
}

TEST(SolveRpm, ClosedFormConstantCt) {
    const auto t = synthetic_table("s", 0.1778, 0.11, 0.0, 0.05, 0.0);
    for (double treq : {0.5, 3.0, 6.0, 11.0}) {
        const double n = solve_rpm_for_thrust(t, 1.225, 0.0, treq);
        const double expected = std::sqrt(treq / (0.11 * 1.225 * std::pow(0.1778, 4)));
        EXPECT_NEAR(n, expected, 1e-9 * expected);
        EXPECT_LT(std::abs(thrust_power(t, 1.225, 0.0, n).thrust - treq), 1e-6);
    }
}

TEST(SolveRpm, ForwardFlight) {
    const auto t = synthetic_table("s", 0.1778, 0.12, -0.1, 0.05, -0.02, 1.1);
    const double n = solve_rpm_for_thrust(t, 1.225, 16.0, 4.0);
    EXPECT_NEAR(thrust_power(t, 1.225, 16.0, n).thrust, 4.0, 1e-6);
    // lowest root: slightly slower is short of thrust
    EXPECT_LT(thrust_power(t, 1.225, 16.0, n * (1 - 1e-6)).thrust, 4.0);
}

TEST(SolveRpm, Unachievable) {
    const auto t = synthetic_table("s", 0.1778, 0.11, 0.0, 0.05, 0.0);
    EXPECT_THROW(solve_rpm_for_thrust(t, 1.225, 0.0, 1e6), InfeasibleError);
}

TEST(Study, FixtureModePowers) {
    const auto p = fixture_powers();
    EXPECT_NEAR(find(p, "HPC").hover_w, 138.3, 1e-9);
    EXPECT_NEAR(find(p, "HPC").cruise_w, 63.5, 1e-9);
    EXPECT_NEAR(find(p, "HLC").hover_w, 66.0, 1e-9);
    EXPECT_NEAR(find(p, "HLC").cruise_w, 122.0, 1e-9);
    EXPECT_NEAR(find(p, "HSC").hover_w, 210.6, 1e-9);
    EXPECT_NEAR(find(p, "HSC").cruise_w, 63.5, 1e-9);
}

TEST(Study, AverageCurve) {
    const auto p = fixture_powers();
    const auto curve = average_power_curve(p, {0.0, 0.2, 0.5, 1.0});
    ASSERT_EQ(curve.names[0], "HPC");
    EXPECT_NEAR(curve.power[0][1], 78.46, 1e-9);
    EXPECT_NEAR(curve.power[1][1], 110.8, 1e-9);
    for (std::size_t c = 0; c < p.size(); ++c) {
        EXPECT_EQ(curve.power[c][0], p[c].cruise_w);
        EXPECT_EQ(curve.power[c][3], p[c].hover_w);
        EXPECT_NEAR(curve.power[c][2], 0.5 * (curve.power[c][0] + curve.power[c][3]), 1e-12);
    }
    EXPECT_NEAR(100.0 * relative_reduction(curve.power[0][1], curve.power[1][1]), 29.2, 0.1);
    EXPECT_NEAR(100.0 * relative_reduction(curve.power[0][1], curve.power[2][1]), 15.6, 0.1);
    EXPECT_THROW(average_power_curve(p, {1.2}), ParameterError);
}

TEST(Study, Crossover) {
    const auto p = fixture_powers();
    const auto x = crossover_ratio(find(p, "HPC"), find(p, "HLC"));
    ASSERT_TRUE(x.ratio.has_value());
    EXPECT_NEAR(*x.ratio, 58.5 / 130.8, 1e-12);
    EXPECT_NEAR(*x.ratio, 0.4472, 1e-4);

    const ModePowers a{"a", 100.0, 50.0};
    const ModePowers b{"b", 110.0, 60.0};
    EXPECT_FALSE(crossover_ratio(a, b).ratio.has_value());
    EXPECT_FALSE(crossover_ratio(a, b).degenerate);
    EXPECT_TRUE(crossover_ratio(a, a).degenerate);
}

TEST(Study, ModeGaps) {
    const auto p = fixture_powers();
    EXPECT_NEAR(100.0 * relative_reduction(find(p, "HPC").hover_w, find(p, "HSC").hover_w), 34.3, 0.5);
    EXPECT_NEAR(100.0 * relative_reduction(find(p, "HPC").cruise_w, find(p, "HLC").cruise_w), 48.0, 0.5);
    EXPECT_THROW(relative_reduction(1.0, 0.0), UndefinedError);
}

TEST(Study, TablePipelineMatchesClosedForm) {
    // Constant coefficients at hover: n = sqrt(T / (C_T rho D^4)), P = C_P rho n^3 D^5.
    const auto large = synthetic_table("L", 0.4064, 0.11, 0.0, 0.045, 0.0);
    const auto small = synthetic_table("S", 0.1778, 0.12, 0.0, 0.05, 0.0);
    const auto cfgs = standard_configs(large, small);
    const auto hover = [](double ct, double cp, double d, double t) {
        const double n = std::sqrt(t / (ct * 1.225 * std::pow(d, 4)));
        return cp * 1.225 * n * n * n * std::pow(d, 5);
    };
    const double p_large = hover(0.11, 0.045, 0.4064, 6.0);
    const double p_small = hover(0.12, 0.05, 0.1778, 6.0);
    EXPECT_NEAR(mode_power(cfgs[0], FlightMode::MultiRotor, 1.225, 0.0, 12.0), p_large + p_small, 1e-6);
    EXPECT_NEAR(mode_power(cfgs[1], FlightMode::MultiRotor, 1.225, 0.0, 12.0), 2 * p_large, 1e-6);
    EXPECT_NEAR(mode_power(cfgs[2], FlightMode::MultiRotor, 1.225, 0.0, 12.0), 2 * p_small, 1e-6);
    EXPECT_LT(p_large, p_small);
}

TEST(Study, ShippedTablesRunThePipeline) {
    const std::string dir = std::string(DART_SOURCE_DIR) + "/data/props";
    const auto large = load_propeller_dir(dir, "synth16in", 0.4064);
    const auto small = load_propeller_dir(dir, "synth7in", 0.1778);
    EXPECT_TRUE(large.multi_sheet());
    std::vector<ModePowers> p;
    for (const auto& cfg : standard_configs(large, small)) p.push_back(evaluate_config(cfg));
    // Large propellers hover cheaper, a single small propeller cruises cheaper.
    EXPECT_LT(find(p, "HLC").hover_w, find(p, "HPC").hover_w);
    EXPECT_LT(find(p, "HPC").hover_w, find(p, "HSC").hover_w);
    EXPECT_LT(find(p, "HPC").cruise_w, find(p, "HLC").cruise_w);
}

TEST(Study, LoadDirErrors) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "dart_prop_test";
    fs::create_directories(dir);
    {
        std::ofstream(dir / "x_5000.csv") << "J,CT\n0,0.1\n";
    }
    EXPECT_THROW(load_propeller_dir(dir.string(), "x", 0.2), ConfigError);
    EXPECT_THROW(load_propeller_dir(dir.string(), "missing", 0.2), ConfigError);
    EXPECT_THROW(load_propeller_dir((dir / "nope").string(), "x", 0.2), ConfigError);
    {
        std::ofstream(dir / "x_5000.csv") << "J,CT,CP\n0,0.1,0.05\n0.5,0.06,0.04\n";
    }
    const auto t = load_propeller_dir(dir.string(), "x", 0.2);
    EXPECT_FALSE(t.multi_sheet());
    EXPECT_NEAR(t.coefficients(0.25, 0.0).ct, 0.08, 1e-15);
    fs::remove_all(dir);
}
