#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dart/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "dart");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = dart::cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("dart_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& f) const { return (dir_ / f).string(); }
    fs::path dir_;
};

const std::string kSrc = DART_SOURCE_DIR;

}  // namespace

TEST_F(CliTest, PowerAnalysisFixture) {
    const auto r = run({"power-analysis", "--fixture", "paper-2025", "--out", path("power_curve.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("crossover_HPC_HLC=0.447"), std::string::npos);
    EXPECT_NE(r.out.find("reduction_at_r0.2_vs_HLC=29.2%"), std::string::npos);
    EXPECT_NE(r.out.find("reduction_at_r0.2_vs_HSC=15.6%"), std::string::npos);
    EXPECT_NE(r.out.find("hover_HPC_W=138.3\n"), std::string::npos);
    const std::string csv = slurp(path("power_curve.csv"));
    EXPECT_EQ(csv.rfind("r,HPC_W,HLC_W,HSC_W\n", 0), 0u);
    EXPECT_NE(csv.find("\n0.2,78.46,"), std::string::npos);
}

TEST_F(CliTest, PowerAnalysisTables) {
    const auto r = run({"power-analysis", "--tables", kSrc + "/data/props", "--out", path("p.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("hover_HLC_W="), std::string::npos);
    const auto bad = run({"power-analysis", "--tables", path("nowhere")});
    EXPECT_EQ(bad.code, 1);
    EXPECT_EQ(bad.err.rfind("error kind=config message=", 0), 0u);
    EXPECT_EQ(run({"power-analysis"}).code, 1);
    EXPECT_EQ(run({"power-analysis", "--fixture", "other"}).code, 1);
}

TEST_F(CliTest, MixCheck) {
    const auto r = run({"mix-check", "--trials", "1000"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("roundtrip=pass"), std::string::npos);
    const auto g = run({"mix-check", "--gains", kSrc + "/scenarios/gains.cfg", "--trials", "200"});
    EXPECT_EQ(g.code, 0) << g.err;
    EXPECT_EQ(run({"mix-check", "--trials", "0"}).code, 1);
}

TEST_F(CliTest, UnknownSubcommandAndMissing) {
    const auto r = run({"frobnicate"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("error kind=usage"), std::string::npos);
    EXPECT_NE(r.err.find("Usage:"), std::string::npos);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, SimulateWritesReproducibleLog) {
    const std::string cfg = path("s.cfg");
    std::ofstream(cfg) << "[scenario]\nname = quick\nduration = 0.5 s\ninitial_position = 0, 0, -1 m\n";
    const auto a = run({"simulate", cfg, "--out", path("a.csv")});
    const auto b = run({"simulate", cfg, "--out", path("b.csv")});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const std::string la = slurp(path("a.csv"));
    EXPECT_EQ(la, slurp(path("b.csv")));
    EXPECT_EQ(la.rfind("# [scenario]\n", 0), 0u);
    EXPECT_NE(la.find("t,px,py,pz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,Td1,Td2,Mdx,Mdy,d1,d2,mode,lambda\n"),
              std::string::npos);
}

TEST_F(CliTest, SimulateConfigErrors) {
    const auto missing = run({"simulate", path("none.cfg")});
    EXPECT_EQ(missing.code, 1);
    const std::string cfg = path("bad.cfg");
    std::ofstream(cfg) << "[scenario]\nduration = 1 s\nbogus = 1\n";
    const auto bad = run({"simulate", cfg});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("unknown key 'bogus'"), std::string::npos);
}

TEST_F(CliTest, BenchThenPsd) {
    const auto b = run({"bench-splm", "--variant", "coupled", "--duration", "2", "--out", path("tq.csv")});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_NE(b.out.find("mean_subtract_window=25\n"), std::string::npos);
    const auto p = run({"psd", path("tq.csv"), "--segment", "512", "--overlap", "0.5", "--window", "25",
                        "--out", path("psd.csv")});
    ASSERT_EQ(p.code, 0) << p.err;
    EXPECT_NE(p.out.find("fs_hz=1000\n"), std::string::npos);
    EXPECT_EQ(slurp(path("psd.csv")).rfind("f,density\n", 0), 0u);
    EXPECT_EQ(run({"psd", path("tq.csv"), "--overlap", "0.95"}).code, 1);
    EXPECT_EQ(run({"bench-splm", "--variant", "other"}).code, 1);
    EXPECT_EQ(run({"bench-splm", "--fs", "50"}).code, 1);  // below twice the rotor frequency
}

TEST_F(CliTest, WindTest) {
    const auto r = run({"wind-test", "--mode", "retracted"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("peak_deviation_m="), std::string::npos);
    EXPECT_NE(r.out.find("frontal_area_m2=0.05408\n"), std::string::npos);
}

TEST(CliErrors, KindsAndCodes) {
    using namespace dart;
    EXPECT_EQ(cli::exit_code(ConfigError("x")), 1);
    EXPECT_EQ(cli::exit_code(RangeError("x")), 1);
    EXPECT_EQ(cli::exit_code(InfeasibleError("x")), 2);
    EXPECT_EQ(cli::exit_code(SimulationFault(3, "x")), 2);
    EXPECT_EQ(cli::error_kind(ExtrapolationError("x")), "extrapolation");
    EXPECT_EQ(cli::error_kind(SimulationFault(3, "x")), "simulation_fault");
    EXPECT_EQ(cli::escape("a \"b\"\nc"), "a \\\"b\\\" c");
}
