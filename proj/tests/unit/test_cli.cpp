#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "fixtures.hpp"
#include "qndc/io.hpp"

namespace qndc {
namespace {

namespace fs = std::filesystem;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "qndc");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override { dir_ = test::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name()); }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write_config(const std::string& name, const std::string& body)
    {
        const auto path = dir_ / name;
        write_file_atomic(path, body);
        return path.string();
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

const char* const ideal_three = R"({
  "n_pulses": 3,
  "atoms": {"coherent_spin_state": 100},
  "light": {"coherent_pulse": 100},
  "kappa": 1.0,
  "n_shots": 1000,
  "seed": 42
})";

TEST_F(Cli, SimulateIsDeterministic)
{
    const auto cfg = write_config("a.json", ideal_three);
    auto r = invoke({"simulate", "--config", cfg, "--out", path("one")});
    ASSERT_EQ(r.code, 0) << r.err;
    r = invoke({"simulate", "--config", cfg, "--out", path("two")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_file(path("one_atoms.csv")), read_file(path("two_atoms.csv")));
    EXPECT_EQ(read_file(path("one_no_atoms.csv")), read_file(path("two_no_atoms.csv")));
    const auto table = read_shot_table(path("one_atoms.csv"));
    EXPECT_EQ(table.rows(), 1000u);
    EXPECT_EQ(table.n_pulses(), 3);
    const auto meta = nlohmann::json::parse(read_file(path("one_meta.json")));
    EXPECT_EQ(meta.at("seed"), 42);
    EXPECT_EQ(meta.at("n_shots"), 1000);

    r = invoke({"simulate", "--config", cfg, "--out", path("three"), "--seed", "43", "--shots", "10"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_shot_table(path("three_atoms.csv")).rows(), 10u);
}

TEST_F(Cli, SimulateReportsValidationErrors)
{
    const auto cfg = write_config("bad.json", R"({
  "atoms": {"coherent_spin_state": 100},
  "light": {"coherent_pulse": 100},
  "kappa": 1.0,
  "r_A": 1.2
})");
    const auto r = invoke({"simulate", "--config", cfg, "--out", path("x")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("r_A"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("line 5"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(path("x_atoms.csv")));
}

TEST_F(Cli, CertifyIdealExitsZero)
{
    const auto cfg = write_config("a.json", ideal_three);
    ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", path("run"), "--shots", "100000"}).code, 0);
    const auto r = invoke({"certify", "--records", path("run_atoms.csv"), "--kappa", "1", "--j33", "25", "--j0", "25",
                           "--r-l", "1", "--z", "3", "--out", path("report.json")});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    const auto report = nlohmann::json::parse(read_file(path("report.json")));
    EXPECT_EQ(report.at("schema_version"), 1);
    EXPECT_EQ(report.at("status"), "certified");
    EXPECT_EQ(report.at("verdicts").at("state_prep"), true);
    EXPECT_EQ(report.at("verdicts").at("info_damage"), true);
    EXPECT_EQ(report.at("verdicts").at("full_qnd"), true);

    // Analytic figures 0.5, 1, 0.5 within five standard errors.
    const auto& f = report.at("figures_of_merit");
    for (const auto& [key, expected] : {std::pair{"c2_in_meter", 0.5}, {"c2_in_out", 1.0}, {"c2_out_meter", 0.5}}) {
        const double v = f.at(key).at("value");
        const double se = f.at(key).at("std_error");
        EXPECT_LE(std::abs(v - expected), 5.0 * se) << key;
    }
}

TEST_F(Cli, CertifyTakesCalibrationFromConfig)
{
    const auto cfg = write_config("a.json", ideal_three);
    ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", path("run"), "--shots", "50000"}).code, 0);
    const auto r = invoke({"certify", "--records", path("run_atoms.csv"), "--config", cfg});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto report = nlohmann::json::parse(r.out);
    EXPECT_EQ(report.at("calibration").at("J33"), 25.0);
    EXPECT_EQ(report.at("calibration").at("kappa"), 1.0);
}

TEST_F(Cli, CertifyTwoPulsesIsReduced)
{
    const auto cfg = write_config("two.json", R"({"n_pulses": 2, "atoms": {"coherent_spin_state": 100},
        "light": {"coherent_pulse": 100}, "kappa": 1.0, "n_shots": 20000, "seed": 3})");
    ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", path("run")}).code, 0);
    EXPECT_EQ(read_shot_table(path("run_atoms.csv")).n_pulses(), 2);
    const auto r = invoke({"certify", "--records", path("run_atoms.csv"), "--kappa", "1", "--j33", "25", "--r-l", "1"});
    EXPECT_EQ(r.code, 2);
    const auto report = nlohmann::json::parse(r.out);
    EXPECT_EQ(report.at("verdicts").at("full_qnd"), "unavailable");
    EXPECT_EQ(report.at("status"), "inconclusive");
}

TEST_F(Cli, CertifyUninformativeCouplingIsInconclusive)
{
    // Data taken without coupling, analysed as though kappa were 1.
    const auto cfg = write_config("null.json", R"({"atoms": {"coherent_spin_state": 100},
        "light": {"coherent_pulse": 100}, "kappa": 0.0, "n_shots": 20000, "seed": 4})");
    ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", path("run")}).code, 0);
    const auto r = invoke({"certify", "--records", path("run_atoms.csv"), "--kappa", "1", "--j33", "25", "--r-l", "1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("uninformative coupling"), std::string::npos) << r.out;
}

TEST_F(Cli, CertifyUsageErrors)
{
    const auto cfg = write_config("a.json", ideal_three);
    ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", path("run"), "--shots", "100"}).code, 0);
    auto r = invoke({"certify", "--records", path("run_atoms.csv"), "--j33", "25", "--r-l", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--kappa"), std::string::npos);
    r = invoke({"certify", "--records", path("run_atoms.csv"), "--kappa", "abc"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(invoke({"certify"}).code, 1);
    EXPECT_EQ(invoke({}).code, 1);
    EXPECT_EQ(invoke({"frobnicate"}).code, 1);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(Cli, MissingRecordsAreInconclusive)
{
    const auto r = invoke({"certify", "--records", path("nothing_atoms.csv"), "--kappa", "1", "--j33", "25", "--r-l", "1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, StatsAndEstimate)
{
    const auto cfg = write_config("b.json", R"({"atoms": {"coherent_spin_state": 100},
        "light": {"coherent_pulse": 100}, "kappa": 1.0, "r_A": 0.8, "r_L": 0.9,
        "noise": {"J_z,J_z": 2, "J_z,S_y": 0.5, "S_y,S_y": 4}, "n_shots": 100000, "seed": 9})");
    ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", path("run")}).code, 0);

    auto r = invoke({"stats", "--records", path("run_atoms.csv"), "--r-l", "0.9"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto stats = nlohmann::json::parse(r.out);
    EXPECT_EQ(stats.at("with_atoms").at("n_shots"), 100000);
    EXPECT_TRUE(stats.contains("delta"));

    r = invoke({"estimate", "--records", path("run_atoms.csv"), "--no-atoms-records", path("run_no_atoms.csv"), "--kappa",
                "1", "--j33", "25", "--r-l", "0.9", "--out", path("est.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto est = nlohmann::json::parse(read_file(path("est.json")));
    const double r_a = est.at("estimates").at("r_A");
    EXPECT_NEAR(r_a, 0.8, 0.05);
}

TEST_F(Cli, Selftest)
{
    auto r = invoke({"selftest", "--shots", "5000"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("selftest passed"), std::string::npos);
    r = invoke({"selftest", "--shots", "5000", "--inject-sign-flip"});
    EXPECT_EQ(r.code, 0) << r.out;
    r = invoke({"selftest", "--shots", "5000", "--inject-delta-bug"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("FAIL closed-form equivalence"), std::string::npos) << r.out;
}

} // namespace
} // namespace qndc
