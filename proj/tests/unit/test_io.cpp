#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "fixtures.hpp"
#include "qndc/certification.hpp"
#include "qndc/error.hpp"
#include "qndc/io.hpp"
#include "qndc/montecarlo.hpp"

namespace qndc {
namespace {

namespace fs = std::filesystem;

constexpr const char* ideal_config = R"({
  "n_pulses": 3,
  "atoms": {"coherent_spin_state": 100},
  "light": {"coherent_pulse": 100},
  "kappa": 1.0,
  "n_shots": 1000,
  "seed": 42
})";

Error error_of(std::string_view text)
{
    try {
        (void)parse_config(text);
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "config accepted: " << text;
    return Error(ErrorKind::io_error, "");
}

TEST(Config, ShorthandExpansion)
{
    const auto c = parse_config(ideal_config);
    EXPECT_EQ(c.n_pulses, 3);
    EXPECT_EQ(c.atoms.mean_Jx, 50.0);
    EXPECT_EQ(c.atoms.cov(2, 2), 25.0);
    EXPECT_EQ(c.atoms.cov(0, 0), 0.0);
    EXPECT_EQ(c.light.mean_Sx, 50.0);
    EXPECT_EQ(c.light.cov(4, 4), 25.0);
    EXPECT_DOUBLE_EQ(c.params.kappa(), 1.0);
    EXPECT_DOUBLE_EQ(c.params.kappa_back(), 1.0);
    EXPECT_EQ(c.n_shots, 1000);
    EXPECT_EQ(c.seed, 42u);
    const auto cal = c.calibration();
    EXPECT_DOUBLE_EQ(cal.J33, 25.0);
    EXPECT_DOUBLE_EQ(cal.J0, 25.0);
    EXPECT_DOUBLE_EQ(cal.r_L, 1.0);
    EXPECT_DOUBLE_EQ(cal.z_threshold, 3.0);
}

TEST(Config, ExplicitBlocksAndNoiseLabels)
{
    const auto c = parse_config(R"({
      "n_pulses": 2,
      "atoms": {"mean_Jx": 40, "cov": [[0,0,0],[0,9,0],[0,0,16]]},
      "light": {"mean_Sx": 20, "cov": [[0,0,0,0,0,0],[0,4,0,0,1,0],[0,0,4,0,0,0],
                                       [0,0,0,0,0,0],[0,1,0,0,4,0],[0,0,0,0,0,4]]},
      "g_tau": 0.05,
      "r_A": 0.9,
      "noise": {"J_z,J_z": 2, "J_z,S_y": 0.5, "5,5": 4},
      "J0": 20,
      "r_L_calibration": 0.95,
      "z_threshold": 2
    })");
    EXPECT_DOUBLE_EQ(c.params.kappa(), 1.0);
    EXPECT_DOUBLE_EQ(c.params.kappa_back(), 2.0);
    EXPECT_EQ(c.noise.n33(), 2.0);
    EXPECT_EQ(c.noise.n35(), 0.5);
    EXPECT_EQ(c.noise.n55(), 4.0);
    const auto s = c.initial_state();
    EXPECT_EQ(s.entry(Component::P_y, Component::Q_y), 1.0);
    const auto cal = c.calibration();
    EXPECT_DOUBLE_EQ(cal.J33, 16.0);
    EXPECT_DOUBLE_EQ(cal.J0, 20.0);
    EXPECT_DOUBLE_EQ(cal.r_L, 0.95);
    EXPECT_DOUBLE_EQ(cal.z_threshold, 2.0);
}

TEST(Config, ValidationErrorNamesFieldAndLine)
{
    const auto e = error_of(R"({
  "atoms": {"coherent_spin_state": 100},
  "light": {"coherent_pulse": 100},
  "kappa": 1.0,
  "r_A": 1.2
})");
    EXPECT_EQ(e.kind(), ErrorKind::validation_error);
    const std::string what = e.what();
    EXPECT_NE(what.find("'r_A'"), std::string::npos) << what;
    EXPECT_NE(what.find("line 5"), std::string::npos) << what;
}

TEST(Config, RejectsMalformedInput)
{
    EXPECT_EQ(error_of("{\n  \"kappa\": 1,\n  oops\n}").kind(), ErrorKind::parse_error);
    EXPECT_NE(std::string(error_of("{\n  \"kappa\": 1,\n  oops\n}").what()).find("line 3"), std::string::npos);
    EXPECT_EQ(error_of(R"({"atoms": {"coherent_spin_state": 1}, "light": {"coherent_pulse": 1}, "kappa": 1, "colour": 2})").kind(),
              ErrorKind::validation_error);
    EXPECT_EQ(error_of(R"({"atoms": {"coherent_spin_state": 1}, "light": {"coherent_pulse": 1}, "kappa": 1, "g_tau": 1})").kind(),
              ErrorKind::validation_error);
    EXPECT_EQ(error_of(R"({"atoms": {"coherent_spin_state": 1}, "light": {"coherent_pulse": 1}})").kind(),
              ErrorKind::validation_error);
    EXPECT_EQ(error_of(R"({"atoms": {"coherent_spin_state": 1}, "light": {"coherent_pulse": 1}, "kappa": 1, "n_pulses": 4})").kind(),
              ErrorKind::validation_error);
    EXPECT_EQ(error_of(R"({"atoms": {"coherent_spin_state": 1}, "light": {"coherent_pulse": 1}, "kappa": 1, "noise": {"J_q,J_z": 1}})").kind(),
              ErrorKind::validation_error);
    EXPECT_EQ(error_of(R"({"atoms": {"coherent_spin_state": 1}, "light": {"coherent_pulse": 1}, "kappa": 1, "noise": {"3,3": -1}})").kind(),
              ErrorKind::validation_error);
    EXPECT_EQ(error_of(R"({"atoms": {"coherent_spin_state": 1}, "light": {"coherent_pulse": 1}, "kappa": 1, "n_shots": 0})").kind(),
              ErrorKind::validation_error);
}

TEST(Config, JsonRoundTrip)
{
    const auto c = parse_config(ideal_config);
    const auto again = parse_config(c.to_json().dump());
    EXPECT_EQ(again.to_json(), c.to_json());
}

TEST(ShotTable, CsvRoundTripIsExact)
{
    const ShotTable t(3, {0.1, -1.0 / 3.0, 1e-300, std::numeric_limits<double>::max(), 2.5e17, -0.0,
                          std::nextafter(1.0, 2.0), 123456789.123456789, -7.0});
    const auto text = format_shot_table(t);
    EXPECT_EQ(text.substr(0, text.find('\n')), "shot,p_y,q_y,r_y");
    const auto back = parse_shot_table(text);
    ASSERT_EQ(back.rows(), 3u);
    for (std::size_t i = 0; i < t.values().size(); ++i) {
        EXPECT_EQ(back.values()[i], t.values()[i]) << i;
    }
    EXPECT_EQ(format_shot_table(back), text);
}

TEST(ShotTable, ParseErrorsCarryLineNumbers)
{
    try {
        (void)parse_shot_table("shot,p_y\n0,1.5\n1,abc\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse_error);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    EXPECT_THROW((void)parse_shot_table("time,p_y\n0,1\n"), Error);
    EXPECT_THROW((void)parse_shot_table("shot,p_y,q_y\n0,1\n"), Error);
}

TEST(Records, WriteReadRoundTrip)
{
    const auto dir = test::scratch_dir("records");
    const auto p = test::param_set_b();
    const auto records = simulate_experiment(p.params, p.noise, p.initial, 300, 5);
    const auto paths = record_paths(dir / "run");
    EXPECT_EQ(paths.with_atoms.filename(), "run_atoms.csv");
    EXPECT_EQ(paths.no_atoms.filename(), "run_no_atoms.csv");
    EXPECT_EQ(paths.metadata.filename(), "run_meta.json");
    EXPECT_EQ(no_atoms_sibling(paths.with_atoms), paths.no_atoms);
    write_records(paths, records);
    const auto back = read_records(paths.with_atoms, paths.no_atoms);
    EXPECT_EQ(back.with_atoms, records.with_atoms);
    EXPECT_EQ(back.no_atoms, records.no_atoms);
    EXPECT_EQ(back.metadata, records.metadata);

    const auto first = read_file(paths.with_atoms);
    write_records(record_paths(dir / "again"), simulate_experiment(p.params, p.noise, p.initial, 300, 5));
    EXPECT_EQ(read_file(dir / "again_atoms.csv"), first);
    fs::remove_all(dir);
}

TEST(Records, MissingFileIsIoError)
{
    try {
        (void)read_records("/nonexistent/x_atoms.csv", "/nonexistent/x_no_atoms.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::io_error);
    }
}

TEST(AtomicWrite, ReplacesContentAndLeavesNoTemporary)
{
    const auto dir = test::scratch_dir("atomic");
    const auto path = dir / "out.json";
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    EXPECT_EQ(read_file(path), "second");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) {
        ++entries;
    }
    EXPECT_EQ(entries, 1);
    fs::remove_all(dir);
}

TEST(ReportJson, CarriesSchemaAndIntermediates)
{
    const auto p = test::param_set_a();
    const auto records = simulate_experiment(p.params, p.noise, p.initial, 5000, 8);
    const auto [with, without] = sample_moments(records);
    const auto report = certify(with, without, Calibration{1.0, 25.0, 25.0, 1.0, 3.0});
    const auto j = to_json(report);
    EXPECT_EQ(j.at("schema_version"), 1);
    EXPECT_EQ(j.at("status"), std::string(to_string(report.status)));
    EXPECT_EQ(j.at("exit_code"), report.exit_code());
    for (const char* key : {"calibration", "criteria", "delta", "figures_of_merit", "nonclassicality", "verdicts",
                            "point_verdicts", "reasons", "warnings", "moments", "estimates"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_TRUE(j.at("moments").contains("with_atoms"));
    EXPECT_TRUE(j.at("verdicts").contains("full_qnd"));
}

TEST(ReportJson, UndefinedQuantitiesSerialiseAsNull)
{
    Quantity q;
    q.error = "undefined";
    const auto j = to_json(q);
    EXPECT_TRUE(j.at("value").is_null());
    EXPECT_EQ(j.at("error"), "undefined");
}

} // namespace
} // namespace qndc
