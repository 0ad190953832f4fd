#include "commands.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qndc/certification.hpp"
#include "qndc/error.hpp"
#include "qndc/estimation.hpp"
#include "qndc/io.hpp"
#include "qndc/montecarlo.hpp"
#include "qndc/statistics.hpp"
#include "selftest.hpp"

namespace qndc::cli {

namespace {

namespace fs = std::filesystem;

struct RecordOptions {
    std::string records;
    std::string no_atoms_records;
};

struct CalibrationOptions {
    std::string config;
    std::optional<double> kappa;
    std::optional<double> j33;
    std::optional<double> j0;
    std::optional<double> r_l;
    std::optional<double> z;
};

struct SimulateOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> shots;
};

// Usage problems (bad flags, unreadable config) are distinct from data
// problems, which are reported as inconclusive.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_record_flags(CLI::App* cmd, RecordOptions& o)
{
    cmd->add_option("--records", o.records, "With-atoms shot records (<prefix>_atoms.csv)")->required();
    cmd->add_option("--no-atoms-records", o.no_atoms_records,
                    "No-atoms reference records (default: sibling <prefix>_no_atoms.csv)");
}

void add_calibration_flags(CLI::App* cmd, CalibrationOptions& o, bool with_j0_and_z)
{
    cmd->add_option("--config", o.config, "Experiment config supplying default calibration values");
    cmd->add_option("--kappa", o.kappa, "Readout coupling kappa");
    cmd->add_option("--j33", o.j33, "Input var(J_z)");
    cmd->add_option("--r-l", o.r_l, "Optical transmission r_L");
    if (with_j0_and_z) {
        cmd->add_option("--j0", o.j0, "Projection-noise normalisation J0 (default: J33)");
        cmd->add_option("--z", o.z, "Verdict margin in standard errors (default 3)")->check(CLI::NonNegativeNumber);
    }
}

Calibration resolve_calibration(const CalibrationOptions& o)
{
    std::optional<Calibration> base;
    if (!o.config.empty()) {
        try {
            base = load_config(o.config).calibration();
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    Calibration c = base.value_or(Calibration{});
    auto pick = [&](const std::optional<double>& flag, double Calibration::*field, const char* name) {
        if (flag) {
            c.*field = *flag;
        } else if (!base) {
            throw UsageError(std::string("missing calibration flag ") + name);
        }
    };
    pick(o.kappa, &Calibration::kappa, "--kappa");
    pick(o.j33, &Calibration::J33, "--j33");
    pick(o.r_l, &Calibration::r_L, "--r-l");
    if (o.j0) {
        c.J0 = *o.j0;
    } else if (!base) {
        c.J0 = c.J33;
    }
    if (o.z) {
        c.z_threshold = *o.z;
    } else if (!base) {
        c.z_threshold = 3.0;
    }
    if (c.r_L < 0.0 || c.r_L > 1.0) {
        throw UsageError("--r-l must lie in [0, 1]");
    }
    return c;
}

ShotRecords load_records(const RecordOptions& o)
{
    const fs::path with_atoms = o.records;
    const fs::path no_atoms = o.no_atoms_records.empty() ? no_atoms_sibling(with_atoms) : fs::path(o.no_atoms_records);
    return read_records(with_atoms, no_atoms);
}

void emit(const nlohmann::json& doc, const std::string& out_path, std::ostream& out)
{
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
    } else {
        write_file_atomic(out_path, text);
    }
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out)
{
    ExperimentConfig config;
    try {
        config = load_config(o.config);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (o.seed) {
        config.seed = *o.seed;
    }
    if (o.shots) {
        if (*o.shots < 1) {
            throw UsageError("--shots must be positive");
        }
        config.n_shots = *o.shots;
    }
    const auto records = simulate_experiment(config.params, config.noise, config.initial_state(), config.n_shots,
                                             config.seed);
    const auto paths = record_paths(o.out);
    write_records(paths, records);
    out << "wrote " << records.with_atoms.rows() << " shots x " << records.with_atoms.n_pulses() << " pulses to "
        << paths.with_atoms.string() << ", " << paths.no_atoms.string() << ", " << paths.metadata.string() << "\n";
    return exit_ok;
}

int cmd_stats(const RecordOptions& r, const std::optional<double>& r_l, const std::string& out_path,
              std::ostream& out)
{
    const auto records = load_records(r);
    const auto [with_atoms, no_atoms] = sample_moments(records);
    nlohmann::json doc = {
        {"schema_version", 1},
        {"with_atoms", to_json(with_atoms)},
        {"no_atoms", to_json(no_atoms)},
    };
    if (r_l) {
        doc["r_L"] = *r_l;
        doc["delta"] = to_json(delta_stats(with_atoms, no_atoms, *r_l));
        if (with_atoms.n_pulses >= 2) {
            const auto check = squeezing_condition(delta_stats(with_atoms, no_atoms, *r_l), with_atoms.var_p);
            doc["squeezing"] = {{"reduces_variance", check.reduces_variance}, {"margin", check.margin}};
        }
    }
    emit(doc, out_path, out);
    return exit_ok;
}

int cmd_estimate(const RecordOptions& r, const CalibrationOptions& c, const std::string& out_path, std::ostream& out)
{
    const Calibration cal = resolve_calibration(c);
    const auto records = load_records(r);
    const auto [with_atoms, no_atoms] = sample_moments(records);
    const auto delta = delta_stats(with_atoms, no_atoms, cal.r_L);
    const auto model = invert_three_pulse(delta, with_atoms.var_p, cal.kappa, cal.J33);
    nlohmann::json doc = {
        {"schema_version", 1},
        {"calibration", {{"kappa", cal.kappa}, {"J33", cal.J33}, {"r_L", cal.r_L}}},
        {"delta", to_json(delta)},
        {"estimates", to_json(model)},
    };
    emit(doc, out_path, out);
    return exit_ok;
}

int cmd_certify(const RecordOptions& r, const CalibrationOptions& c, const std::string& out_path, std::ostream& out)
{
    const Calibration cal = resolve_calibration(c);
    const auto records = load_records(r);
    const auto [with_atoms, no_atoms] = sample_moments(records);
    const auto report = certify(with_atoms, no_atoms, cal);
    const auto doc = to_json(report);
    if (out_path.empty()) {
        out << doc.dump(2) << "\n";
    } else {
        write_file_atomic(out_path, doc.dump(2) + "\n");
        out << "status: " << to_string(report.status) << "\n";
        out << "state_prep: " << std::boolalpha << report.verdicts.state_prep
            << "  info_damage: " << report.verdicts.info_damage << "  full_qnd: "
            << (report.verdicts.full_qnd ? (*report.verdicts.full_qnd ? "true" : "false") : "unavailable") << "\n";
        for (const auto& reason : report.reasons) {
            out << "reason: " << reason << "\n";
        }
    }
    return report.exit_code();
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Covariance-matrix simulation and certification of pulsed QND measurements"};
    app.require_subcommand(1);

    SimulateOptions simulate;
    auto* sim = app.add_subcommand("simulate", "Sample with-atoms and no-atoms shot records from a config");
    sim->add_option("--config", simulate.config, "Experiment config (JSON)")->required();
    sim->add_option("--out", simulate.out, "Output prefix for <prefix>_atoms.csv etc.")->required();
    sim->add_option("--seed", simulate.seed, "Override the config seed");
    sim->add_option("--shots", simulate.shots, "Override the config shot count");

    RecordOptions stats_records;
    std::optional<double> stats_r_l;
    std::string stats_out;
    auto* stats = app.add_subcommand("stats", "Sample moments and delta statistics of shot records");
    add_record_flags(stats, stats_records);
    stats->add_option("--r-l", stats_r_l, "Optical transmission r_L (enables delta statistics)");
    stats->add_option("--out", stats_out, "Write JSON here instead of stdout");

    RecordOptions estimate_records;
    CalibrationOptions estimate_cal;
    std::string estimate_out;
    auto* estimate = app.add_subcommand("estimate", "Invert three-pulse statistics for r_A and noise");
    add_record_flags(estimate, estimate_records);
    add_calibration_flags(estimate, estimate_cal, false);
    estimate->add_option("--out", estimate_out, "Write JSON here instead of stdout");

    RecordOptions certify_records;
    CalibrationOptions certify_cal;
    std::string certify_out;
    auto* cert = app.add_subcommand("certify", "Certify QND performance; exit 0 certified, 10 not, 2 inconclusive");
    add_record_flags(cert, certify_records);
    add_calibration_flags(cert, certify_cal, true);
    cert->add_option("--out", certify_out, "Write the JSON report here and print a summary");

    SelftestOptions selftest;
    auto* self = app.add_subcommand("selftest", "Run the closed-form, oracle and Monte Carlo equivalence suites");
    self->add_option("--shots", selftest.shots, "Monte Carlo shots per arm");
    self->add_option("--seed", selftest.seed, "Seed for the randomised suites");
    self->add_flag("--inject-sign-flip", selftest.hooks.flip_coupling_sign)->group("");
    self->add_flag("--inject-delta-bug", selftest.hooks.corrupt_delta)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*sim) {
            return cmd_simulate(simulate, out);
        }
        if (*stats) {
            return cmd_stats(stats_records, stats_r_l, stats_out, out);
        }
        if (*estimate) {
            return cmd_estimate(estimate_records, estimate_cal, estimate_out, out);
        }
        if (*cert) {
            return cmd_certify(certify_records, certify_cal, certify_out, out);
        }
        if (*self) {
            return report_selftest(run_selftest(selftest), out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        if (e.kind() == ErrorKind::io_error && *sim) {
            return exit_usage;
        }
        return (*sim) ? exit_usage : exit_inconclusive;
    }
    return exit_usage;
}

} // namespace qndc::cli
