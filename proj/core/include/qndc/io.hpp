#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "qndc/certification.hpp"
#include "qndc/dynamics.hpp"
#include "qndc/estimation.hpp"
#include "qndc/gaussian_state.hpp"
#include "qndc/montecarlo.hpp"
#include "qndc/statistics.hpp"

namespace qndc {

/// Everything needed to simulate and certify one experiment.
///
/// JSON layout (keys not listed are rejected):
///
///   n_pulses         1..3, default 3
///   atoms            {"coherent_spin_state": N_A} or {"mean_Jx": x, "cov": 3x3}
///   light            {"coherent_pulse": N_ph}     or {"mean_Sx": s, "cov": 3n x 3n}
///   kappa | g_tau    exactly one of them
///   r_A, r_L         transmissions in [0,1], default 1
///   noise            {"J_z,J_z": 2, "J_z,S_y": 0.5, "5,5": 4}; labels over
///                    J_x..J_z, S_x..S_z or 1-based indices 1..6
///   n_shots, seed    sampler settings, default 1000 and 0
///   J33, J0          calibration overrides (default: var(J_z) and |<J_x>|/2)
///   r_L_calibration  transmission assumed by the analysis (default r_L)
///   z_threshold      default 3
struct ExperimentConfig {
    int n_pulses = 3;
    ExperimentParams params;
    NoiseModel noise;
    AtomicBlock atoms;
    OpticalBlock light;
    std::int64_t n_shots = 1000;
    std::uint64_t seed = 0;
    std::optional<double> J33;
    std::optional<double> J0;
    std::optional<double> r_L_calibration;
    double z_threshold = 3.0;

    [[nodiscard]] Layout layout() const { return Layout(n_pulses); }
    [[nodiscard]] GaussianState initial_state() const;
    [[nodiscard]] Calibration calibration() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Throws Error(parse_error) with a line number for malformed JSON and
/// Error(validation_error) naming the offending field.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// CSV with header "shot,p_y[,q_y[,r_y]]" and 17 significant digits.
std::string format_shot_table(const ShotTable& table);
ShotTable parse_shot_table(std::string_view text);
void write_shot_table(const std::filesystem::path& path, const ShotTable& table);
ShotTable read_shot_table(const std::filesystem::path& path);

struct RecordPaths {
    std::filesystem::path with_atoms;
    std::filesystem::path no_atoms;
    std::filesystem::path metadata;
};

/// "<prefix>_atoms.csv", "<prefix>_no_atoms.csv", "<prefix>_meta.json".
RecordPaths record_paths(const std::filesystem::path& prefix);
/// Sibling no-atoms file of a "<prefix>_atoms.csv" path.
std::filesystem::path no_atoms_sibling(const std::filesystem::path& with_atoms);

void write_records(const RecordPaths& paths, const ShotRecords& records);
/// Reads both arms; metadata is picked up when the companion file exists.
ShotRecords read_records(const std::filesystem::path& with_atoms, const std::filesystem::path& no_atoms);

nlohmann::json to_json(const MomentSet& moments);
nlohmann::json to_json(const DeltaStats& delta);
nlohmann::json to_json(const EstimatedModel& model);
nlohmann::json to_json(const Quantity& q);
nlohmann::json to_json(const CertificationReport& report);
nlohmann::json to_json(const EmpiricalCheck& check);

/// Write to a temporary sibling, then rename over the destination.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

} // namespace qndc
