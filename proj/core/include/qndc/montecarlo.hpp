#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qndc/dynamics.hpp"
#include "qndc/statistics.hpp"

namespace qndc {

struct SamplerOptions {
    /// Shots per independently seeded substream. Results depend on this
    /// value but never on the number of threads.
    std::size_t chunk_size = std::size_t{1} << 14;
    unsigned threads = 0; ///< 0 = hardware concurrency
};

/// Draws n_shots realisations of the linear-Gaussian model
///   x ~ Normal(mean, T0);  x <- M_k x + xi_k,  xi_k ~ Normal(0, N_k)
/// and records the meter channels. with_atoms = false runs the reference
/// arm (kappa = 0, r_L = 1, N = 0) on its own substreams.
/// Throws sampler_unsupported when T0 or N is indefinite.
ShotTable simulate_shots(const ExperimentParams& params, const NoiseModel& noise, const GaussianState& initial,
                         std::int64_t n_shots, std::uint64_t seed, bool with_atoms,
                         const SamplerOptions& options = {});

/// Both arms plus metadata.
ShotRecords simulate_experiment(const ExperimentParams& params, const NoiseModel& noise,
                                const GaussianState& initial, std::int64_t n_shots, std::uint64_t seed,
                                const SamplerOptions& options = {});

/// FNV-1a over a canonical rendering of everything that determines the model.
std::uint64_t parameter_hash(const ExperimentParams& params, const NoiseModel& noise, const GaussianState& initial);

struct MomentComparison {
    std::string name;
    double predicted = 0.0;
    double sampled = 0.0;
    double std_error = 0.0;
    double z = 0.0;
};

/// z = (sampled - predicted) / se(sampled) for every available entry.
std::vector<MomentComparison> compare_moments(const MomentSet& predicted, const MomentSet& sampled,
                                              std::string_view prefix = {});

struct EmpiricalCheck {
    std::vector<MomentComparison> rows;
    double max_abs_z = 0.0;
    bool passed = false;
};

/// Samples both arms and compares them with the analytic prediction.
/// Passes iff every |z| <= z_limit.
EmpiricalCheck empirical_check(const ExperimentParams& params, const NoiseModel& noise,
                               const GaussianState& initial, std::int64_t n_shots, std::uint64_t seed,
                               double z_limit = 5.0, const SamplerOptions& options = {});

} // namespace qndc
