#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qndc/dynamics.hpp"
#include "qndc/gaussian_state.hpp"

namespace qndc {

inline constexpr double not_available = std::numeric_limits<double>::quiet_NaN();

/// Per-entry standard errors of a sampled MomentSet.
struct MomentErrors {
    double var_p = not_available;
    double var_q = not_available;
    double var_r = not_available;
    double cov_pq = not_available;
    double cov_pr = not_available;
    double cov_qr = not_available;
};

/// Second moments of the meter channels P_y, Q_y, R_y. Entries involving a
/// pulse beyond n_pulses are NaN.
struct MomentSet {
    using Packed = Eigen::Matrix<double, 6, 1>;

    int n_pulses = 0;
    double var_p = not_available;
    double var_q = not_available;
    double var_r = not_available;
    double cov_pq = not_available;
    double cov_pr = not_available;
    double cov_qr = not_available;
    double mean_p = not_available;
    double mean_q = not_available;
    double mean_r = not_available;
    std::optional<std::int64_t> n_shots; ///< absent for analytic predictions
    std::optional<MomentErrors> se;

    /// (var_p, var_q, var_r, cov_pq, cov_pr, cov_qr)
    [[nodiscard]] Packed packed() const;
    void unpack(const Packed& values);

    /// Covariance between meters of pulses a and b (1-based).
    [[nodiscard]] double covariance(int a, int b) const;
};

/// With-atoms moments minus r_L^2-scaled no-atoms references.
struct DeltaStats {
    int n_pulses = 0;
    double d_var_p = not_available;
    double d_var_q = not_available;
    double d_var_r = not_available;
    double d_cov_pq = not_available;
    double d_cov_pr = not_available;
};

/// Row-major meter outcomes, one column per pulse.
class ShotTable {
public:
    ShotTable() = default;
    explicit ShotTable(int n_pulses) : n_pulses_(n_pulses) {}
    ShotTable(int n_pulses, std::vector<double> values);

    [[nodiscard]] int n_pulses() const noexcept { return n_pulses_; }
    [[nodiscard]] std::size_t rows() const noexcept
    {
        return n_pulses_ == 0 ? 0 : values_.size() / static_cast<std::size_t>(n_pulses_);
    }
    [[nodiscard]] double at(std::size_t row, int pulse) const
    {
        return values_[row * static_cast<std::size_t>(n_pulses_) + static_cast<std::size_t>(pulse - 1)];
    }
    [[nodiscard]] std::span<const double> row(std::size_t i) const
    {
        return {values_.data() + i * static_cast<std::size_t>(n_pulses_), static_cast<std::size_t>(n_pulses_)};
    }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    void push_row(std::span<const double> row);
    void append(const ShotTable& other);

    friend bool operator==(const ShotTable&, const ShotTable&) = default;

private:
    int n_pulses_ = 0;
    std::vector<double> values_;
};

struct RecordMetadata {
    std::uint64_t seed = 0;
    std::int64_t n_shots = 0;
    int n_pulses = 0;
    std::uint64_t params_hash = 0;

    friend bool operator==(const RecordMetadata&, const RecordMetadata&) = default;
};

struct ShotRecords {
    ShotTable with_atoms;
    ShotTable no_atoms;
    RecordMetadata metadata;
};

/// Streaming mean / co-moment accumulator over up to three columns,
/// mergeable across chunks.
class MomentAccumulator {
public:
    explicit MomentAccumulator(int columns = 3);

    void add(std::span<const double> row);
    void merge(const MomentAccumulator& other);

    [[nodiscard]] std::int64_t count() const noexcept { return n_; }
    [[nodiscard]] double mean(int column) const { return mean_(column); }
    /// Unbiased (n-1) covariance.
    [[nodiscard]] double covariance(int a, int b) const;
    /// MomentSet with standard errors; needs at least two rows.
    [[nodiscard]] MomentSet moments() const;

private:
    int columns_;
    std::int64_t n_ = 0;
    Eigen::Vector3d mean_ = Eigen::Vector3d::Zero();
    Eigen::Matrix3d comoment_ = Eigen::Matrix3d::Zero();
};

/// Moments read off the propagated covariance after every pulse in the layout.
MomentSet predicted_moments(const ExperimentParams& params, const NoiseModel& noise,
                            const GaussianState& initial);

/// The same moments from the algebraic closed forms (two-pulse expressions
/// and their three-pulse extension).
MomentSet closed_form_moments(const ExperimentParams& params, const NoiseModel& noise,
                              const GaussianState& initial);

/// Atoms removed: kappa = 0, r_L = 1, N = 0, i.e. the raw optical noise C~.
MomentSet no_atoms_moments(const ExperimentParams& params, const GaussianState& initial);

/// delta = measured - reference * r_L^2. Throws dimension_mismatch when pulse
/// counts differ.
DeltaStats delta_stats(const MomentSet& measured, const MomentSet& reference, double r_L);

/// Unbiased sample moments of one arm. Throws too_few_shots below 2 rows.
MomentSet sample_moments(const ShotTable& table);
/// (with_atoms, no_atoms)
std::pair<MomentSet, MomentSet> sample_moments(const ShotRecords& records);

/// Sampling covariance of the packed moment estimators for Gaussian data,
/// cov(s_ab, s_cd) = (s_ac s_bd + s_ad s_bc)/(n-1). Zero for analytic sets
/// and for entries beyond n_pulses.
Eigen::Matrix<double, 6, 6> moment_estimator_covariance(const MomentSet& moments);

/// E[var(J_z)|P_y] from measurable quantities:
/// J33 + kappa^-2 (dvar_q - dvar_p - dcov_pq^2 / var_p).
/// Throws undefined_input for var_p <= 0 or kappa == 0.
double conditional_variance_from_stats(const DeltaStats& delta, double var_p, double kappa, double J33);

struct SqueezingCheck {
    bool reduces_variance = false;
    double margin = 0.0; ///< dcov_pq^2 - var_p (dvar_q - dvar_p)
};

/// Conditioning on P_y lowers var(J_z) iff the margin is positive.
SqueezingCheck squeezing_condition(const DeltaStats& delta, double var_p);

} // namespace qndc
