#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qndc/statistics.hpp"

namespace qndc {

/// r_A = dcov(P_y,R_y) / dcov(P_y,Q_y). Throws uninformative_coupling when the
/// denominator vanishes, dimension_mismatch without a third pulse.
double estimate_rA_from_cov(const DeltaStats& delta);

/// r_A = sqrt[(dvar_r - dvar_q) / (dvar_q - dvar_p)]. Throws
/// degenerate_estimator when the denominator vanishes (lossless, noiseless
/// atoms) and inconsistent_data for a negative ratio.
double estimate_rA_from_var(const DeltaStats& delta);

/// Interaction-noise entries recovered from three-pulse data. Negative
/// variances can come out of sampled data; they are flagged, never clipped.
struct NoiseEstimate {
    double n33 = 0.0;
    double n35 = 0.0;
    double n55 = 0.0;

    [[nodiscard]] bool has_negative_variance() const noexcept { return n33 < 0.0 || n55 < 0.0; }
};

/// kappa^2 N33 = dvar_q - dvar_p + kappa^2 J33 (1 - rA^2)
/// kappa   N35 = dcov_pq - kappa^2 J33 rA
///         N55 = dvar_p - kappa^2 J33
NoiseEstimate estimate_noise(const DeltaStats& delta, double kappa, double J33, double rA);

/// kappa = <P_y> / <J_z> for a state with known, non-zero <J_z> and <P_y^in> = 0.
double estimate_kappa_from_means(double mean_Py, double known_Jz);

struct EstimatedModel {
    double r_A = 0.0; ///< covariance-ratio estimate
    std::optional<double> r_A_from_var;
    std::optional<double> r_A_discrepancy; ///< |r_A - r_A_from_var|
    std::string r_A_from_var_status;       ///< why the variance estimator is absent
    NoiseEstimate noise;
    double conditional_variance = 0.0;
    std::vector<std::string> warnings;
};

/// Full three-pulse inversion: r_A (covariance ratio, with the variance ratio
/// as a consistency check), noise entries and E[var(J_z)|P_y].
EstimatedModel invert_three_pulse(const DeltaStats& delta, double var_p, double kappa, double J33);

} // namespace qndc
