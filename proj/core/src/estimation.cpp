#include "qndc/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "qndc/error.hpp"

namespace qndc {

namespace {

void require_three_pulses(const DeltaStats& delta)
{
    if (delta.n_pulses < 3) {
        throw Error(ErrorKind::dimension_mismatch, "estimator needs three-pulse statistics");
    }
}

// Relative floor below which a difference of moments counts as exactly zero.
double zero_floor(const DeltaStats& delta)
{
    const double scale = std::max({std::abs(delta.d_var_p), std::abs(delta.d_var_q), std::abs(delta.d_var_r),
                                   std::abs(delta.d_cov_pq), std::abs(delta.d_cov_pr)});
    return 1e-12 * scale;
}

} // namespace

double estimate_rA_from_cov(const DeltaStats& delta)
{
    require_three_pulses(delta);
    if (std::abs(delta.d_cov_pq) <= zero_floor(delta)) {
        throw Error(ErrorKind::uninformative_coupling, "dcov(P_y,Q_y) vanishes; r_A is undefined");
    }
    return delta.d_cov_pr / delta.d_cov_pq;
}

double estimate_rA_from_var(const DeltaStats& delta)
{
    require_three_pulses(delta);
    const double denominator = delta.d_var_q - delta.d_var_p;
    const double numerator = delta.d_var_r - delta.d_var_q;
    if (std::abs(denominator) <= zero_floor(delta)) {
        throw Error(ErrorKind::degenerate_estimator,
                    "dvar(Q_y) = dvar(P_y); the variance ratio is 0/0, use the covariance estimator");
    }
    const double ratio = numerator / denominator;
    if (ratio < 0.0) {
        throw Error(ErrorKind::inconsistent_data, "variance ratio for r_A^2 is negative: " + std::to_string(ratio));
    }
    return std::sqrt(ratio);
}

NoiseEstimate estimate_noise(const DeltaStats& delta, double kappa, double J33, double rA)
{
    if (kappa == 0.0) {
        throw Error(ErrorKind::undefined_input, "kappa must be non-zero");
    }
    if (delta.n_pulses < 2) {
        throw Error(ErrorKind::dimension_mismatch, "noise estimation needs at least two pulses");
    }
    const double k2 = kappa * kappa;
    NoiseEstimate n;
    n.n33 = (delta.d_var_q - delta.d_var_p + k2 * J33 * (1.0 - rA * rA)) / k2;
    n.n35 = (delta.d_cov_pq - k2 * J33 * rA) / kappa;
    n.n55 = delta.d_var_p - k2 * J33;
    return n;
}

double estimate_kappa_from_means(double mean_Py, double known_Jz)
{
    if (known_Jz == 0.0) {
        throw Error(ErrorKind::undefined_input, "kappa calibration needs a state with <J_z> != 0");
    }
    return mean_Py / known_Jz;
}

EstimatedModel invert_three_pulse(const DeltaStats& delta, double var_p, double kappa, double J33)
{
    EstimatedModel model;
    model.r_A = estimate_rA_from_cov(delta);
    try {
        model.r_A_from_var = estimate_rA_from_var(delta);
        model.r_A_discrepancy = std::abs(model.r_A - *model.r_A_from_var);
        model.r_A_from_var_status = "ok";
    } catch (const Error& e) {
        model.r_A_from_var_status = e.what();
    }
    model.noise = estimate_noise(delta, kappa, J33, model.r_A);
    if (model.noise.has_negative_variance()) {
        model.warnings.emplace_back("estimated noise variance is negative (N33 = " + std::to_string(model.noise.n33)
                                    + ", N55 = " + std::to_string(model.noise.n55) + ")");
    }
    if (model.r_A < 0.0 || model.r_A > 1.0) {
        model.warnings.emplace_back("estimated r_A = " + std::to_string(model.r_A) + " lies outside [0, 1]");
    }
    model.conditional_variance = conditional_variance_from_stats(delta, var_p, kappa, J33);
    return model;
}

} // namespace qndc
