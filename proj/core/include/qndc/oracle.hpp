#pragma once

#include "qndc/dynamics.hpp"
#include "qndc/gaussian_state.hpp"

namespace qndc {

/// QND quantities computed from their definitions on the propagated
/// covariance of the first pulse, T_P = M T0 M^T + N, and the input-output
/// cross covariance cov(x_P, x_0) = M T0. Independent of the measurable
/// (delta-statistics) route used in certification.
struct DefinitionalQuantities {
    double conditional_variance = 0.0; ///< (T_P conditioned on P_y)_{J_z,J_z}
    double c2_in_meter = 0.0;
    double c2_in_out = 0.0;
    double c2_out_meter = 0.0;
    double dX2_s_given_m = 0.0; ///< conditional / (r_A J0)
    double dX2_m = 0.0;         ///< (var(P_y) - signal) / (kappa^2 J0)
    double dX2_s = 0.0;         ///< ((T_P)_{33} - J33) / (r_A J0)
};

DefinitionalQuantities definitional_quantities(const ExperimentParams& params, const NoiseModel& noise,
                                               const GaussianState& initial, double J0);

} // namespace qndc
