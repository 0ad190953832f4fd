#pragma once

#include "qndc/dynamics.hpp"
#include "qndc/gaussian_state.hpp"

namespace qndc {

/// Outcome-averaged Gaussian update after reading one component:
/// cov -> cov - cov m m^T cov / (m^T cov m). A zero-variance meter carries no
/// information and leaves the state unchanged (the pseudo-inverse of 0 is 0).
/// The mean is left untouched.
GaussianState condition_on_component(const GaussianState& state, Component measured);

/// Same covariance update plus the Kalman mean shift for a specific outcome.
GaussianState condition_on_outcome(const GaussianState& state, Component measured, double outcome);

/// E[var(J_z)|P_y] for a noiseless, lossless pulse:
/// J33 C22 / (kappa^2 J33 + C22) = J33 / (1 + SNR).
/// Throws Error(undefined_input) when the denominator vanishes.
double conditional_variance_ideal(double J33, double C22, double kappa);

/// E[var(J_z)|P_y] with loss and interaction noise:
/// J33 rA^2 + N33 - (kappa rA J33 + N35)^2 / (kappa^2 J33 + rL^2 C22 + N55).
double conditional_variance_general(const ExperimentParams& params, const NoiseModel& noise, double J33,
                                    double C22);

} // namespace qndc
