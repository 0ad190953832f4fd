#pragma once

#include <random>

#include "qndc/dynamics.hpp"
#include "qndc/gaussian_state.hpp"

namespace qndc {

/// Ranges for randomised three-pulse models.
struct SweepRanges {
    double r_min = 0.5;
    double r_max = 1.0;
    double kappa_min = 0.1;
    double kappa_max = 3.0;
    double variance_min = 1.0;   ///< J33 and every optical variance
    double variance_max = 100.0;
    double noise_max = 10.0;     ///< largest |N_ij|
    bool zero_n35 = false;
};

struct RandomModel {
    ExperimentParams params;
    NoiseModel noise;
    GaussianState initial;
    double J33 = 0.0;
    double J0 = 0.0; ///< |<J_x>|/2
};

/// A valid model: PSD atomic and optical blocks (optical cross-pulse
/// correlations included), PSD noise, transmissions and coupling in range.
RandomModel random_model(std::mt19937_64& rng, const SweepRanges& ranges = {});

} // namespace qndc
