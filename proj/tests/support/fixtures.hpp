#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include <Eigen/Dense>

#include "qndc/dynamics.hpp"
#include "qndc/gaussian_state.hpp"
#include "qndc/layout.hpp"

namespace qndc::test {

// Coherent spin state of 100 atoms, 100-photon coherent pulses, kappa = 1.
struct ParamSet {
    ExperimentParams params;
    NoiseModel noise;
    GaussianState initial;
    double J33 = 25.0;
    double J0 = 25.0;
};

inline GaussianState coherent_initial(int n_pulses)
{
    return make_initial_state(AtomicBlock::coherent_spin_state(100.0), OpticalBlock::coherent_pulses(100.0, n_pulses),
                              Layout(n_pulses), PsdPolicy::strict);
}

inline ParamSet param_set_a(int n_pulses = 3)
{
    return {ExperimentParams::from_kappa(1.0, 50.0, 50.0), NoiseModel::zero(), coherent_initial(n_pulses)};
}

inline ParamSet param_set_b(int n_pulses = 3)
{
    return {ExperimentParams::from_kappa(1.0, 50.0, 50.0, 0.8, 0.9), NoiseModel::zero(), coherent_initial(n_pulses)};
}

inline NoiseModel injected_noise(double n33, double n35, double n55)
{
    return NoiseModel::from_entries({{3, 3, n33}, {3, 5, n35}, {5, 5, n55}});
}

inline bool rel_close(double a, double b, double tol, double scale = 1.0)
{
    return std::abs(a - b) <= tol * std::max({scale, std::abs(a), std::abs(b)});
}

// Hand-written forward model used as an oracle. Indices are zero-based
// offsets: atoms 0..2, pulse k at 3k..3k+2, y component at 3k+1.
namespace oracle {

inline Eigen::MatrixXd interaction(double kappa, double kappa_back, double r_A, double r_L, int pulse, int n_pulses)
{
    const int n = 3 * (n_pulses + 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < 3; ++i) {
        m(i, i) = r_A;
        m(3 * pulse + i, 3 * pulse + i) = r_L;
    }
    m(3 * pulse + 1, 2) = kappa;      // S_y <- J_z
    m(1, 3 * pulse + 2) = kappa_back; // J_y <- S_z
    return m;
}

inline Eigen::MatrixXd embedded_noise(const Eigen::Matrix<double, 6, 6>& block, int pulse, int n_pulses)
{
    const int n = 3 * (n_pulses + 1);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    const int map[6] = {0, 1, 2, 3 * pulse, 3 * pulse + 1, 3 * pulse + 2};
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            out(map[i], map[j]) = block(i, j);
        }
    }
    return out;
}

// Covariance after the first `last` pulses.
inline Eigen::MatrixXd propagate(const Eigen::MatrixXd& t0, const ExperimentParams& p,
                                 const Eigen::Matrix<double, 6, 6>& noise, int last)
{
    const int n_pulses = static_cast<int>(t0.rows()) / 3 - 1;
    Eigen::MatrixXd t = t0;
    for (int k = 1; k <= last; ++k) {
        const auto m = interaction(p.signed_kappa(), p.kappa_back(), p.r_A, p.r_L, k, n_pulses);
        t = m * t * m.transpose() + embedded_noise(noise, k, n_pulses);
    }
    return t;
}

// Schur complement on index `i`.
inline Eigen::MatrixXd condition(const Eigen::MatrixXd& t, int i)
{
    if (t(i, i) == 0.0) {
        return t;
    }
    return t - t.col(i) * t.row(i) / t(i, i);
}

} // namespace oracle

inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("qndc_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace qndc::test
