#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "qndc/layout.hpp"

namespace qndc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Collective atomic spin: mean polarisation along x and the 3x3 covariance J~.
struct AtomicBlock {
    double mean_Jx = 0.0;
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();

    /// Projection noise |<J_x>|/2, the J_z variance of a coherent spin state.
    [[nodiscard]] double projection_noise() const noexcept;

    /// N_A atoms polarised along x: <J_x> = N_A/2, J~ = diag(0, N_A/4, N_A/4).
    static AtomicBlock coherent_spin_state(double n_atoms);
};

/// Stokes vectors of all probe pulses: common mean <S_x> and the joint
/// 3n x 3n covariance C~ (cross-pulse entries model correlated technical noise).
struct OpticalBlock {
    double mean_Sx = 0.0;
    Matrix cov;

    [[nodiscard]] int n_pulses() const noexcept { return static_cast<int>(cov.rows() / 3); }

    /// n_pulses uncorrelated coherent pulses of N_ph photons each:
    /// <S_x> = N_ph/2, per-pulse block diag(0, N_ph/4, N_ph/4).
    static OpticalBlock coherent_pulses(double n_photons, int n_pulses);
};

enum class PsdPolicy { warn, strict };

/// Reads QNDC_STRICT_PSD; "1" selects strict, anything else warn.
PsdPolicy psd_policy_from_env();

struct PsdCheck {
    bool ok = true;
    double min_eigenvalue = 0.0;
    double tolerance = 0.0;
};

/// Smallest eigenvalue must not fall below -1e-9 * max(1, trace).
PsdCheck check_psd(const Matrix& cov);

/// Mean vector and symmetric covariance over the components of a layout.
class GaussianState {
public:
    /// Symmetrises cov. Throws Error(dimension_mismatch) when sizes disagree
    /// with the layout.
    GaussianState(Layout layout, Vector mean, Matrix cov);

    [[nodiscard]] const Layout& layout() const noexcept { return layout_; }
    [[nodiscard]] const Vector& mean() const noexcept { return mean_; }
    [[nodiscard]] const Matrix& cov() const noexcept { return cov_; }

    [[nodiscard]] double entry(Component row, Component col) const;
    [[nodiscard]] double variance(Component c) const { return entry(c, c); }
    [[nodiscard]] double mean_of(Component c) const;

    [[nodiscard]] PsdCheck psd() const { return check_psd(cov_); }

private:
    Layout layout_;
    Vector mean_;
    Matrix cov_;
};

/// T~0 = J~ (+) C~ with zero atom-light blocks; mean has <J_x> and each
/// pulse's <S_x>. Throws dimension_mismatch, non_symmetric, or (strict policy
/// only) not_psd.
GaussianState make_initial_state(const AtomicBlock& atomic, const OpticalBlock& optical,
                                 const Layout& layout, PsdPolicy policy = psd_policy_from_env());

double get_entry(const GaussianState& state, Component row, Component col);
double get_entry(const GaussianState& state, std::string_view row, std::string_view col);

/// Returns (m + m^T)/2; throws Error(non_symmetric) if the asymmetry exceeds
/// 1e-12 * max(1, max|m|).
Matrix require_symmetric(const Matrix& m, std::string_view what);

} // namespace qndc
