#include "qndc/gaussian_state.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "qndc/error.hpp"

namespace qndc {

double AtomicBlock::projection_noise() const noexcept
{
    return std::abs(mean_Jx) / 2.0;
}

AtomicBlock AtomicBlock::coherent_spin_state(double n_atoms)
{
    if (!(n_atoms >= 0.0)) {
        throw Error(ErrorKind::invalid_argument, "atom number must be non-negative");
    }
    AtomicBlock block;
    block.mean_Jx = n_atoms / 2.0;
    block.cov.diagonal() << 0.0, n_atoms / 4.0, n_atoms / 4.0;
    return block;
}

OpticalBlock OpticalBlock::coherent_pulses(double n_photons, int n_pulses)
{
    if (!(n_photons >= 0.0)) {
        throw Error(ErrorKind::invalid_argument, "photon number must be non-negative");
    }
    Layout{n_pulses}; // validates the pulse count
    OpticalBlock block;
    block.mean_Sx = n_photons / 2.0;
    block.cov = Matrix::Zero(3 * n_pulses, 3 * n_pulses);
    for (int k = 0; k < n_pulses; ++k) {
        block.cov(3 * k + 1, 3 * k + 1) = n_photons / 4.0;
        block.cov(3 * k + 2, 3 * k + 2) = n_photons / 4.0;
    }
    return block;
}

PsdPolicy psd_policy_from_env()
{
    const char* value = std::getenv("QNDC_STRICT_PSD");
    return (value != nullptr && std::string_view(value) == "1") ? PsdPolicy::strict : PsdPolicy::warn;
}

PsdCheck check_psd(const Matrix& cov)
{
    PsdCheck result;
    if (cov.size() == 0) {
        return result;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov, Eigen::EigenvaluesOnly);
    result.min_eigenvalue = solver.eigenvalues().minCoeff();
    result.tolerance = 1e-9 * std::max(1.0, std::abs(cov.trace()));
    result.ok = result.min_eigenvalue >= -result.tolerance;
    return result;
}

Matrix require_symmetric(const Matrix& m, std::string_view what)
{
    if (m.rows() != m.cols()) {
        throw Error(ErrorKind::dimension_mismatch, std::string(what) + " must be square");
    }
    if (m.size() == 0) {
        return m;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw Error(ErrorKind::non_symmetric, std::string(what) + " is not symmetric");
    }
    return 0.5 * (m + m.transpose());
}

GaussianState::GaussianState(Layout layout, Vector mean, Matrix cov)
    : layout_(layout), mean_(std::move(mean)), cov_(std::move(cov))
{
    const auto n = layout_.dimension();
    if (mean_.size() != n || cov_.rows() != n || cov_.cols() != n) {
        throw Error(ErrorKind::dimension_mismatch,
                    "state of dimension " + std::to_string(n) + " built from mean of size "
                        + std::to_string(mean_.size()) + " and covariance "
                        + std::to_string(cov_.rows()) + "x" + std::to_string(cov_.cols()));
    }
    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
}

double GaussianState::entry(Component row, Component col) const
{
    return cov_(layout_.offset(row), layout_.offset(col));
}

double GaussianState::mean_of(Component c) const
{
    return mean_(layout_.offset(c));
}

GaussianState make_initial_state(const AtomicBlock& atomic, const OpticalBlock& optical,
                                 const Layout& layout, PsdPolicy policy)
{
    const int n = layout.dimension();
    if (optical.cov.rows() != 3 * layout.n_pulses() || optical.cov.cols() != 3 * layout.n_pulses()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "optical covariance must be " + std::to_string(3 * layout.n_pulses()) + "x"
                        + std::to_string(3 * layout.n_pulses()) + " for "
                        + std::to_string(layout.n_pulses()) + " pulses");
    }
    const Matrix atomic_cov = require_symmetric(atomic.cov, "atomic covariance");
    const Matrix optical_cov = require_symmetric(optical.cov, "optical covariance");
    if (atomic_cov.diagonal().minCoeff() < 0.0 || optical_cov.diagonal().minCoeff() < 0.0) {
        throw Error(ErrorKind::invalid_argument, "block covariances need non-negative variances");
    }

    Vector mean = Vector::Zero(n);
    mean(zero_based(Component::J_x)) = atomic.mean_Jx;
    for (int k = 1; k <= layout.n_pulses(); ++k) {
        mean(zero_based(component_at(k, Axis::x))) = optical.mean_Sx;
    }

    Matrix cov = Matrix::Zero(n, n);
    cov.topLeftCorner(3, 3) = atomic_cov;
    cov.bottomRightCorner(n - 3, n - 3) = optical_cov;

    if (policy == PsdPolicy::strict) {
        const auto psd = check_psd(cov);
        if (!psd.ok) {
            throw Error(ErrorKind::not_psd, "initial covariance has eigenvalue "
                                                + std::to_string(psd.min_eigenvalue));
        }
    }
    return GaussianState(layout, std::move(mean), std::move(cov));
}

double get_entry(const GaussianState& state, Component row, Component col)
{
    return state.entry(row, col);
}

double get_entry(const GaussianState& state, std::string_view row, std::string_view col)
{
    return state.entry(parse_component(row), parse_component(col));
}

} // namespace qndc
