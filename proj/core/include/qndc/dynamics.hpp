#pragma once

#include <initializer_list>

#include <Eigen/Dense>

#include "qndc/gaussian_state.hpp"

namespace qndc {

/// Sign of the meter coupling entry (S_y row, J_z column) of the interaction
/// matrix. Observables depend on it only through kappa^2 and the product
/// kappa * N_{3,5}; the negative branch exists so that this can be checked.
enum class CouplingSign { positive, negative };

struct ExperimentParams {
    double g_tau = 0.0;   ///< per-photon rotation kappa' = g * tau
    double mean_Sx = 0.0; ///< input <S_x> of every pulse
    double mean_Jx = 0.0; ///< input <J_x>
    double r_A = 1.0;     ///< fraction of atoms surviving one pulse
    double r_L = 1.0;     ///< fraction of photons surviving the interaction
    CouplingSign meter_sign = CouplingSign::positive;

    /// Readout gain kappa = g tau <S_x>.
    [[nodiscard]] double kappa() const noexcept { return g_tau * mean_Sx; }
    /// Back-action gain g tau <J_x>, taken from the input spin for every pulse.
    [[nodiscard]] double kappa_back() const noexcept { return g_tau * mean_Jx; }
    /// kappa with meter_sign applied; this is what enters the matrix.
    [[nodiscard]] double signed_kappa() const noexcept
    {
        return meter_sign == CouplingSign::positive ? kappa() : -kappa();
    }

    /// Throws Error(validation_error) for transmissions outside [0,1] or
    /// non-finite values.
    void validate() const;

    /// Chooses g_tau so that kappa() == kappa for the given <S_x>.
    static ExperimentParams from_kappa(double kappa, double mean_Sx, double mean_Jx, double r_A = 1.0,
                                       double r_L = 1.0);
};

/// Additive interaction noise N over (J_x, J_y, J_z, S_x, S_y, S_z) of the
/// atoms and the active pulse. Indices below are 1-based on that support.
class NoiseModel {
public:
    using Block = Eigen::Matrix<double, 6, 6>;

    struct Entry {
        int row;
        int col;
        double value;
    };

    NoiseModel() = default;
    /// Throws non_symmetric, or validation_error for negative variances.
    explicit NoiseModel(const Block& n);

    static NoiseModel zero() { return NoiseModel{}; }
    /// Symmetric fill from 1-based (row, col) entries.
    static NoiseModel from_entries(std::initializer_list<Entry> entries);

    [[nodiscard]] const Block& matrix() const noexcept { return n_; }
    [[nodiscard]] double at(int row, int col) const;
    [[nodiscard]] double n33() const noexcept { return n_(2, 2); }
    [[nodiscard]] double n35() const noexcept { return n_(2, 4); }
    [[nodiscard]] double n55() const noexcept { return n_(4, 4); }
    [[nodiscard]] bool is_zero() const noexcept { return n_.isZero(0.0); }

private:
    Block n_ = Block::Zero();
};

/// Exchanges two pulse blocks (1-based pulse numbers). Involutive.
Matrix exchange_matrix(int block_a, int block_b, const Layout& layout);

/// Identity except: atomic block * r_A, active pulse block * r_L,
/// (J_y, S_z) = kappa_back, (S_y, J_z) = +/-kappa. Equal to X M_1 X for
/// pulse k with X the (1,k) exchange.
Matrix interaction_matrix(const ExperimentParams& params, int pulse, const Layout& layout);

/// N embedded on the (atoms, pulse k) coordinates, zero elsewhere.
Matrix noise_matrix(const NoiseModel& noise, int pulse, const Layout& layout);

/// cov -> M cov M^T + N_k, mean -> M mean.
GaussianState apply_pulse(const GaussianState& state, const ExperimentParams& params,
                          const NoiseModel& noise, int pulse);

/// Applies pulses 1..last in order (last defaults to every pulse in the layout).
GaussianState propagate(const GaussianState& initial, const ExperimentParams& params,
                        const NoiseModel& noise, int last = 0);

} // namespace qndc
