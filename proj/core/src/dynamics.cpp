#include "qndc/dynamics.hpp"

#include <cmath>
#include <string>

#include "qndc/error.hpp"

namespace qndc {

void ExperimentParams::validate() const
{
    auto require = [](bool ok, const char* field, const std::string& why) {
        if (!ok) {
            throw Error(ErrorKind::validation_error, std::string(field) + ": " + why);
        }
    };
    require(std::isfinite(g_tau), "g_tau", "must be finite");
    require(std::isfinite(mean_Sx), "mean_Sx", "must be finite");
    require(std::isfinite(mean_Jx), "mean_Jx", "must be finite");
    require(r_A >= 0.0 && r_A <= 1.0, "r_A", "must lie in [0, 1], got " + std::to_string(r_A));
    require(r_L >= 0.0 && r_L <= 1.0, "r_L", "must lie in [0, 1], got " + std::to_string(r_L));
}

ExperimentParams ExperimentParams::from_kappa(double kappa, double mean_Sx, double mean_Jx, double r_A,
                                              double r_L)
{
    if (mean_Sx == 0.0) {
        throw Error(ErrorKind::invalid_argument, "kappa needs a non-zero <S_x>");
    }
    ExperimentParams p;
    p.g_tau = kappa / mean_Sx;
    p.mean_Sx = mean_Sx;
    p.mean_Jx = mean_Jx;
    p.r_A = r_A;
    p.r_L = r_L;
    p.validate();
    return p;
}

NoiseModel::NoiseModel(const Block& n) : n_(require_symmetric(n, "noise matrix"))
{
    if (n_.diagonal().minCoeff() < 0.0) {
        throw Error(ErrorKind::validation_error, "noise matrix has a negative variance");
    }
}

NoiseModel NoiseModel::from_entries(std::initializer_list<Entry> entries)
{
    Block n = Block::Zero();
    for (const auto& e : entries) {
        if (e.row < 1 || e.row > 6 || e.col < 1 || e.col > 6) {
            throw Error(ErrorKind::invalid_argument, "noise entry outside 1..6");
        }
        n(e.row - 1, e.col - 1) = e.value;
        n(e.col - 1, e.row - 1) = e.value;
    }
    return NoiseModel(n);
}

double NoiseModel::at(int row, int col) const
{
    if (row < 1 || row > 6 || col < 1 || col > 6) {
        throw Error(ErrorKind::invalid_argument, "noise entry outside 1..6");
    }
    return n_(row - 1, col - 1);
}

Matrix exchange_matrix(int block_a, int block_b, const Layout& layout)
{
    layout.require_pulse(block_a);
    layout.require_pulse(block_b);
    if (block_a == block_b) {
        throw Error(ErrorKind::invalid_pulse, "exchange needs two distinct pulses");
    }
    const int n = layout.dimension();
    Matrix x = Matrix::Identity(n, n);
    const int a = 3 * block_a;
    const int b = 3 * block_b;
    x.block(a, a, 3, 3).setZero();
    x.block(b, b, 3, 3).setZero();
    x.block(a, b, 3, 3).setIdentity();
    x.block(b, a, 3, 3).setIdentity();
    return x;
}

Matrix interaction_matrix(const ExperimentParams& params, int pulse, const Layout& layout)
{
    layout.require_pulse(pulse);
    const int n = layout.dimension();
    const int s = 3 * pulse;
    Matrix m = Matrix::Identity(n, n);
    m.block(0, 0, 3, 3) *= params.r_A;
    m.block(s, s, 3, 3) *= params.r_L;
    m(zero_based(Component::J_y), s + static_cast<int>(Axis::z)) = params.kappa_back();
    m(s + static_cast<int>(Axis::y), zero_based(Component::J_z)) = params.signed_kappa();
    return m;
}

Matrix noise_matrix(const NoiseModel& noise, int pulse, const Layout& layout)
{
    layout.require_pulse(pulse);
    const int n = layout.dimension();
    const int s = 3 * pulse;
    const auto& block = noise.matrix();
    Matrix out = Matrix::Zero(n, n);
    out.block(0, 0, 3, 3) = block.block<3, 3>(0, 0);
    out.block(0, s, 3, 3) = block.block<3, 3>(0, 3);
    out.block(s, 0, 3, 3) = block.block<3, 3>(3, 0);
    out.block(s, s, 3, 3) = block.block<3, 3>(3, 3);
    return out;
}

GaussianState apply_pulse(const GaussianState& state, const ExperimentParams& params,
                          const NoiseModel& noise, int pulse)
{
    const auto& layout = state.layout();
    const Matrix m = interaction_matrix(params, pulse, layout);
    Matrix cov = m * state.cov() * m.transpose() + noise_matrix(noise, pulse, layout);
    Vector mean = m * state.mean();
    return GaussianState(layout, std::move(mean), std::move(cov));
}

GaussianState propagate(const GaussianState& initial, const ExperimentParams& params,
                        const NoiseModel& noise, int last)
{
    const int through = last == 0 ? initial.layout().n_pulses() : last;
    initial.layout().require_pulse(through);
    GaussianState state = initial;
    for (int k = 1; k <= through; ++k) {
        state = apply_pulse(state, params, noise, k);
    }
    return state;
}

} // namespace qndc
