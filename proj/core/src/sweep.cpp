#include "qndc/sweep.hpp"

namespace qndc {

namespace {

// Random correlation matrix with the given variances.
Matrix random_covariance(std::mt19937_64& rng, const Vector& variances)
{
    std::normal_distribution<double> normal;
    const auto n = variances.size();
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a.data()[i] = normal(rng);
    }
    const Matrix s = a * a.transpose();
    const Vector inv_sd = s.diagonal().cwiseSqrt().cwiseInverse();
    const Matrix correlation = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
    const Vector sd = variances.cwiseSqrt();
    return sd.asDiagonal() * correlation * sd.asDiagonal();
}

} // namespace

RandomModel random_model(std::mt19937_64& rng, const SweepRanges& ranges)
{
    std::uniform_real_distribution<double> transmission(ranges.r_min, ranges.r_max);
    std::uniform_real_distribution<double> coupling(ranges.kappa_min, ranges.kappa_max);
    std::uniform_real_distribution<double> variance(ranges.variance_min, ranges.variance_max);
    std::uniform_real_distribution<double> polarisation(10.0, 200.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double kappa = coupling(rng);
    const double mean_Sx = polarisation(rng);
    const double mean_Jx = polarisation(rng);

    AtomicBlock atoms;
    atoms.mean_Jx = mean_Jx;
    Vector atom_var(3);
    atom_var << variance(rng), variance(rng), variance(rng);
    atoms.cov = random_covariance(rng, atom_var);

    OpticalBlock light;
    light.mean_Sx = mean_Sx;
    Vector light_var(9);
    for (Eigen::Index i = 0; i < 9; ++i) {
        light_var(i) = variance(rng);
    }
    light.cov = random_covariance(rng, light_var);

    std::normal_distribution<double> normal;
    Eigen::Matrix<double, 6, 6> b;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        b.data()[i] = normal(rng);
    }
    NoiseModel::Block n = b * b.transpose();
    if (ranges.zero_n35) {
        // Removing one symmetric pair can break PSD; drop the whole J_z-S_y coupling row instead.
        n.row(2).setZero();
        n.col(2).setZero();
        n(2, 2) = unit(rng);
    }
    n *= ranges.noise_max * unit(rng) / n.cwiseAbs().maxCoeff();

    const auto params = ExperimentParams::from_kappa(kappa, mean_Sx, mean_Jx, transmission(rng), transmission(rng));
    auto initial = make_initial_state(atoms, light, Layout(3), PsdPolicy::warn);
    return RandomModel{params, NoiseModel(n), std::move(initial), atoms.cov(2, 2), atoms.projection_noise()};
}

} // namespace qndc
