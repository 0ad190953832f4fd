#include "qndc/conditioning.hpp"

#include <cmath>

#include "qndc/error.hpp"

namespace qndc {

namespace {

// Shared rank-1 update. Returns the gain column cov*m/var (empty when the
// meter is deterministic).
Vector reduce(Matrix& cov, int index)
{
    const double var = cov(index, index);
    if (!(var > 0.0)) {
        return {};
    }
    const Vector column = cov.col(index);
    Vector gain = column / var;
    cov.noalias() -= gain * column.transpose();
    // The measured row and column vanish exactly in exact arithmetic.
    cov.row(index).setZero();
    cov.col(index).setZero();
    return gain;
}

} // namespace

GaussianState condition_on_component(const GaussianState& state, Component measured)
{
    const int index = state.layout().offset(measured);
    Matrix cov = state.cov();
    reduce(cov, index);
    return GaussianState(state.layout(), state.mean(), std::move(cov));
}

GaussianState condition_on_outcome(const GaussianState& state, Component measured, double outcome)
{
    const int index = state.layout().offset(measured);
    Matrix cov = state.cov();
    Vector mean = state.mean();
    const Vector gain = reduce(cov, index);
    if (gain.size() > 0) {
        mean += gain * (outcome - state.mean()(index));
    }
    return GaussianState(state.layout(), std::move(mean), std::move(cov));
}

double conditional_variance_ideal(double J33, double C22, double kappa)
{
    if (J33 < 0.0 || C22 < 0.0) {
        throw Error(ErrorKind::undefined_input, "variances must be non-negative");
    }
    const double denominator = kappa * kappa * J33 + C22;
    if (denominator == 0.0) {
        throw Error(ErrorKind::undefined_input, "meter variance kappa^2 J33 + C22 is zero");
    }
    return J33 * C22 / denominator;
}

double conditional_variance_general(const ExperimentParams& params, const NoiseModel& noise, double J33,
                                    double C22)
{
    const double kappa = params.kappa();
    const double rA = params.r_A;
    const double rL = params.r_L;
    const double denominator = kappa * kappa * J33 + rL * rL * C22 + noise.n55();
    if (!(denominator > 0.0)) {
        throw Error(ErrorKind::undefined_input, "meter variance after the pulse is not positive");
    }
    // Uses signed kappa so that kappa * N35 follows the coupling convention.
    const double correlation = params.signed_kappa() * rA * J33 + noise.n35();
    return J33 * rA * rA + noise.n33() - correlation * correlation / denominator;
}

} // namespace qndc
