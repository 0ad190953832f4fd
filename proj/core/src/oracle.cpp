#include "qndc/oracle.hpp"

#include "qndc/conditioning.hpp"

namespace qndc {

DefinitionalQuantities definitional_quantities(const ExperimentParams& params, const NoiseModel& noise,
                                               const GaussianState& initial, double J0)
{
    const auto& layout = initial.layout();
    const int jz = layout.offset(Component::J_z);
    const int py = layout.offset(Component::P_y);

    const GaussianState after = apply_pulse(initial, params, noise, 1);
    const Matrix cross = interaction_matrix(params, 1, layout) * initial.cov();

    const double jz_in = initial.cov()(jz, jz);
    const double jz_out = after.cov()(jz, jz);
    const double py_out = after.cov()(py, py);
    const double k2 = params.kappa() * params.kappa();
    const double signal = cross(py, jz) * cross(py, jz) / jz_in;

    DefinitionalQuantities q;
    q.conditional_variance = condition_on_component(after, Component::P_y).variance(Component::J_z);
    q.c2_in_meter = cross(py, jz) * cross(py, jz) / (jz_in * py_out);
    q.c2_in_out = cross(jz, jz) * cross(jz, jz) / (jz_in * jz_out);
    q.c2_out_meter = after.cov()(jz, py) * after.cov()(jz, py) / (jz_out * py_out);
    q.dX2_s_given_m = q.conditional_variance / (params.r_A * J0);
    q.dX2_m = (py_out - signal) / (k2 * J0);
    q.dX2_s = (jz_out - jz_in) / (params.r_A * J0);
    return q;
}

} // namespace qndc
