#include "selftest.hpp"

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "qndc/certification.hpp"
#include "qndc/conditioning.hpp"
#include "qndc/estimation.hpp"
#include "qndc/montecarlo.hpp"
#include "qndc/oracle.hpp"
#include "qndc/statistics.hpp"
#include "qndc/sweep.hpp"

namespace qndc::cli {

namespace {

constexpr double rel_tol = 1e-8;

double rel_diff(double a, double b, double scale)
{
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b), scale});
}

// Tracks the worst relative mismatch seen across a suite.
struct Worst {
    double value = 0.0;
    std::string where;

    void update(double a, double b, double scale, const std::string& name, int trial)
    {
        const double d = std::isfinite(a) && std::isfinite(b) ? rel_diff(a, b, scale) : (a == b ? 0.0 : INFINITY);
        if (!(d <= value)) {
            value = d;
            where = name + " (model " + std::to_string(trial) + ")";
        }
    }

    [[nodiscard]] SuiteResult result(std::string name, double tol) const
    {
        std::ostringstream detail;
        detail << "max rel diff " << std::setprecision(3) << value;
        if (!where.empty()) {
            detail << " at " << where;
        }
        return {std::move(name), value <= tol, detail.str()};
    }
};

ExperimentParams hooked(ExperimentParams p, const SelftestHooks& hooks)
{
    if (hooks.flip_coupling_sign) {
        p.meter_sign = p.meter_sign == CouplingSign::positive ? CouplingSign::negative : CouplingSign::positive;
    }
    return p;
}

DeltaStats measured_delta(const RandomModel& m, const ExperimentParams& pipeline, const SelftestHooks& hooks)
{
    const auto with_atoms = predicted_moments(pipeline, m.noise, m.initial);
    const auto no_atoms = no_atoms_moments(pipeline, m.initial);
    const double r_L = hooks.corrupt_delta ? std::sqrt(pipeline.r_L) : pipeline.r_L;
    return delta_stats(with_atoms, no_atoms, r_L);
}

SuiteResult closed_form_suite(const SelftestOptions& opts)
{
    std::mt19937_64 rng(opts.seed);
    Worst worst;
    for (int t = 0; t < opts.sweep_size; ++t) {
        const auto m = random_model(rng);
        const auto pipeline = hooked(m.params, opts.hooks);
        const auto predicted = predicted_moments(pipeline, m.noise, m.initial);
        const auto closed = closed_form_moments(pipeline, m.noise, m.initial);
        const auto p = predicted.packed();
        const auto c = closed.packed();
        const double scale = p.cwiseAbs().maxCoeff();
        static const char* names[] = {"var_p", "var_q", "var_r", "cov_pq", "cov_pr", "cov_qr"};
        for (int i = 0; i < 6; ++i) {
            worst.update(p(i), c(i), scale, names[i], t);
        }

        const auto delta = measured_delta(m, pipeline, opts.hooks);
        const double from_stats = conditional_variance_from_stats(delta, predicted.var_p, pipeline.signed_kappa(), m.J33);
        const auto after = apply_pulse(m.initial, pipeline, m.noise, 1);
        const double direct = condition_on_component(after, Component::P_y).entry(Component::J_z, Component::J_z);
        worst.update(from_stats, direct, m.J33, "conditional variance", t);
    }
    return worst.result("closed-form equivalence", rel_tol);
}

SuiteResult oracle_suite(const SelftestOptions& opts)
{
    std::mt19937_64 rng(opts.seed + 1);
    Worst worst;
    for (int t = 0; t < opts.sweep_size; ++t) {
        const auto m = random_model(rng);
        const auto pipeline = hooked(m.params, opts.hooks);
        const auto oracle = definitional_quantities(pipeline, m.noise, m.initial, m.J0);
        const auto delta = measured_delta(m, pipeline, opts.hooks);
        const double var_p = predicted_moments(pipeline, m.noise, m.initial).var_p;
        const double kappa = pipeline.signed_kappa();
        const auto figures = holland_figures(delta, var_p, kappa, m.J33);
        const auto nc = nonclassicality(delta, var_p, kappa, m.J33, m.J0);
        worst.update(figures.c2_in_meter.value, oracle.c2_in_meter, 1.0, "c2_in_meter", t);
        worst.update(figures.c2_in_out.value, oracle.c2_in_out, 1.0, "c2_in_out", t);
        worst.update(figures.c2_out_meter.value, oracle.c2_out_meter, 1.0, "c2_out_meter", t);
        worst.update(nc.dX2_s_given_m.value, oracle.dX2_s_given_m, 1.0, "dX2_s|m", t);
        worst.update(nc.dX2_m.value, oracle.dX2_m, 1.0, "dX2_m", t);
        worst.update(nc.dX2_s.value, oracle.dX2_s, 1.0, "dX2_s", t);
    }
    return worst.result("definitional oracle", 1e-7);
}

SuiteResult sign_suite(const SelftestOptions& opts)
{
    std::mt19937_64 rng(opts.seed + 2);
    SweepRanges ranges;
    ranges.zero_n35 = true;
    Worst worst;
    auto compare = [&](const CertificationReport& a, const CertificationReport& b, int t) {
        worst.update(a.conditional_variance.value, b.conditional_variance.value, 1.0, "conditional variance", t);
        worst.update(a.figures.c2_in_meter.value, b.figures.c2_in_meter.value, 1.0, "c2_in_meter", t);
        worst.update(a.figures.c2_in_out.value, b.figures.c2_in_out.value, 1.0, "c2_in_out", t);
        worst.update(a.figures.c2_out_meter.value, b.figures.c2_out_meter.value, 1.0, "c2_out_meter", t);
        worst.update(a.nonclassical.dX2_s_given_m.value, b.nonclassical.dX2_s_given_m.value, 1.0, "dX2_s|m", t);
        worst.update(a.nonclassical.dX2_m.value, b.nonclassical.dX2_m.value, 1.0, "dX2_m", t);
        worst.update(a.nonclassical.dX2_s.value, b.nonclassical.dX2_s.value, 1.0, "dX2_s", t);
    };
    auto report = [&](const RandomModel& m, const ExperimentParams& p, const NoiseModel& noise) {
        const auto with_atoms = predicted_moments(p, noise, m.initial);
        const auto delta = delta_stats(with_atoms, no_atoms_moments(p, m.initial), p.r_L);
        return certify(delta, with_atoms.var_p, Calibration{m.params.kappa(), m.J33, m.J0, p.r_L, 3.0});
    };
    for (int t = 0; t < opts.sweep_size; ++t) {
        auto m = random_model(rng, ranges);
        m.params = hooked(m.params, opts.hooks);
        auto flipped = m.params;
        flipped.meter_sign = m.params.meter_sign == CouplingSign::positive ? CouplingSign::negative
                                                                           : CouplingSign::positive;
        compare(report(m, m.params, m.noise), report(m, flipped, m.noise), t);

        // Flipping the sign together with N35 amounts to relabelling J_z -> -J_z.
        const double n35 = 0.5 * std::sqrt(m.noise.n33() * m.noise.n55());
        auto entries = m.noise.matrix();
        entries(2, 4) = entries(4, 2) = n35;
        const NoiseModel plus(entries);
        entries(2, 4) = entries(4, 2) = -n35;
        const NoiseModel minus(entries);
        compare(report(m, m.params, plus), report(m, flipped, minus), t);
    }
    return worst.result("coupling-sign insensitivity", 1e-9);
}

SuiteResult inversion_suite(const SelftestOptions& opts)
{
    std::mt19937_64 rng(opts.seed + 3);
    Worst worst;
    for (int t = 0; t < opts.sweep_size; ++t) {
        const auto m = random_model(rng);
        const auto pipeline = hooked(m.params, opts.hooks);
        const auto delta = measured_delta(m, pipeline, opts.hooks);
        const double var_p = predicted_moments(pipeline, m.noise, m.initial).var_p;
        const auto model = invert_three_pulse(delta, var_p, pipeline.signed_kappa(), m.J33);
        const double noise_scale = m.noise.matrix().cwiseAbs().maxCoeff();
        worst.update(model.r_A, m.params.r_A, 1.0, "r_A", t);
        if (model.r_A_from_var) {
            worst.update(*model.r_A_from_var, m.params.r_A, 1.0, "r_A (variance ratio)", t);
        }
        worst.update(model.noise.n33, m.noise.n33(), noise_scale, "N33", t);
        worst.update(model.noise.n35, m.noise.n35(), noise_scale, "N35", t);
        worst.update(model.noise.n55, m.noise.n55(), noise_scale, "N55", t);
    }
    return worst.result("inversion round trip", 1e-7);
}

SuiteResult monte_carlo_suite(const SelftestOptions& opts)
{
    std::mt19937_64 rng(opts.seed + 4);
    const auto m = random_model(rng);
    const auto check = empirical_check(hooked(m.params, opts.hooks), m.noise, m.initial, opts.shots, opts.seed);
    std::ostringstream detail;
    detail << "max |z| " << std::setprecision(3) << check.max_abs_z << " over " << check.rows.size() << " moments, "
           << opts.shots << " shots";
    return {"monte carlo moments", check.passed, detail.str()};
}

} // namespace

std::vector<SuiteResult> run_selftest(const SelftestOptions& opts)
{
    return {closed_form_suite(opts), oracle_suite(opts), sign_suite(opts), inversion_suite(opts),
            monte_carlo_suite(opts)};
}

int report_selftest(const std::vector<SuiteResult>& results, std::ostream& out)
{
    bool all = true;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        all = all && r.passed;
    }
    out << (all ? "selftest passed" : "selftest FAILED") << "\n";
    return all ? 0 : 1;
}

} // namespace qndc::cli
