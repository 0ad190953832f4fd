#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <functional>
#include <random>

#include "fixtures.hpp"
#include "qndc/certification.hpp"
#include "qndc/conditioning.hpp"
#include "qndc/error.hpp"
#include "qndc/estimation.hpp"
#include "qndc/io.hpp"
#include "qndc/oracle.hpp"
#include "qndc/statistics.hpp"
#include "qndc/sweep.hpp"

namespace qndc {
namespace {

using test::rel_close;

// Runs `body` on `cases` generated inputs and reports the first failing case.
void for_all(int cases, std::uint64_t seed, const std::function<void(std::mt19937_64&, int)>& body)
{
    std::mt19937_64 rng(seed);
    for (int i = 0; i < cases && !::testing::Test::HasFailure(); ++i) {
        SCOPED_TRACE("case " + std::to_string(i) + " seed " + std::to_string(seed));
        body(rng, i);
    }
}

struct Analytic {
    MomentSet with;
    DeltaStats delta;
};

Analytic analytic(const RandomModel& m)
{
    const auto with = predicted_moments(m.params, m.noise, m.initial);
    return {with, delta_stats(with, no_atoms_moments(m.params, m.initial), m.params.r_L)};
}

double asymmetry(const Matrix& m)
{
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

TEST(Property, StatesStaySymmetricAndPsd)
{
    for_all(300, 1, [](std::mt19937_64& rng, int) {
        const auto m = random_model(rng);
        std::bernoulli_distribution pulse_next(0.5);
        std::uniform_int_distribution<int> label(1, 12);
        GaussianState s = m.initial;
        int next_pulse = 1;
        for (int step = 0; step < 6; ++step) {
            if (next_pulse <= 3 && pulse_next(rng)) {
                s = apply_pulse(s, m.params, m.noise, next_pulse++);
            } else {
                s = condition_on_component(s, static_cast<Component>(label(rng)));
            }
            ASSERT_LE(asymmetry(s.cov()), 1e-12);
            ASSERT_TRUE(s.psd().ok) << "min eigenvalue " << s.psd().min_eigenvalue;
        }
    });
}

TEST(Property, AtomicVarianceLaw)
{
    for_all(300, 2, [](std::mt19937_64& rng, int) {
        const auto m = random_model(rng);
        GaussianState s = m.initial;
        for (int k = 1; k <= 3; ++k) {
            const double before = s.variance(Component::J_z);
            s = apply_pulse(s, m.params, m.noise, k);
            EXPECT_TRUE(rel_close(s.variance(Component::J_z), m.params.r_A * m.params.r_A * before + m.noise.n33(), 1e-13));
        }
    });
}

TEST(Property, PipelineMatchesHandBuiltOracle)
{
    for_all(300, 3, [](std::mt19937_64& rng, int) {
        const auto m = random_model(rng);
        const auto s = propagate(m.initial, m.params, m.noise);
        const auto ref = test::oracle::propagate(m.initial.cov(), m.params, m.noise.matrix(), 3);
        const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
        EXPECT_LE((s.cov() - ref).cwiseAbs().maxCoeff(), 1e-12 * scale);
    });
}

TEST(Property, ClosedFormMomentsMatchPipeline)
{
    for_all(1000, 4, [](std::mt19937_64& rng, int) {
        const auto m = random_model(rng);
        const auto p = predicted_moments(m.params, m.noise, m.initial).packed();
        const auto c = closed_form_moments(m.params, m.noise, m.initial).packed();
        const double scale = p.cwiseAbs().maxCoeff();
        for (int i = 0; i < 6; ++i) {
            EXPECT_TRUE(rel_close(p(i), c(i), 1e-12, scale)) << i << ": " << p(i) << " vs " << c(i);
        }
    });
}

TEST(Property, ConditioningNeverIncreasesVariances)
{
    for_all(300, 5, [](std::mt19937_64& rng, int) {
        const auto m = random_model(rng);
        const auto s = propagate(m.initial, m.params, m.noise);
        std::uniform_int_distribution<int> pick(1, 12);
        const auto label = static_cast<Component>(pick(rng));
        const auto c = condition_on_component(s, label);
        for (int i = 0; i < 12; ++i) {
            EXPECT_LE(c.cov()(i, i), s.cov()(i, i) + 1e-12 * std::max(1.0, s.cov()(i, i)));
        }
        EXPECT_EQ(condition_on_component(c, label).cov(), c.cov());
    });
}

TEST(Property, GeneralConditionalVarianceMatchesPipeline)
{
    for_all(1000, 6, [](std::mt19937_64& rng, int) {
        const auto m = random_model(rng);
        const double c22 = m.initial.variance(Component::P_y);
        const auto after = apply_pulse(m.initial, m.params, m.noise, 1);
        const double pipeline = condition_on_component(after, Component::P_y).variance(Component::J_z);
        EXPECT_TRUE(rel_close(conditional_variance_general(m.params, m.noise, m.J33, c22), pipeline, 1e-9, m.J33));
        const auto a = analytic(m);
        EXPECT_TRUE(rel_close(conditional_variance_from_stats(a.delta, a.with.var_p, m.params.kappa(), m.J33), pipeline,
                              1e-9, m.J33));
    });
}

TEST(Property, NoiseRatioFormOfConditionalVariance)
{
    for_all(300, 7, [](std::mt19937_64& rng, int) {
        std::uniform_real_distribution<double> var(1.0, 100.0);
        std::uniform_real_distribution<double> k(0.1, 3.0);
        AtomicBlock atoms;
        atoms.mean_Jx = 50.0;
        atoms.cov.diagonal() << 0.0, var(rng), var(rng);
        OpticalBlock light;
        light.mean_Sx = 50.0;
        light.cov = Matrix::Zero(6, 6);
        light.cov.diagonal() << 0.0, var(rng), var(rng), 0.0, var(rng), var(rng);
        const auto s = make_initial_state(atoms, light, Layout(2));
        const double kappa = k(rng);
        const auto params = ExperimentParams::from_kappa(kappa, 50.0, 50.0);
        const auto with = predicted_moments(params, NoiseModel::zero(), s);
        const auto without = no_atoms_moments(params, s);
        const auto d = delta_stats(with, without, 1.0);
        const double j33 = atoms.cov(2, 2);
        EXPECT_TRUE(rel_close(j33 * without.var_p / with.var_p, conditional_variance_from_stats(d, with.var_p, kappa, j33),
                              1e-12));
    });
}

TEST(Property, SqueezingConditionMatchesVarianceReduction)
{
    for_all(1000, 8, [](std::mt19937_64& rng, int) {
        const auto m = random_model(rng);
        const auto a = analytic(m);
        const auto check = squeezing_condition(a.delta, a.with.var_p);
        const double e = conditional_variance_from_stats(a.delta, a.with.var_p, m.params.kappa(), m.J33);
        // Skip cases sitting on the boundary within rounding.
        if (std::abs(e - m.J33) > 1e-9 * m.J33) {
            EXPECT_EQ(check.reduces_variance, e < m.J33) << "margin " << check.margin;
        }
    });
}

TEST(Property, InversionRoundTrip)
{
    for_all(1000, 9, [](std::mt19937_64& rng, int) {
        const auto m = random_model(rng);
        const auto a = analytic(m);
        const auto model = invert_three_pulse(a.delta, a.with.var_p, m.params.kappa(), m.J33);
        const double scale = m.noise.matrix().cwiseAbs().maxCoeff();
        EXPECT_TRUE(rel_close(model.r_A, m.params.r_A, 1e-9));
        if (model.r_A_from_var) {
            EXPECT_TRUE(rel_close(*model.r_A_from_var, m.params.r_A, 1e-9));
            EXPECT_LE(*model.r_A_discrepancy, 1e-9);
        }
        EXPECT_TRUE(rel_close(model.noise.n33, m.noise.n33(), 1e-9, scale));
        EXPECT_TRUE(rel_close(model.noise.n35, m.noise.n35(), 1e-9, scale));
        EXPECT_TRUE(rel_close(model.noise.n55, m.noise.n55(), 1e-9, scale));
    });
}

TEST(Property, FiguresMatchDefinitionalCorrelations)
{
    for_all(1000, 10, [](std::mt19937_64& rng, int) {
        const auto m = random_model(rng);
        const auto a = analytic(m);
        const auto def = definitional_quantities(m.params, m.noise, m.initial, m.J0);
        const auto f = holland_figures(a.delta, a.with.var_p, m.params.kappa(), m.J33);
        EXPECT_TRUE(rel_close(f.c2_in_meter.value, def.c2_in_meter, 1e-9));
        EXPECT_TRUE(rel_close(f.c2_in_out.value, def.c2_in_out, 1e-9));
        EXPECT_TRUE(rel_close(f.c2_out_meter.value, def.c2_out_meter, 1e-9));
        for (double c2 : {f.c2_in_meter.value, f.c2_in_out.value, f.c2_out_meter.value}) {
            EXPECT_GE(c2, -1e-12);
            EXPECT_LE(c2, 1.0 + 1e-9);
        }
        const auto nc = nonclassicality(a.delta, a.with.var_p, m.params.kappa(), m.J33, m.J0);
        EXPECT_TRUE(rel_close(nc.dX2_s_given_m.value, def.dX2_s_given_m, 1e-9));
        EXPECT_TRUE(rel_close(nc.dX2_m.value, def.dX2_m, 1e-9));
        EXPECT_TRUE(rel_close(nc.dX2_s.value, def.dX2_s, 1e-9));
        EXPECT_GE(nc.dX2_m.value, 0.0);
        EXPECT_DOUBLE_EQ(nc.product_sm.value, std::sqrt(std::max(0.0, nc.dX2_s.value) * std::max(0.0, nc.dX2_m.value)));
    });
}

TEST(Property, IdealModelsHaveUnitPreservation)
{
    for_all(300, 11, [](std::mt19937_64& rng, int) {
        SweepRanges ranges;
        ranges.r_min = 1.0;
        ranges.noise_max = 0.0;
        const auto m = random_model(rng, ranges);
        const auto a = analytic(m);
        const double kappa = m.params.kappa();
        const auto f = holland_figures(a.delta, a.with.var_p, kappa, m.J33);
        EXPECT_NEAR(f.c2_in_out.value, 1.0, 1e-12);
        const auto nc = nonclassicality(a.delta, a.with.var_p, kappa, m.J33, m.J33);
        EXPECT_NEAR(nc.dX2_s.value, 0.0, 1e-12);
        const double snr = kappa * kappa * m.J33 / m.initial.variance(Component::P_y);
        EXPECT_TRUE(rel_close(nc.dX2_s_given_m.value, 1.0 / (1.0 + snr), 1e-12));
    });
}

TEST(Property, SignFlipLeavesObservablesUnchanged)
{
    for_all(300, 12, [](std::mt19937_64& rng, int) {
        SweepRanges ranges;
        ranges.zero_n35 = true;
        const auto m = random_model(rng, ranges);
        auto flipped = m.params;
        flipped.meter_sign = CouplingSign::negative;
        const auto p = predicted_moments(m.params, m.noise, m.initial).packed();
        const auto q = predicted_moments(flipped, m.noise, m.initial).packed();
        for (int i = 0; i < 6; ++i) {
            EXPECT_TRUE(rel_close(p(i), q(i), 1e-12, p.cwiseAbs().maxCoeff()));
        }
    });
}

TEST(Property, EstimatorsAgreeOnAnalyticInputs)
{
    for_all(500, 13, [](std::mt19937_64& rng, int) {
        const auto m = random_model(rng);
        const auto a = analytic(m);
        try {
            const double by_var = estimate_rA_from_var(a.delta);
            EXPECT_TRUE(rel_close(by_var, estimate_rA_from_cov(a.delta), 1e-9));
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::degenerate_estimator);
        }
    });
}

TEST(Property, FullVerdictIsConjunction)
{
    for_all(500, 14, [](std::mt19937_64& rng, int) {
        SweepRanges ranges;
        ranges.noise_max = 200.0;
        const auto m = random_model(rng, ranges);
        const auto a = analytic(m);
        const auto r = certify(a.delta, a.with.var_p, Calibration{m.params.kappa(), m.J33, m.J0, m.params.r_L, 3.0});
        ASSERT_TRUE(r.verdicts.full_qnd.has_value());
        EXPECT_EQ(*r.verdicts.full_qnd, r.verdicts.state_prep && r.verdicts.info_damage);
        EXPECT_EQ(r.status == CertificationStatus::certified, *r.verdicts.full_qnd);
    });
}

TEST(Property, CsvRoundTripForArbitraryDoubles)
{
    for_all(50, 15, [](std::mt19937_64& rng, int) {
        std::vector<double> values(3 * 40);
        for (auto& v : values) {
            do {
                v = std::bit_cast<double>(rng());
            } while (!std::isfinite(v));
        }
        const ShotTable t(3, values);
        EXPECT_EQ(parse_shot_table(format_shot_table(t)), t);
    });
}

} // namespace
} // namespace qndc
