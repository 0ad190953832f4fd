#include <benchmark/benchmark.h>

#include "qndc/certification.hpp"
#include "qndc/dynamics.hpp"
#include "qndc/montecarlo.hpp"
#include "qndc/statistics.hpp"

namespace {

using namespace qndc;

struct Model {
    ExperimentParams params = ExperimentParams::from_kappa(1.0, 50.0, 50.0, 0.8, 0.9);
    NoiseModel noise = NoiseModel::from_entries({{3, 3, 2.0}, {3, 5, 0.5}, {5, 5, 4.0}});
    GaussianState initial = make_initial_state(AtomicBlock::coherent_spin_state(100.0),
                                               OpticalBlock::coherent_pulses(100.0, 3), Layout(3));
};

void BM_ApplyPulse(benchmark::State& state)
{
    const Model m;
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_pulse(m.initial, m.params, m.noise, 1));
    }
}
BENCHMARK(BM_ApplyPulse);

void BM_PredictedMoments(benchmark::State& state)
{
    const Model m;
    for (auto _ : state) {
        benchmark::DoNotOptimize(predicted_moments(m.params, m.noise, m.initial));
    }
}
BENCHMARK(BM_PredictedMoments);

void BM_SimulateShots(benchmark::State& state)
{
    const Model m;
    SamplerOptions options;
    options.threads = static_cast<unsigned>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_shots(m.params, m.noise, m.initial, state.range(0), 1, true, options));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateShots)->Args({100'000, 1})->Args({100'000, 0})->Unit(benchmark::kMillisecond);

void BM_SampleMoments(benchmark::State& state)
{
    const Model m;
    const auto table = simulate_shots(m.params, m.noise, m.initial, state.range(0), 1, true);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_moments(table));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleMoments)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_CertifySampled(benchmark::State& state)
{
    const Model m;
    const auto records = simulate_experiment(m.params, m.noise, m.initial, 10'000, 2);
    const auto [with, without] = sample_moments(records);
    const Calibration cal{1.0, 25.0, 25.0, 0.9, 3.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(certify(with, without, cal));
    }
}
BENCHMARK(BM_CertifySampled);

} // namespace

BENCHMARK_MAIN();
