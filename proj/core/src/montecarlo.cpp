#include "qndc/montecarlo.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <random>

#include "parallel.hpp"
#include "qndc/error.hpp"

namespace qndc {

namespace {

enum class Arm : std::uint32_t { with_atoms = 0, no_atoms = 1 };

// Returns F with cov = F F^T, dropping null directions. Eigenvalues in
// [-tol, 0] are clipped to zero; anything more negative is rejected.
Matrix symmetric_factor(const Matrix& cov, const char* what)
{
    if (cov.size() == 0 || cov.isZero(0.0)) {
        return Matrix(cov.rows(), 0);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    const auto psd = check_psd(cov);
    if (!psd.ok) {
        throw Error(ErrorKind::sampler_unsupported,
                    std::string(what) + " is indefinite (eigenvalue " + std::to_string(psd.min_eigenvalue)
                        + "); it cannot be sampled");
    }
    const Vector& values = solver.eigenvalues();
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) > 0.0) {
            kept.push_back(i);
        }
    }
    Matrix factor(cov.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        factor.col(col) = solver.eigenvectors().col(kept[j]) * std::sqrt(values(kept[j]));
    }
    return factor;
}

struct PulseStep {
    Matrix transfer;
    Matrix noise_factor; // rows over the 6 (atoms, pulse) coordinates
    std::array<int, 6> support{};
};

struct Model {
    int n_pulses = 0;
    Vector mean;
    Matrix initial_factor;
    std::vector<PulseStep> pulses;
    std::array<int, 3> meters{};
};

Model build_model(const ExperimentParams& params, const NoiseModel& noise, const GaussianState& initial)
{
    const auto& layout = initial.layout();
    Model model;
    model.n_pulses = layout.n_pulses();
    model.mean = initial.mean();
    model.initial_factor = symmetric_factor(initial.cov(), "initial covariance");
    const Matrix noise_factor = symmetric_factor(noise.matrix(), "noise matrix");
    for (int k = 1; k <= layout.n_pulses(); ++k) {
        PulseStep step;
        step.transfer = interaction_matrix(params, k, layout);
        step.noise_factor = noise_factor;
        for (int i = 0; i < 3; ++i) {
            step.support[static_cast<std::size_t>(i)] = i;
            step.support[static_cast<std::size_t>(i + 3)] = 3 * k + i;
        }
        model.pulses.push_back(std::move(step));
        model.meters[static_cast<std::size_t>(k - 1)] = layout.offset(meter_of(k));
    }
    return model;
}

std::mt19937_64 substream(std::uint64_t seed, Arm arm, std::uint64_t chunk)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(arm), static_cast<std::uint32_t>(chunk),
                      static_cast<std::uint32_t>(chunk >> 32)};
    return std::mt19937_64(seq);
}

void fill_chunk(const Model& model, std::uint64_t seed, Arm arm, std::uint64_t chunk, std::size_t first,
                std::size_t count, std::vector<double>& out)
{
    auto rng = substream(seed, arm, chunk);
    std::normal_distribution<double> normal;
    const auto dim = model.mean.size();
    Vector x(dim);
    Vector z0(model.initial_factor.cols());
    Vector scratch(dim);
    const auto width = static_cast<std::size_t>(model.n_pulses);
    for (std::size_t s = 0; s < count; ++s) {
        for (Eigen::Index i = 0; i < z0.size(); ++i) {
            z0(i) = normal(rng);
        }
        x = model.mean;
        if (z0.size() > 0) {
            x.noalias() += model.initial_factor * z0;
        }
        for (const auto& step : model.pulses) {
            scratch.noalias() = step.transfer * x;
            x.swap(scratch);
            const auto rank = step.noise_factor.cols();
            if (rank > 0) {
                Vector xi(rank);
                for (Eigen::Index i = 0; i < rank; ++i) {
                    xi(i) = normal(rng);
                }
                const Vector kick = step.noise_factor * xi;
                for (std::size_t i = 0; i < step.support.size(); ++i) {
                    x(step.support[i]) += kick(static_cast<Eigen::Index>(i));
                }
            }
        }
        double* row = out.data() + (first + s) * width;
        for (std::size_t k = 0; k < width; ++k) {
            row[k] = x(model.meters[k]);
        }
    }
}

void append_number(std::string& text, double value)
{
    std::array<char, 32> buffer{};
    const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                                         std::chars_format::general, 17);
    text.append(buffer.data(), end);
    text.push_back(';');
}

} // namespace

ShotTable simulate_shots(const ExperimentParams& params, const NoiseModel& noise, const GaussianState& initial,
                         std::int64_t n_shots, std::uint64_t seed, bool with_atoms, const SamplerOptions& options)
{
    if (n_shots < 1) {
        throw Error(ErrorKind::invalid_argument, "n_shots must be at least 1");
    }
    if (options.chunk_size == 0) {
        throw Error(ErrorKind::invalid_argument, "chunk_size must be positive");
    }
    params.validate();
    ExperimentParams arm_params = params;
    NoiseModel arm_noise = noise;
    if (!with_atoms) {
        arm_params.g_tau = 0.0;
        arm_params.r_L = 1.0;
        arm_noise = NoiseModel::zero();
    }
    const Model model = build_model(arm_params, arm_noise, initial);
    const auto rows = static_cast<std::size_t>(n_shots);
    const std::size_t n_chunks = (rows + options.chunk_size - 1) / options.chunk_size;
    const Arm arm = with_atoms ? Arm::with_atoms : Arm::no_atoms;

    std::vector<double> values(rows * static_cast<std::size_t>(model.n_pulses));
    detail::for_each_chunk(n_chunks, options.threads, [&](std::size_t c) {
        const std::size_t first = c * options.chunk_size;
        const std::size_t count = std::min(options.chunk_size, rows - first);
        fill_chunk(model, seed, arm, c, first, count, values);
    });
    return ShotTable(model.n_pulses, std::move(values));
}

ShotRecords simulate_experiment(const ExperimentParams& params, const NoiseModel& noise,
                                const GaussianState& initial, std::int64_t n_shots, std::uint64_t seed,
                                const SamplerOptions& options)
{
    ShotRecords records;
    records.with_atoms = simulate_shots(params, noise, initial, n_shots, seed, true, options);
    records.no_atoms = simulate_shots(params, noise, initial, n_shots, seed, false, options);
    records.metadata.seed = seed;
    records.metadata.n_shots = n_shots;
    records.metadata.n_pulses = initial.layout().n_pulses();
    records.metadata.params_hash = parameter_hash(params, noise, initial);
    return records;
}

std::uint64_t parameter_hash(const ExperimentParams& params, const NoiseModel& noise, const GaussianState& initial)
{
    std::string text = "qndc-model-v1;";
    text += std::to_string(initial.layout().n_pulses()) + ";";
    for (double v : {params.g_tau, params.mean_Sx, params.mean_Jx, params.r_A, params.r_L}) {
        append_number(text, v);
    }
    text += params.meter_sign == CouplingSign::positive ? "+;" : "-;";
    for (Eigen::Index i = 0; i < noise.matrix().size(); ++i) {
        append_number(text, noise.matrix().data()[i]);
    }
    for (Eigen::Index i = 0; i < initial.mean().size(); ++i) {
        append_number(text, initial.mean()(i));
    }
    for (Eigen::Index i = 0; i < initial.cov().size(); ++i) {
        append_number(text, initial.cov().data()[i]);
    }
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::vector<MomentComparison> compare_moments(const MomentSet& predicted, const MomentSet& sampled,
                                              std::string_view prefix)
{
    if (predicted.n_pulses != sampled.n_pulses) {
        throw Error(ErrorKind::dimension_mismatch, "moment sets differ in pulse count");
    }
    if (!sampled.se) {
        throw Error(ErrorKind::invalid_argument, "sampled moments carry no standard errors");
    }
    static constexpr std::array<const char*, 6> names = {"var_p", "var_q", "var_r", "cov_pq", "cov_pr", "cov_qr"};
    const auto& se = *sampled.se;
    const std::array<double, 6> errors = {se.var_p, se.var_q, se.var_r, se.cov_pq, se.cov_pr, se.cov_qr};
    const auto p = predicted.packed();
    const auto s = sampled.packed();
    std::vector<MomentComparison> rows;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        if (!std::isfinite(p(k)) || !std::isfinite(s(k))) {
            continue;
        }
        MomentComparison row;
        row.name = std::string(prefix) + names[i];
        row.predicted = p(k);
        row.sampled = s(k);
        row.std_error = errors[i];
        const double diff = row.sampled - row.predicted;
        if (row.std_error > 0.0) {
            row.z = diff / row.std_error;
        } else {
            row.z = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

EmpiricalCheck empirical_check(const ExperimentParams& params, const NoiseModel& noise,
                               const GaussianState& initial, std::int64_t n_shots, std::uint64_t seed,
                               double z_limit, const SamplerOptions& options)
{
    const auto records = simulate_experiment(params, noise, initial, n_shots, seed, options);
    const auto [with_atoms, no_atoms] = sample_moments(records);
    EmpiricalCheck check;
    check.rows = compare_moments(predicted_moments(params, noise, initial), with_atoms, "atoms.");
    auto reference = compare_moments(no_atoms_moments(params, initial), no_atoms, "no_atoms.");
    check.rows.insert(check.rows.end(), reference.begin(), reference.end());
    for (const auto& row : check.rows) {
        check.max_abs_z = std::max(check.max_abs_z, std::abs(row.z));
    }
    check.passed = check.max_abs_z <= z_limit;
    return check;
}

} // namespace qndc
