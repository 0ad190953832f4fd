#include "qndc/statistics.hpp"

#include <array>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "qndc/error.hpp"

namespace qndc {

namespace {

// (row, column) pulse pairs behind each packed moment.
constexpr std::array<std::pair<int, int>, 6> packed_pairs = {{
    {1, 1}, {2, 2}, {3, 3}, {1, 2}, {1, 3}, {2, 3},
}};

constexpr std::size_t moment_chunk_rows = std::size_t{1} << 16;

} // namespace

MomentSet::Packed MomentSet::packed() const
{
    Packed p;
    p << var_p, var_q, var_r, cov_pq, cov_pr, cov_qr;
    return p;
}

void MomentSet::unpack(const Packed& values)
{
    var_p = values(0);
    var_q = values(1);
    var_r = values(2);
    cov_pq = values(3);
    cov_pr = values(4);
    cov_qr = values(5);
}

double MomentSet::covariance(int a, int b) const
{
    if (a > b) {
        std::swap(a, b);
    }
    for (std::size_t i = 0; i < packed_pairs.size(); ++i) {
        if (packed_pairs[i] == std::pair{a, b}) {
            return packed()(static_cast<Eigen::Index>(i));
        }
    }
    throw Error(ErrorKind::invalid_pulse, "no moment for pulses " + std::to_string(a) + "," + std::to_string(b));
}

ShotTable::ShotTable(int n_pulses, std::vector<double> values) : n_pulses_(n_pulses), values_(std::move(values))
{
    if (n_pulses_ < 1 || n_pulses_ > max_pulses || values_.size() % static_cast<std::size_t>(n_pulses_) != 0) {
        throw Error(ErrorKind::dimension_mismatch, "shot table values do not fill whole rows");
    }
}

void ShotTable::push_row(std::span<const double> row)
{
    if (static_cast<int>(row.size()) != n_pulses_) {
        throw Error(ErrorKind::dimension_mismatch, "shot row has " + std::to_string(row.size())
                                                       + " columns, expected " + std::to_string(n_pulses_));
    }
    values_.insert(values_.end(), row.begin(), row.end());
}

void ShotTable::append(const ShotTable& other)
{
    if (other.n_pulses_ != n_pulses_) {
        throw Error(ErrorKind::dimension_mismatch, "cannot append tables with different pulse counts");
    }
    values_.insert(values_.end(), other.values_.begin(), other.values_.end());
}

MomentAccumulator::MomentAccumulator(int columns) : columns_(columns)
{
    if (columns < 1 || columns > 3) {
        throw Error(ErrorKind::invalid_argument, "accumulator supports 1 to 3 columns");
    }
}

void MomentAccumulator::add(std::span<const double> row)
{
    ++n_;
    const double inv_n = 1.0 / static_cast<double>(n_);
    Eigen::Vector3d delta = Eigen::Vector3d::Zero();
    for (int i = 0; i < columns_; ++i) {
        delta(i) = row[static_cast<std::size_t>(i)] - mean_(i);
        mean_(i) += delta(i) * inv_n;
    }
    for (int i = 0; i < columns_; ++i) {
        const double after = row[static_cast<std::size_t>(i)] - mean_(i);
        for (int j = 0; j < columns_; ++j) {
            comoment_(j, i) += delta(j) * after;
        }
    }
}

void MomentAccumulator::merge(const MomentAccumulator& other)
{
    if (other.columns_ != columns_) {
        throw Error(ErrorKind::dimension_mismatch, "cannot merge accumulators of different width");
    }
    if (other.n_ == 0) {
        return;
    }
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const Eigen::Vector3d delta = other.mean_ - mean_;
    mean_ += delta * (nb / n);
    comoment_ += other.comoment_ + delta * delta.transpose() * (na * nb / n);
    n_ += other.n_;
}

double MomentAccumulator::covariance(int a, int b) const
{
    if (n_ < 2) {
        throw Error(ErrorKind::too_few_shots, "need at least two shots, got " + std::to_string(n_));
    }
    return 0.5 * (comoment_(a, b) + comoment_(b, a)) / static_cast<double>(n_ - 1);
}

MomentSet MomentAccumulator::moments() const
{
    MomentSet m;
    m.n_pulses = columns_;
    m.n_shots = n_;
    MomentSet::Packed values = MomentSet::Packed::Constant(not_available);
    MomentSet::Packed errors = MomentSet::Packed::Constant(not_available);
    const double dof = static_cast<double>(n_ - 1);
    for (std::size_t i = 0; i < packed_pairs.size(); ++i) {
        const auto [a, b] = packed_pairs[i];
        if (b > columns_) {
            continue;
        }
        const double c = covariance(a - 1, b - 1);
        const double va = covariance(a - 1, a - 1);
        const double vb = covariance(b - 1, b - 1);
        const auto k = static_cast<Eigen::Index>(i);
        values(k) = c;
        errors(k) = a == b ? c * std::sqrt(2.0 / dof) : std::sqrt((va * vb + c * c) / dof);
    }
    m.unpack(values);
    MomentErrors se;
    se.var_p = errors(0);
    se.var_q = errors(1);
    se.var_r = errors(2);
    se.cov_pq = errors(3);
    se.cov_pr = errors(4);
    se.cov_qr = errors(5);
    m.se = se;
    m.mean_p = mean_(0);
    if (columns_ >= 2) {
        m.mean_q = mean_(1);
    }
    if (columns_ >= 3) {
        m.mean_r = mean_(2);
    }
    return m;
}

namespace {

MomentSet read_moments(const GaussianState& state)
{
    const int n = state.layout().n_pulses();
    MomentSet m;
    m.n_pulses = n;
    MomentSet::Packed values = MomentSet::Packed::Constant(not_available);
    for (std::size_t i = 0; i < packed_pairs.size(); ++i) {
        const auto [a, b] = packed_pairs[i];
        if (b <= n) {
            values(static_cast<Eigen::Index>(i)) = state.entry(meter_of(a), meter_of(b));
        }
    }
    m.unpack(values);
    m.mean_p = state.mean_of(Component::P_y);
    if (n >= 2) {
        m.mean_q = state.mean_of(Component::Q_y);
    }
    if (n >= 3) {
        m.mean_r = state.mean_of(Component::R_y);
    }
    return m;
}

} // namespace

MomentSet predicted_moments(const ExperimentParams& params, const NoiseModel& noise,
                            const GaussianState& initial)
{
    return read_moments(propagate(initial, params, noise));
}

MomentSet closed_form_moments(const ExperimentParams& params, const NoiseModel& noise,
                              const GaussianState& initial)
{
    const int n = initial.layout().n_pulses();
    const double kappa = params.signed_kappa();
    const double rA = params.r_A;
    const double rL2 = params.r_L * params.r_L;
    const double n33 = noise.n33();
    const double n35 = noise.n35();
    const double n55 = noise.n55();
    const double J33 = initial.variance(Component::J_z);
    const double Jz = initial.mean_of(Component::J_z);

    // var(J_z) entering pulse k, and cov(J_z, P_y) after pulse 1.
    const double jz_var_1 = rA * rA * J33 + n33;
    const double jz_var_2 = rA * rA * jz_var_1 + n33;
    const double jz_py_1 = kappa * rA * J33 + n35;

    MomentSet m;
    m.n_pulses = n;
    m.var_p = rL2 * initial.variance(Component::P_y) + kappa * kappa * J33 + n55;
    m.mean_p = params.r_L * initial.mean_of(Component::P_y) + kappa * Jz;
    if (n >= 2) {
        m.var_q = rL2 * initial.variance(Component::Q_y) + kappa * kappa * jz_var_1 + n55;
        m.cov_pq = rL2 * initial.entry(Component::P_y, Component::Q_y) + kappa * jz_py_1;
        m.mean_q = params.r_L * initial.mean_of(Component::Q_y) + kappa * rA * Jz;
    }
    if (n >= 3) {
        m.var_r = rL2 * initial.variance(Component::R_y) + kappa * kappa * jz_var_2 + n55;
        m.cov_pr = rL2 * initial.entry(Component::P_y, Component::R_y) + kappa * rA * jz_py_1;
        m.cov_qr = rL2 * initial.entry(Component::Q_y, Component::R_y) + kappa * (kappa * rA * jz_var_1 + n35);
        m.mean_r = params.r_L * initial.mean_of(Component::R_y) + kappa * rA * rA * Jz;
    }
    return m;
}

MomentSet no_atoms_moments(const ExperimentParams& params, const GaussianState& initial)
{
    ExperimentParams empty = params;
    empty.g_tau = 0.0;
    empty.r_L = 1.0;
    return predicted_moments(empty, NoiseModel::zero(), initial);
}

DeltaStats delta_stats(const MomentSet& measured, const MomentSet& reference, double r_L)
{
    if (measured.n_pulses != reference.n_pulses) {
        throw Error(ErrorKind::dimension_mismatch,
                    "with-atoms data has " + std::to_string(measured.n_pulses) + " pulses, reference has "
                        + std::to_string(reference.n_pulses));
    }
    const double s = r_L * r_L;
    DeltaStats d;
    d.n_pulses = measured.n_pulses;
    d.d_var_p = measured.var_p - reference.var_p * s;
    d.d_var_q = measured.var_q - reference.var_q * s;
    d.d_var_r = measured.var_r - reference.var_r * s;
    d.d_cov_pq = measured.cov_pq - reference.cov_pq * s;
    d.d_cov_pr = measured.cov_pr - reference.cov_pr * s;
    return d;
}

MomentSet sample_moments(const ShotTable& table)
{
    const std::size_t rows = table.rows();
    if (rows < 2) {
        throw Error(ErrorKind::too_few_shots, "need at least two shots, got " + std::to_string(rows));
    }
    const std::size_t n_chunks = (rows + moment_chunk_rows - 1) / moment_chunk_rows;
    std::vector<MomentAccumulator> partial(n_chunks, MomentAccumulator(table.n_pulses()));
    detail::for_each_chunk(n_chunks, 0, [&](std::size_t c) {
        const std::size_t end = std::min(rows, (c + 1) * moment_chunk_rows);
        for (std::size_t r = c * moment_chunk_rows; r < end; ++r) {
            partial[c].add(table.row(r));
        }
    });
    MomentAccumulator total(table.n_pulses());
    for (const auto& p : partial) {
        total.merge(p);
    }
    return total.moments();
}

std::pair<MomentSet, MomentSet> sample_moments(const ShotRecords& records)
{
    if (records.with_atoms.n_pulses() != records.no_atoms.n_pulses()) {
        throw Error(ErrorKind::dimension_mismatch, "with-atoms and no-atoms records differ in pulse count");
    }
    return {sample_moments(records.with_atoms), sample_moments(records.no_atoms)};
}

Eigen::Matrix<double, 6, 6> moment_estimator_covariance(const MomentSet& moments)
{
    Eigen::Matrix<double, 6, 6> out = Eigen::Matrix<double, 6, 6>::Zero();
    if (!moments.n_shots || *moments.n_shots < 2) {
        return out;
    }
    const double dof = static_cast<double>(*moments.n_shots - 1);
    const int n = moments.n_pulses;
    auto sigma = [&](int a, int b) { return moments.covariance(a, b); };
    for (std::size_t i = 0; i < packed_pairs.size(); ++i) {
        const auto [a, b] = packed_pairs[i];
        if (b > n) {
            continue;
        }
        for (std::size_t j = 0; j < packed_pairs.size(); ++j) {
            const auto [c, d] = packed_pairs[j];
            if (d > n) {
                continue;
            }
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                = (sigma(a, c) * sigma(b, d) + sigma(a, d) * sigma(b, c)) / dof;
        }
    }
    return out;
}

double conditional_variance_from_stats(const DeltaStats& delta, double var_p, double kappa, double J33)
{
    if (!(var_p > 0.0)) {
        throw Error(ErrorKind::undefined_input, "var(P_y) must be positive");
    }
    if (kappa == 0.0) {
        throw Error(ErrorKind::undefined_input, "kappa must be non-zero");
    }
    return J33
           + (delta.d_var_q - delta.d_var_p - delta.d_cov_pq * delta.d_cov_pq / var_p) / (kappa * kappa);
}

SqueezingCheck squeezing_condition(const DeltaStats& delta, double var_p)
{
    if (!(var_p > 0.0)) {
        throw Error(ErrorKind::undefined_input, "var(P_y) must be positive");
    }
    SqueezingCheck check;
    check.margin = delta.d_cov_pq * delta.d_cov_pq - var_p * (delta.d_var_q - delta.d_var_p);
    check.reduces_variance = check.margin > 0.0;
    return check;
}

} // namespace qndc
