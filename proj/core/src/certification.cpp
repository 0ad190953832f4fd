#include "qndc/certification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "qndc/error.hpp"

namespace qndc {

namespace {

[[noreturn]] void undefined(const std::string& what)
{
    throw Error(ErrorKind::undefined_input, what);
}

void require_var_p(double var_p)
{
    if (!(var_p > 0.0)) {
        undefined("var(P_y) must be positive");
    }
}

void require_kappa(double kappa)
{
    if (kappa == 0.0 || !std::isfinite(kappa)) {
        undefined("kappa must be non-zero");
    }
}

void require_three(const DeltaStats& d)
{
    if (d.n_pulses < 3) {
        undefined("needs a third pulse");
    }
}

// dvar_q - dvar_p + kappa^2 J33 = kappa^2 var(J_z after the first pulse).
double jz_after_first(const DeltaStats& d, double kappa, double J33)
{
    if (d.n_pulses < 2) {
        undefined("needs a second pulse");
    }
    const double b = d.d_var_q - d.d_var_p + kappa * kappa * J33;
    if (!(b > 0.0)) {
        undefined("dvar_q - dvar_p + kappa^2 J33 must be positive");
    }
    return b;
}

double c2_in_meter(const DeltaStats&, double var_p, double kappa, double J33)
{
    require_var_p(var_p);
    return kappa * kappa * J33 / var_p;
}

double c2_in_out(const DeltaStats& d, double, double kappa, double J33)
{
    require_three(d);
    if (d.d_cov_pq == 0.0) {
        undefined("dcov(P_y,Q_y) is zero");
    }
    const double b = jz_after_first(d, kappa, J33);
    return kappa * kappa * J33 * d.d_cov_pr * d.d_cov_pr / (d.d_cov_pq * d.d_cov_pq * b);
}

double c2_out_meter(const DeltaStats& d, double var_p, double kappa, double J33)
{
    require_var_p(var_p);
    const double b = jz_after_first(d, kappa, J33);
    return d.d_cov_pq * d.d_cov_pq / (var_p * b);
}

void require_nonclassicality_inputs(const DeltaStats& d, double var_p, double kappa, double J0)
{
    require_kappa(kappa);
    require_var_p(var_p);
    if (!(J0 > 0.0)) {
        undefined("J0 must be positive");
    }
    require_three(d);
    if (d.d_cov_pr == 0.0) {
        undefined("dcov(P_y,R_y) is zero");
    }
}

double dx2_s_given_m(const DeltaStats& d, double var_p, double kappa, double J33, double J0)
{
    require_nonclassicality_inputs(d, var_p, kappa, J0);
    const double conditional = conditional_variance_from_stats(d, var_p, kappa, J33);
    return (d.d_cov_pq / d.d_cov_pr) * conditional / J0;
}

double dx2_m(double var_p, double kappa, double J33, double J0)
{
    require_kappa(kappa);
    if (!(J0 > 0.0)) {
        undefined("J0 must be positive");
    }
    const double k2 = kappa * kappa;
    return (var_p - k2 * J33) / (k2 * J0);
}

double dx2_s(const DeltaStats& d, double var_p, double kappa, double J0)
{
    require_nonclassicality_inputs(d, var_p, kappa, J0);
    return d.d_cov_pq * (d.d_var_q - d.d_var_p) / (d.d_cov_pr * kappa * kappa * J0);
}

enum Slot : std::size_t {
    slot_conditional,
    slot_dx2_sm,
    slot_dx2_m,
    slot_dx2_s,
    slot_sm_raw, // dX2_s * dX2_m without clipping, the info-damage gate
    slot_c2_im,
    slot_c2_io,
    slot_c2_om,
    slot_dcov_pq,
    slot_dcov_pr,
    slot_r_a,
    slot_count,
};

struct Evaluation {
    std::array<double, slot_count> value{};
    std::array<std::string, slot_count> error{};
};

Evaluation evaluate(const DeltaStats& d, double var_p, const Calibration& c)
{
    Evaluation e;
    e.value.fill(not_available);
    auto put = [&](Slot s, const std::function<double()>& fn) {
        try {
            e.value[s] = fn();
        } catch (const Error& err) {
            e.error[s] = err.what();
        }
    };
    put(slot_conditional, [&] { return conditional_variance_from_stats(d, var_p, c.kappa, c.J33); });
    put(slot_dx2_sm, [&] { return dx2_s_given_m(d, var_p, c.kappa, c.J33, c.J0); });
    put(slot_dx2_m, [&] { return dx2_m(var_p, c.kappa, c.J33, c.J0); });
    put(slot_dx2_s, [&] { return dx2_s(d, var_p, c.kappa, c.J0); });
    put(slot_sm_raw, [&] { return dx2_s(d, var_p, c.kappa, c.J0) * dx2_m(var_p, c.kappa, c.J33, c.J0); });
    put(slot_c2_im, [&] { return c2_in_meter(d, var_p, c.kappa, c.J33); });
    put(slot_c2_io, [&] { return c2_in_out(d, var_p, c.kappa, c.J33); });
    put(slot_c2_om, [&] { return c2_out_meter(d, var_p, c.kappa, c.J33); });
    put(slot_dcov_pq, [&] {
        if (d.n_pulses < 2) {
            undefined("needs a second pulse");
        }
        return d.d_cov_pq;
    });
    put(slot_dcov_pr, [&] {
        require_three(d);
        return d.d_cov_pr;
    });
    put(slot_r_a, [&] { return estimate_rA_from_cov(d); });
    return e;
}

Quantity quantity(const Evaluation& e, const std::array<double, slot_count>& se, Slot s)
{
    Quantity q;
    q.value = e.value[s];
    q.error = e.error[s];
    q.std_error = q.defined() ? se[s] : 0.0;
    return q;
}

// |x| clears both a z-sigma band and a relative zero floor.
bool significant(const Quantity& q, double z, double scale)
{
    return q.defined() && std::abs(q.value) > std::max(z * q.std_error, 1e-12 * scale);
}

Verdicts decide(const CertificationReport& r, double z, bool& informative_pq, bool& informative_pr)
{
    auto magnitude = [](double x) { return std::isfinite(x) ? std::abs(x) : 0.0; };
    const double scale
        = std::max({magnitude(r.delta.d_var_p), magnitude(r.delta.d_var_q), magnitude(r.d_cov_pq.value)});
    informative_pq = significant(r.d_cov_pq, z, scale);
    informative_pr = r.n_pulses >= 3 && significant(r.d_cov_pr, z, scale);

    Verdicts v;
    if (r.n_pulses >= 3) {
        const auto& sm = r.nonclassical.dX2_s_given_m;
        v.state_prep = informative_pq && informative_pr && sm.defined() && sm.value + z * sm.std_error < 1.0;

        const auto& s = r.nonclassical.dX2_s;
        const auto& m = r.nonclassical.dX2_m;
        const auto& product = r.nonclassical.product_sm;
        // The gate works on the squared product, whose error stays finite at dX2_s = 0.
        const double gate_error = product.defined() ? product.std_error : 0.0;
        v.info_damage = informative_pq && informative_pr && s.defined() && m.defined() && product.defined()
                        && std::max(0.0, s.value) * std::max(0.0, m.value) + z * gate_error < 1.0;
        v.full_qnd = v.state_prep && v.info_damage;
    } else {
        const auto& cv = r.conditional_variance;
        v.state_prep = informative_pq && cv.defined() && r.calibration.J0 > 0.0
                       && (cv.value + z * cv.std_error) / r.calibration.J0 < 1.0;
    }
    return v;
}

CertificationReport assemble(const DeltaStats& delta, double var_p, const Calibration& cal,
                             const Evaluation& e, const std::array<double, slot_count>& se)
{
    CertificationReport r;
    r.n_pulses = delta.n_pulses;
    r.calibration = cal;
    r.delta = delta;
    r.d_cov_pq = quantity(e, se, slot_dcov_pq);
    r.d_cov_pr = quantity(e, se, slot_dcov_pr);
    r.conditional_variance = quantity(e, se, slot_conditional);
    r.r_A = quantity(e, se, slot_r_a);

    r.figures.c2_in_meter = quantity(e, se, slot_c2_im);
    r.figures.c2_in_out = quantity(e, se, slot_c2_io);
    r.figures.c2_out_meter = quantity(e, se, slot_c2_om);

    auto& nc = r.nonclassical;
    nc.J0 = cal.J0;
    nc.dX2_s_given_m = quantity(e, se, slot_dx2_sm);
    nc.dX2_m = quantity(e, se, slot_dx2_m);
    nc.dX2_s = quantity(e, se, slot_dx2_s);
    nc.product_sm = quantity(e, se, slot_sm_raw);
    if (nc.product_sm.defined()) {
        nc.product_sm.value = std::sqrt(std::max(0.0, nc.dX2_s.value) * std::max(0.0, nc.dX2_m.value));
    }
    nc.dX2_s_negative = nc.dX2_s.defined() && nc.dX2_s.value < 0.0;
    if (nc.dX2_s_negative) {
        r.warnings.emplace_back("dX2_s is negative (var(J_z) reduced by loss); clipped to 0 in the product");
    }

    if (var_p > 0.0 && delta.n_pulses >= 2) {
        r.squeezing = squeezing_condition(delta, var_p);
    }
    if (delta.n_pulses >= 3) {
        try {
            r.estimates = invert_three_pulse(delta, var_p, cal.kappa, cal.J33);
            for (const auto& w : r.estimates->warnings) {
                r.warnings.push_back(w);
            }
        } catch (const Error& err) {
            r.warnings.emplace_back(std::string("three-pulse inversion failed: ") + err.what());
        }
    }

    bool informative_pq = false;
    bool informative_pr = false;
    r.verdicts = decide(r, cal.z_threshold, informative_pq, informative_pr);
    bool point_pq = false;
    bool point_pr = false;
    r.point_verdicts = decide(r, 0.0, point_pq, point_pr);

    if (delta.n_pulses < 2) {
        r.reasons.emplace_back("at least two pulses are required");
    }
    if (delta.n_pulses >= 2 && !informative_pq) {
        r.reasons.emplace_back("uninformative coupling: dcov(P_y,Q_y) is not significantly non-zero");
    }
    if (delta.n_pulses >= 3 && !informative_pr) {
        r.reasons.emplace_back("uninformative coupling: dcov(P_y,R_y) is not significantly non-zero");
    }
    if (delta.n_pulses == 2) {
        r.r_A_assumed_unity = true;
        r.reasons.emplace_back("three pulses are required for full certification; state preparation assumes r_A = 1");
    }
    for (const Quantity* q : {&nc.dX2_s_given_m, &nc.dX2_m, &nc.dX2_s}) {
        if (delta.n_pulses >= 3 && !q->defined()) {
            r.reasons.emplace_back("undefined non-classicality quantity: " + q->error);
            break;
        }
    }

    if (!r.reasons.empty()) {
        r.status = CertificationStatus::inconclusive;
    } else if (r.verdicts.full_qnd.value_or(false)) {
        r.status = CertificationStatus::certified;
    } else {
        r.status = CertificationStatus::not_certified;
    }
    return r;
}

} // namespace

FiguresOfMerit holland_figures(const DeltaStats& delta, double var_p, double kappa, double J33)
{
    Calibration c;
    c.kappa = kappa;
    c.J33 = J33;
    const auto e = evaluate(delta, var_p, c);
    std::array<double, slot_count> zero{};
    FiguresOfMerit f;
    f.c2_in_meter = quantity(e, zero, slot_c2_im);
    f.c2_in_out = quantity(e, zero, slot_c2_io);
    f.c2_out_meter = quantity(e, zero, slot_c2_om);
    return f;
}

NonClassicality nonclassicality(const DeltaStats& delta, double var_p, double kappa, double J33, double J0)
{
    require_nonclassicality_inputs(delta, var_p, kappa, J0);
    NonClassicality nc;
    nc.J0 = J0;
    nc.dX2_s_given_m.value = dx2_s_given_m(delta, var_p, kappa, J33, J0);
    nc.dX2_m.value = dx2_m(var_p, kappa, J33, J0);
    nc.dX2_s.value = dx2_s(delta, var_p, kappa, J0);
    nc.dX2_s_negative = nc.dX2_s.value < 0.0;
    nc.product_sm.value = std::sqrt(std::max(0.0, nc.dX2_s.value) * std::max(0.0, nc.dX2_m.value));
    return nc;
}

std::string_view to_string(CertificationStatus status) noexcept
{
    switch (status) {
    case CertificationStatus::certified: return "certified";
    case CertificationStatus::not_certified: return "not_certified";
    case CertificationStatus::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

int CertificationReport::exit_code() const noexcept
{
    switch (status) {
    case CertificationStatus::certified: return 0;
    case CertificationStatus::not_certified: return 10;
    case CertificationStatus::inconclusive: return 2;
    }
    return 2;
}

CertificationReport certify(const DeltaStats& delta, double var_p, const Calibration& calibration)
{
    const auto e = evaluate(delta, var_p, calibration);
    return assemble(delta, var_p, calibration, e, std::array<double, slot_count>{});
}

CertificationReport certify(const MomentSet& with_atoms, const MomentSet& no_atoms,
                            const Calibration& calibration)
{
    using Theta = Eigen::Matrix<double, 12, 1>;
    const DeltaStats delta = delta_stats(with_atoms, no_atoms, calibration.r_L);
    const auto center = evaluate(delta, with_atoms.var_p, calibration);

    Theta theta;
    theta << with_atoms.packed(), no_atoms.packed();
    Eigen::Matrix<double, 12, 12> sigma = Eigen::Matrix<double, 12, 12>::Zero();
    sigma.topLeftCorner<6, 6>() = moment_estimator_covariance(with_atoms);
    sigma.bottomRightCorner<6, 6>() = moment_estimator_covariance(no_atoms);

    auto at = [&](const Theta& t) {
        MomentSet w = with_atoms;
        MomentSet n = no_atoms;
        w.unpack(t.head<6>());
        n.unpack(t.tail<6>());
        return evaluate(delta_stats(w, n, calibration.r_L), w.var_p, calibration);
    };

    double scale = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (std::isfinite(theta(i))) {
            scale = std::max(scale, std::abs(theta(i)));
        }
    }

    // Central-difference gradient of every slot with respect to the moments.
    std::array<Theta, slot_count> gradient;
    for (auto& g : gradient) {
        g.setZero();
    }
    std::array<bool, slot_count> gradient_ok;
    gradient_ok.fill(true);
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (!std::isfinite(theta(i)) || sigma(i, i) == 0.0) {
            continue;
        }
        const double h = 1e-6 * std::max(std::abs(theta(i)), 1e-3 * scale);
        Theta up = theta;
        Theta down = theta;
        up(i) += h;
        down(i) -= h;
        const auto eu = at(up);
        const auto ed = at(down);
        for (std::size_t s = 0; s < slot_count; ++s) {
            if (!eu.error[s].empty() || !ed.error[s].empty()) {
                gradient_ok[s] = false;
                continue;
            }
            gradient[s](i) = (eu.value[s] - ed.value[s]) / (2.0 * h);
        }
    }
    std::array<double, slot_count> se{};
    for (std::size_t s = 0; s < slot_count; ++s) {
        se[s] = gradient_ok[s] ? std::sqrt(std::max(0.0, gradient[s].dot(sigma * gradient[s]))) : not_available;
    }

    auto report = assemble(delta, with_atoms.var_p, calibration, center, se);
    report.with_atoms = with_atoms;
    report.no_atoms = no_atoms;
    return report;
}

} // namespace qndc
