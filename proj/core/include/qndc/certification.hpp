#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qndc/estimation.hpp"
#include "qndc/statistics.hpp"

namespace qndc {

/// A derived number with its first-order standard error. `error` is set
/// (and value is NaN) when the quantity is undefined for the given data.
struct Quantity {
    double value = not_available;
    double std_error = 0.0;
    std::string error;

    [[nodiscard]] bool defined() const noexcept { return error.empty(); }
};

/// Squared correlation coefficients between input/output system (J_z) and
/// meter (P_y) variables. All equal one for an ideal QND measurement.
struct FiguresOfMerit {
    Quantity c2_in_meter;  ///< C^2(X_in, Y_out): measurement quality
    Quantity c2_in_out;    ///< C^2(X_in, X_out): preservation of the signal
    Quantity c2_out_meter; ///< C^2(X_out, Y_out): state preparation
};

/// Conditional, measurement and added noise, each normalised by the
/// projection noise J0 (s|m and s additionally by r_A).
struct NonClassicality {
    Quantity dX2_s_given_m;
    Quantity dX2_m;
    Quantity dX2_s;
    Quantity product_sm; ///< sqrt(max(0, dX2_s) * max(0, dX2_m))
    double J0 = 0.0;
    bool dX2_s_negative = false;
};

/// Independently determined inputs to certification.
struct Calibration {
    double kappa = 0.0;
    double J33 = 0.0;
    double J0 = 0.0;
    double r_L = 1.0;
    double z_threshold = 3.0;
};

/// Measurable forms of the three figures. Undefined entries carry an error
/// string; the others are still returned.
FiguresOfMerit holland_figures(const DeltaStats& delta, double var_p, double kappa, double J33);

/// dX2_s|m = [dcov_pq/dcov_pr] [J33 + kappa^-2 (dvar_q - dvar_p - dcov_pq^2/var_p)] / J0
/// dX2_m   = (var_p - kappa^2 J33) / (kappa^2 J0)
/// dX2_s   = dcov_pq (dvar_q - dvar_p) / (dcov_pr kappa^2 J0)
/// Throws undefined_input for kappa == 0, J0 <= 0, var_p <= 0 or dcov_pr == 0.
NonClassicality nonclassicality(const DeltaStats& delta, double var_p, double kappa, double J33, double J0);

enum class CertificationStatus { certified, not_certified, inconclusive };

std::string_view to_string(CertificationStatus status) noexcept;

struct Verdicts {
    bool state_prep = false;
    bool info_damage = false;
    std::optional<bool> full_qnd; ///< absent when fewer than three pulses
};

struct CertificationReport {
    static constexpr int schema_version = 1;
    static constexpr const char* state_prep_criterion = "dX2_s_given_m < 1";
    static constexpr const char* info_damage_criterion = "dX_s * dX_m < 1";

    int n_pulses = 0;
    Calibration calibration;
    std::optional<MomentSet> with_atoms;
    std::optional<MomentSet> no_atoms;
    DeltaStats delta;
    Quantity d_cov_pq;
    Quantity d_cov_pr;
    Quantity conditional_variance;
    SqueezingCheck squeezing;
    std::optional<EstimatedModel> estimates;
    Quantity r_A;
    bool r_A_assumed_unity = false;
    FiguresOfMerit figures;
    NonClassicality nonclassical;
    Verdicts verdicts;       ///< gated at z_threshold standard errors
    Verdicts point_verdicts; ///< point estimates only
    CertificationStatus status = CertificationStatus::inconclusive;
    std::vector<std::string> reasons;
    std::vector<std::string> warnings;

    /// 0 certified, 10 not certified, 2 inconclusive.
    [[nodiscard]] int exit_code() const noexcept;
};

/// Certification from analytic (error-free) statistics.
CertificationReport certify(const DeltaStats& delta, double var_p, const Calibration& calibration);

/// Certification from sampled moments; standard errors propagate to every
/// quantity and verdicts need a margin of z_threshold standard errors.
CertificationReport certify(const MomentSet& with_atoms, const MomentSet& no_atoms,
                            const Calibration& calibration);

} // namespace qndc
