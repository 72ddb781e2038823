/**
 * @file riem_compare.hpp
 * @brief The Riemannian tube estimate rho_EKM and the comparison tables
 *        against the Schwarzian and curvature estimates.
 *
 * rho_EKM = min{ r_inj^R, inj(g)/2, pi/(2 sqrt K), 2/(sqrt(2a + b^2) + b) },
 *   a = 4/3 |sec|,  b = theta'/2 + sqrt(theta'^2/4 - 1/2 min Ric(f0)).
 * Unknown injectivity terms are +inf, so every value here is an upper bound
 * on the estimate.
 */
#pragma once

#include "srtight/errors.hpp"
#include "srtight/registry.hpp"
#include "srtight/tightness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

namespace srtight {

struct EkmInputs {
    double r_inj_R = INFINITY;
    double inj_g = INFINITY;
    double sec_abs = 0.0;      ///< bound on |sec|
    double K = 0.0;            ///< positive upper bound on sec
    double ric_f0_min = 0.0;
    double theta_prime = 1.0;  ///< rotation speed
};

struct EkmResult {
    double value = INFINITY;
    double a = 0.0, b = 0.0;
    std::array<double, 4> terms{}; ///< the four candidates of the minimum
};

inline EkmResult rho_ekm(const EkmInputs& in) {
    if (!(in.K >= 0 && in.sec_abs >= 0)) throw Error(ErrorKind::InvalidInput, "EKM bounds must be nonnegative");
    const double tp = in.theta_prime;
    const double rad = tp * tp / 4 - 0.5 * in.ric_f0_min;
    if (rad < 0) throw Error(ErrorKind::ComplexB, "theta'^2/4 - min Ric(f0)/2 < 0");
    EkmResult r;
    r.a = 4.0 / 3.0 * in.sec_abs;
    r.b = tp / 2 + std::sqrt(rad);
    r.terms = {in.r_inj_R, in.inj_g / 2, in.K > 0 ? std::numbers::pi / (2 * std::sqrt(in.K)) : INFINITY,
               2 / (std::sqrt(2 * r.a + r.b * r.b) + r.b)};
    r.value = *std::min_element(r.terms.begin(), r.terms.end());
    return r;
}

struct SectionalRicci {
    double sec = 0.0, ric_f0 = 0.0;
};

/// Riemannian extension of a K-contact structure: the plane with unit normal
/// of omega-component n0 has sec = n0^2 (kappa - 1) + 1/4; Ric(f0) = 1/2.
inline SectionalRicci ksect(double kappa, double n0) {
    if (std::abs(n0) > 1) throw Error(ErrorKind::InvalidInput, "|n0| must be <= 1");
    return {n0 * n0 * (kappa - 1) + 0.25, 0.5};
}

/// Bounds over all planes (n0 in [0, 1]); sec is affine in n0^2, so the ends suffice.
inline EkmInputs kcontact_ekm_inputs(double kappa) {
    const double s0 = ksect(kappa, 0.0).sec, s1 = ksect(kappa, 1.0).sec;
    EkmInputs in;
    in.sec_abs = std::max(std::abs(s0), std::abs(s1));
    in.K = std::max({0.0, s0, s1});
    in.ric_f0_min = 0.5;
    return in;
}

/// sup_s min{s, rho(s)} for rho nonincreasing: the crossing s = rho(s), by bisection.
inline double rho_ekm_sup_s(const std::function<double(double)>& rho, double tol = 1e-8) {
    auto g = [&](double s) { return s - rho(s); };
    double hi = 1.0;
    while (g(hi) < 0) {
        hi *= 2;
        if (hi > 1e12) return INFINITY;
    }
    double lo = hi / 2;
    while (g(lo) > 0) {
        lo /= 2;
        if (lo < 1e-12) return 0.0;
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double rho_ekm_sup_s_inputs(const std::function<EkmInputs(double)>& per_radius, double tol = 1e-8) {
    return rho_ekm_sup_s([&](double s) { return rho_ekm(per_radius(s)).value; }, tol);
}

/// Ric(f0) = (1 - r^4)/2 and sec(span{f2, f0}) = (r^2 - 1)^2/4 for the
/// overtwisted model's Riemannian extension.
inline SectionalRicci ot_curvature_profile(double r) {
    const double r2 = r * r;
    return {0.25 * (r2 - 1) * (r2 - 1), 0.5 * (1 - r2 * r2)};
}

/// Inputs on the tube of radius s. The one known plane only bounds |sec| and
/// K from below, so the resulting rho^s is an upper bound.
inline EkmInputs ot_ekm_inputs(double s) {
    EkmInputs in;
    const double at0 = ot_curvature_profile(0.0).sec, atS = ot_curvature_profile(s).sec;
    in.sec_abs = s > 1 ? std::max(at0, atS) : at0; // (r^2 - 1)^2 peaks at an end of [0, s]
    in.K = in.sec_abs;
    in.ric_f0_min = ot_curvature_profile(s).ric_f0; // decreasing in r
    return in;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

struct ComparisonRow {
    std::string model;
    double rho_B = NAN, r_tight = NAN, rho_C = NAN;
    double rho_EKM = NAN;        ///< upper bound on the Riemannian estimate
    double rho_EKM_sharp = NAN;  ///< same, with the per-radius inputs instead of a closed majorant
};

/// Heisenberg, SU(2), SL(2) rows: rho_B and r_tight from the orbit analysis,
/// rho_C from the canonical curvatures, rho_EKM from the sectional curvatures.
inline std::vector<ComparisonRow> kleft_table(AnalysisOptions opt = {}) {
    std::vector<ComparisonRow> rows;
    const std::array<std::pair<const char*, double>, 3> models{{{"Heisenberg", 0.0}, {"SU(2)", 1.0}, {"SL(2)", -1.0}}};
    for (const auto& [label, kappa] : models) {
        const Model m = kcontact_model(kappa);
        AnalysisOptions o = opt;
        if (m.r_inj && std::isfinite(*m.r_inj)) o.r_max = std::max(o.r_max, *m.r_inj + 0.25);
        const TightnessReport rep = analyze_orbit(m, o);
        ComparisonRow row;
        row.model = label;
        row.rho_B = rep.rho_B.value_or(NAN);
        row.r_tight = rep.r_tight.value_or(NAN);
        row.rho_C = rep.rho_C.value_or(NAN);
        row.rho_EKM = rho_ekm(kcontact_ekm_inputs(kappa)).value;
        row.rho_EKM_sharp = row.rho_EKM;
        rows.push_back(row);
    }
    return rows;
}

/// Overtwisted row: rho_B = r_tight from the pipeline; rho_EKM through the
/// supremum over tube radii, with the majorant rho^s <= 2/s^2 and with the
/// per-radius inputs.
inline ComparisonRow ot_table(AnalysisOptions opt = {}) {
    const Model m = builtin_model("overtwisted");
    const TightnessReport rep = analyze_orbit(m, opt);
    ComparisonRow row;
    row.model = "overtwisted";
    row.rho_B = rep.rho_B.value_or(NAN);
    row.r_tight = rep.r_tight.value_or(NAN);
    row.rho_EKM = rho_ekm_sup_s([](double s) { return 2 / (s * s); });
    row.rho_EKM_sharp = rho_ekm_sup_s_inputs(ot_ekm_inputs);
    return row;
}

namespace detail {

inline std::string cell(double v) {
    if (std::isnan(v)) return "n/a";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace detail

inline void write_table_markdown(std::ostream& os, const std::vector<ComparisonRow>& rows) {
    os << "| model | rho_B | r_tight | rho_C | rho_EKM (upper bound) | rho_EKM per-radius (upper bound) |\n";
    os << "|---|---|---|---|---|---|\n";
    for (const auto& r : rows)
        os << "| " << r.model << " | " << detail::cell(r.rho_B) << " | " << detail::cell(r.r_tight) << " | "
           << detail::cell(r.rho_C) << " | <= " << detail::cell(r.rho_EKM) << " | <= " << detail::cell(r.rho_EKM_sharp)
           << " |\n";
}

inline void write_table_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
    os << "model,rho_B,r_tight,rho_C,rho_EKM_upper_bound,rho_EKM_per_radius_upper_bound\n";
    for (const auto& r : rows)
        os << r.model << ',' << detail::cell(r.rho_B) << ',' << detail::cell(r.r_tight) << ','
           << detail::cell(r.rho_C) << ',' << detail::cell(r.rho_EKM) << ',' << detail::cell(r.rho_EKM_sharp) << '\n';
}

} // namespace srtight
