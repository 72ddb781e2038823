/**
 * @file curvature.hpp
 * @brief Canonical-curvature route to a tightness bound: the fourth-order
 *        Cauchy problem for x0 = <F^c(r), E_a(0)>, the Riccati majorant
 *        u' = A u^2 + C u + 1 and its blow-up time tau(A, C).
 */
#pragma once

#include "srtight/bounds.hpp"
#include "srtight/chebyshev.hpp"
#include "srtight/errors.hpp"
#include "srtight/ode.hpp"
#include "srtight/roots.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace srtight {

/// R_a(r), R_c(r) along one unit geodesic.
struct CurvatureProfile {
    std::function<double(double)> Ra, Rc;
    std::string name;
};

inline CurvatureProfile constant_curvatures(double ra, double rc) {
    return {[ra](double) { return ra; }, [rc](double) { return rc; },
            "const[" + std::to_string(ra) + "," + std::to_string(rc) + "]"};
}

/// K-contact structures with h0 = 0 and 2H = 1: R_a = kappa, R_c = 0.
inline CurvatureProfile kcontact_curvatures(double kappa) {
    auto p = constant_curvatures(kappa, 0.0);
    p.name = "kcontact[" + std::to_string(kappa) + "]";
    return p;
}

/// Solution of x0' = x1, x1' = x2, x2' = x3 - R_a x1, x3' = R_c x0 with
/// x(0) = (0, 0, 1, 0), held as Chebyshev panels.
class Jacobi4Solution {
public:
    double r_end = 0.0;
    std::optional<double> first_zero_x0; ///< first r > 0 with x0 = 0, tangential touches included
    std::optional<double> first_zero_x2;

    double x(int component, double r) const {
        const Panel& P = panel_for(r);
        return P.cheb.eval(P.x[static_cast<std::size_t>(component)], r);
    }
    double x0(double r) const { return x(0, r); }
    double x2(double r) const { return x(2, r); }

    struct Panel {
        ChebyshevPanel cheb;
        std::array<std::vector<double>, 4> x;
    };
    std::vector<Panel> panels;
    double panel_width = 0.125;

private:
    const Panel& panel_for(double r) const {
        const double u = std::floor(r / panel_width);
        std::size_t k = u <= 0 ? 0 : static_cast<std::size_t>(u);
        return panels[std::min(k, panels.size() - 1)];
    }
};

namespace detail {

/// First zero on (r_min, r_end] of a component: sign change or a local
/// minimum of |x| that touches zero (relative to the running scale).
inline std::optional<double> first_zero(const Jacobi4Solution& s, int comp, double r_min) {
    constexpr int per_unit = 256;
    const auto n = static_cast<std::size_t>(std::floor(s.r_end * per_unit));
    auto f = [&](double r) { return s.x(comp, r); };
    double scale = 1.0;
    std::vector<double> r(n + 1), v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        r[i] = std::min(s.r_end, static_cast<double>(i) / per_unit);
        v[i] = f(r[i]);
    }
    for (std::size_t i = 1; i <= n; ++i) {
        scale = std::max(scale, std::abs(v[i]));
        if (r[i] <= r_min) continue;
        if (v[i - 1] != 0.0 && (v[i] == 0.0 || (v[i] < 0) != (v[i - 1] < 0))) return refine_root(f, r[i - 1], r[i], 1e-13);
        if (i + 1 <= n && std::abs(v[i]) <= std::abs(v[i - 1]) && std::abs(v[i]) <= std::abs(v[i + 1]) &&
            std::abs(v[i]) < 1e-6 * scale) {
            const auto [xm, fm] = minimize_scalar([&](double x) { return std::abs(f(x)); }, r[i - 1], r[i + 1]);
            if (fm < 1e-9 * scale) return xm;
        }
    }
    return std::nullopt;
}

} // namespace detail

inline Jacobi4Solution solve_jacobi4(const CurvatureProfile& prof, double r_max, IntegratorConfig cfg = {},
                                     double panel_width = 0.125, int degree = 16) {
    if (!(r_max > 0)) throw Error(ErrorKind::InvalidInput, "r_max must be positive");
    const auto n_panels = static_cast<std::size_t>(std::ceil(r_max / panel_width - 1e-9));
    std::vector<ChebyshevPanel> cheb;
    std::vector<double> stops;
    for (std::size_t k = 0; k < n_panels; ++k) {
        const double a = static_cast<double>(k) * panel_width;
        cheb.emplace_back(a, std::min(r_max, a + panel_width), degree);
        const auto& x = cheb.back().nodes();
        for (int i = k == 0 ? 0 : 1; i <= degree; ++i) stops.push_back(x[static_cast<std::size_t>(i)]);
    }
    cfg.dense = false;
    Dopri5 ode(4, [&prof](double r, const double* x, double* dx) {
        dx[0] = x[1];
        dx[1] = x[2];
        dx[2] = x[3] - prof.Ra(r) * x[1];
        dx[3] = prof.Rc(r) * x[0];
    }, cfg);
    std::vector<std::array<double, 4>> nodal;
    std::vector<double> y{0.0, 0.0, 1.0, 0.0};
    ode.integrate(0.0, y, r_max, stops, {}, [&](std::size_t, double, const std::vector<double>& yy) {
        for (double c : yy)
            if (!std::isfinite(c)) throw Error(ErrorKind::StepFailure, "non-finite solution");
        nodal.push_back({yy[0], yy[1], yy[2], yy[3]});
    });

    Jacobi4Solution sol;
    sol.panel_width = panel_width;
    for (std::size_t k = 0; k < n_panels; ++k) {
        Jacobi4Solution::Panel P;
        P.cheb = cheb[k];
        for (int c = 0; c < 4; ++c)
            for (int i = 0; i <= degree; ++i)
                P.x[static_cast<std::size_t>(c)].push_back(nodal[k * static_cast<std::size_t>(degree) + static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]);
        sol.panels.push_back(std::move(P));
    }
    sol.r_end = r_max;
    // x0 ~ r^2/2 near 0: skip the double zero at the origin
    sol.first_zero_x0 = detail::first_zero(sol, 0, 1e-3);
    sol.first_zero_x2 = detail::first_zero(sol, 2, 0.0);
    return sol;
}

// ---------------------------------------------------------------------------
// tau(A, C)
// ---------------------------------------------------------------------------

/// Integral of 1/(A u^2 + C u + 1) over [0, inf) in closed form (A, C > 0).
inline double tau_AC(double A, double C) {
    if (!(A > 0 && C > 0)) throw Error(ErrorKind::InvalidInput, "tau(A, C) needs A, C > 0");
    const double disc = C * C - 4 * A;
    if (disc < 0) {
        const double w = std::sqrt(-disc);
        return 2 / w * (std::numbers::pi / 2 - std::atan(C / w));
    }
    if (disc == 0) return 2 / C;
    // both roots negative: log of their ratio
    const double w = std::sqrt(disc);
    return std::log((C + w) / (C - w)) / w;
}

/// Same integral by adaptive Gauss-Kronrod after u = s/(1 - s); the
/// integrand becomes 1/(A s^2 + C s (1 - s) + (1 - s)^2), smooth on [0, 1].
inline double tau_AC_quadrature(double A, double C) {
    auto g = [A, C](double s) { return 1.0 / (A * s * s + C * s * (1 - s) + (1 - s) * (1 - s)); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 15, 1e-14);
}

/// Blow-up time of u' = A u^2 + C u + 1, u(0) = 0, by integrating until
/// u > 1e8 and adding the tail 1/(A u).
inline double riccati_blowup(double A, double C, double u_cap = 1e8) {
    if (!(A > 0 && C > 0)) throw Error(ErrorKind::InvalidInput, "riccati_blowup needs A, C > 0");
    IntegratorConfig cfg;
    cfg.rtol = 1e-13;
    cfg.atol = 1e-14;
    cfg.max_step = 0.01;
    cfg.dense = false;
    Dopri5 ode(1, [A, C](double, const double* u, double* du) { du[0] = A * u[0] * u[0] + C * u[0] + 1; }, cfg);
    std::vector<double> u{0.0};
    double t_hit = 0, u_hit = 0;
    ode.integrate(0.0, u, 1e6, {}, [&](double t, const std::vector<double>& y, const std::vector<double>&) {
        t_hit = t;
        u_hit = y[0];
        return !(y[0] > u_cap);
    });
    if (!(u_hit > u_cap)) throw Error(ErrorKind::StepFailure, "no blow-up before t = 1e6");
    return t_hit + 1.0 / (A * u_hit);
}

/// A = sup sqrt(1 + R_a^2), C = sup sqrt(1 + R_c^2) over profiles and [r_lo, r_hi].
inline BoundFit curvature_bound_from_profiles(const std::vector<CurvatureProfile>& profiles, double r_lo, double r_hi,
                                              int samples = 1001) {
    if (profiles.empty()) throw Error(ErrorKind::InvalidInput, "no curvature profiles");
    double A = 1.0, C = 1.0;
    for (const auto& p : profiles)
        for (int i = 0; i < samples; ++i) {
            const double r = samples == 1 ? r_lo : r_lo + (r_hi - r_lo) * i / (samples - 1);
            A = std::max(A, std::hypot(1.0, p.Ra(r)));
            C = std::max(C, std::hypot(1.0, p.Rc(r)));
        }
    BoundFit b = curvature_bound(A, C);
    b.r_lo = r_lo;
    b.r_hi = r_hi;
    b.samples = profiles.size();
    b.points = static_cast<std::size_t>(samples);
    return b;
}

} // namespace srtight
