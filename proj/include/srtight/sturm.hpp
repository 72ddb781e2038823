/**
 * @file sturm.hpp
 * @brief u'' + q u = 0 with q = -3/(4t^2) + qt(t): the solution vanishing at
 *        t = 0 (u ~ t^{3/2}), its zeros, Sturm-Picone interlacing, and the
 *        closed-form radius r_*(k1, k2) for qt = k1 t + k2 t^2.
 */
#pragma once

#include "srtight/bounds.hpp"
#include "srtight/errors.hpp"
#include "srtight/jacobi.hpp"
#include "srtight/ode.hpp"
#include "srtight/roots.hpp"
#include "srtight/spline.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

namespace srtight {

/// q(t) = -3/(4t^2) + regular(t).
struct SingularPotential {
    std::function<double(double)> regular;
    double operator()(double t) const { return -0.75 / (t * t) + regular(t); }
};

struct SturmOptions {
    double eps = 1e-6;  ///< seed point u(eps) = eps^{3/2}, u'(eps) = 3/2 eps^{1/2}
    double rtol = 1e-12;
    double max_step = 0.02;
};

namespace detail {

inline Dopri5 sturm_integrator(const SingularPotential& q, const SturmOptions& o) {
    IntegratorConfig cfg;
    cfg.rtol = o.rtol;
    cfg.atol = 1e-30; // u starts at eps^{3/2}; only relative accuracy is meaningful
    cfg.max_step = o.max_step;
    cfg.max_steps = 2'000'000;
    return Dopri5(2, [q](double t, const double* y, double* dy) {
        dy[0] = y[1];
        dy[1] = -q(t) * y[0];
    }, cfg);
}

/// Zeros of the solution through (t0, y0) on (t0, T], each refined by
/// re-integrating from the bracketing step.
inline std::vector<double> zeros_from(const SingularPotential& q, double t0, std::vector<double> y0, double T,
                                      const SturmOptions& o, std::size_t max_zeros) {
    std::vector<double> zeros;
    if (!(T > t0)) return zeros;
    Dopri5 ode = sturm_integrator(q, o);
    double tp = t0;
    std::vector<double> yp = y0;
    auto value_at = [&](double t) {
        if (t == tp) return yp[0];
        std::vector<double> y = yp;
        Dopri5 fine = sturm_integrator(q, o);
        fine.integrate(tp, y, t);
        return y[0];
    };
    auto on_step = [&](double t, const std::vector<double>& y, const std::vector<double>&) {
        if (yp[0] != 0.0 && (y[0] == 0.0 || (y[0] < 0) != (yp[0] < 0))) {
            zeros.push_back(refine_root(value_at, tp, t, 1e-13));
            if (zeros.size() >= max_zeros) return false;
        }
        tp = t;
        yp = y;
        return true;
    };
    std::vector<double> y = y0;
    ode.integrate(t0, y, T, {}, on_step);
    return zeros;
}

} // namespace detail

/// Zeros on (0, T] of the solution with u(0) = 0, seeded at eps.
inline std::vector<double> singular_zeros(const SingularPotential& q, double T, const SturmOptions& o = {},
                                          std::size_t max_zeros = 1000) {
    const double e = o.eps;
    return detail::zeros_from(q, e, {std::pow(e, 1.5), 1.5 * std::sqrt(e)}, T, o, max_zeros);
}

/// First zero t* of the u(0) = 0 solution, or not found up to T.
inline RadiusResult singular_first_zero(const SingularPotential& q, double T, const SturmOptions& o = {}) {
    RadiusResult res;
    res.horizon = T;
    const auto z = singular_zeros(q, T, o, 1);
    if (!z.empty()) res.r = z.front();
    return res;
}

/// Wronskian drift max |W(t) - W(t0)| of the two solutions seeded as t^{3/2}
/// and t^{-1/2} at t0, relative to |W(t0)|.
inline double wronskian_drift(const SingularPotential& q, double t0, double T, const SturmOptions& o = {}) {
    IntegratorConfig cfg;
    cfg.rtol = o.rtol;
    cfg.atol = 1e-30;
    cfg.max_step = o.max_step;
    Dopri5 ode(4, [q](double t, const double* y, double* dy) {
        const double qt = q(t);
        dy[0] = y[1];
        dy[1] = -qt * y[0];
        dy[2] = y[3];
        dy[3] = -qt * y[2];
    }, cfg);
    std::vector<double> y{std::pow(t0, 1.5), 1.5 * std::sqrt(t0), 1.0 / std::sqrt(t0), -0.5 / std::pow(t0, 1.5)};
    const double W0 = y[0] * y[3] - y[1] * y[2];
    double drift = 0;
    ode.integrate(t0, y, T, {}, [&](double, const std::vector<double>& yy, const std::vector<double>&) {
        drift = std::max(drift, std::abs(yy[0] * yy[3] - yy[1] * yy[2] - W0));
        return true;
    });
    return drift / std::abs(W0);
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// J_nu(x) by its ascending series (30 terms; accurate to ~1e-14 for x <= 8).
inline double bessel_j_series(double nu, double x, int terms = 30) {
    const double h = 0.5 * x;
    double term = std::pow(h, nu) / std::tgamma(nu + 1);
    double sum = term;
    for (int m = 1; m < terms; ++m) {
        term *= -h * h / (m * (m + nu));
        sum += term;
    }
    return sum;
}

/// First positive zero of J_{2/3}, bracketed in [2, 5].
inline double bessel_j23_root() {
    static const double root = refine_root([](double x) { return bessel_j_series(2.0 / 3.0, x); }, 2.0, 5.0, 1e-14);
    return root;
}

/// Radius below which the comparison solution for S/2 = -3/(4r^2) + k1 r + k2 r^2
/// cannot vanish.
inline double r_star(double k1, double k2) {
    constexpr double pi = std::numbers::pi;
    if (k1 > 0 && k2 > 0) return (-k1 + std::sqrt(8 * pi * std::pow(k2, 1.5) + k1 * k1)) / (2 * k2);
    if (k2 > 0) return std::sqrt(2 * pi) / std::pow(k2, 0.25);
    if (k1 > 0) return std::pow(1.5 * bessel_j23_root(), 2.0 / 3.0) / std::cbrt(k1);
    return INFINITY;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

struct InterlaceReport {
    bool dominated = true;      ///< q <= qbar held on the validation grid
    bool ok = true;             ///< no violation found
    std::vector<double> zeros_q, zeros_qbar;
    std::optional<std::pair<double, double>> counterexample; ///< zeros of u with no zero of ubar between
};

/// Between consecutive zeros of the q-solution (counting t = 0) lies a zero of
/// the qbar-solution when q <= qbar.
inline InterlaceReport sturm_interlace_check(const SingularPotential& q, const SingularPotential& qbar, double T,
                                             const SturmOptions& o = {}) {
    InterlaceReport rep;
    for (int i = 1; i <= 400; ++i) {
        const double t = T * i / 400.0;
        if (q.regular(t) > qbar.regular(t) + 1e-12 * (1 + std::abs(qbar.regular(t)))) rep.dominated = false;
    }
    rep.zeros_q = singular_zeros(q, T, o);
    rep.zeros_qbar = singular_zeros(qbar, T, o);
    double prev = 0.0;
    for (double zq : rep.zeros_q) {
        bool found = false;
        for (double zb : rep.zeros_qbar) found = found || (zb > prev && zb <= zq + 1e-9);
        if (!found) {
            rep.ok = false;
            rep.counterexample = std::make_pair(prev, zq);
            break;
        }
        prev = zq;
    }
    return rep;
}

/// q = S/2 from a Schwarzian sample; the regular part S_reg/2 is splined in t.
inline SingularPotential schwarzian_to_potential(const SchwarzianSample& s) {
    std::vector<double> t{0.0}, v{0.0}; // S_reg(0) = 0
    for (std::size_t i = 0; i < s.r.size(); ++i)
        if (s.r[i] > t.back() + 1e-12) {
            t.push_back(s.r[i]);
            v.push_back(0.5 * s.S_reg[i]);
        }
    auto sp = std::make_shared<CubicSpline>(t, v);
    return {[sp](double x) { return (*sp)(x); }};
}

/// Comparison potential of a Schwarzian bound.
inline SingularPotential comparison_potential(double k1, double k2) {
    return {[k1, k2](double t) { return k1 * t + k2 * t * t; }};
}

} // namespace srtight
