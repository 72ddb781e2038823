/**
 * @file jacobi.hpp
 * @brief Contact Jacobi curves along geodesics leaving a Reeb orbit: the
 *        pulled-back contact form w = (w_theta, w_z), its unwrapped angle phi,
 *        first singular and focal radii, and two Schwarzian evaluations.
 *
 * Along the variational flow, w(V) = nu0(dq) for V = (dq, dp). With
 * y = F^{-1} dq and h = F^T p, the normalization c12^0 = -1 gives
 *   w' = h1 y2 - h2 y1,
 * and w'' follows by differentiating once more along the flow, so the
 * integrator supplies w, w', w'' exactly at the panel nodes. w''' comes from
 * differentiating the Chebyshev interpolant of w''.
 */
#pragma once

#include "srtight/bounds.hpp"
#include "srtight/chebyshev.hpp"
#include "srtight/flow.hpp"
#include "srtight/jet.hpp"
#include "srtight/roots.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace srtight {

struct JacobiOptions {
    double panel_width = 0.125; ///< Chebyshev panel length in r
    int degree = 16;            ///< polynomial degree per panel
    int samples_per_unit = 2048;
    double fit_radius = 0.1;    ///< near-axis window for the Schwarzian expansion
    int fit_degree = 4;         ///< degree of f in vdot = r + r^3 f(r)
};

/// w and its first three r-derivatives, for the theta and z directions.
struct WJet {
    std::array<double, 4> th{};
    std::array<double, 4> z{};
};

namespace detail {

inline double wrap_angle(double d) {
    constexpr double pi = std::numbers::pi;
    while (d > pi) d -= 2 * pi;
    while (d <= -pi) d += 2 * pi;
    return d;
}

/// w, w', w'' of V_theta and V_z at one state of the variational flow.
inline std::array<std::array<double, 3>, 2> node_values(const FrameStructure& s, const VariationalState& v) {
    const FrameJet J = s.jet(v.x.q, 1);
    const Mat3d& F = J.F;
    const Mat3d Fi = inverse(F);
    const Vec3d& p = v.x.p;
    const Vec3d h = matTvec(F, p);
    double vel[6];
    geodesic_velocity(J, p, vel);
    Mat3d Fdot{};
    for (int c = 0; c < 3; ++c)
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < 3; ++i) Fdot[a][i] += vel[c] * J.dF[c][a][i];
    const Vec3d pdot{vel[3], vel[4], vel[5]};
    const Vec3d hdot = matTvec(Fdot, p) + matTvec(F, pdot);
    double dh[3][3] = {};
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 3; ++i)
            for (int b = 0; b < 3; ++b) dh[c][i] += p[b] * J.dF[c][b][i];

    std::array<std::array<double, 3>, 2> out{};
    for (int k = 0; k < 2; ++k) {
        const Vec6& V = k == 0 ? v.v_theta : v.v_z;
        const Vec3d dq{V[0], V[1], V[2]}, dp{V[3], V[4], V[5]};
        const Vec3d y = matvec(Fi, dq);
        Vec3d dqdot{};
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c)
                for (int i = 1; i <= 2; ++i)
                    dqdot[a] += (dh[c][i] * F[a][i] + h[i] * J.dF[c][a][i]) * dq[c] + F[c][i] * F[a][i] * dp[c];
        const Vec3d ydot = matvec(Fi, dqdot - matvec(Fdot, y));
        out[k][0] = y[0];
        out[k][1] = h[1] * y[2] - h[2] * y[1];
        out[k][2] = hdot[1] * y[2] + h[1] * ydot[2] - hdot[2] * y[1] - h[2] * ydot[1];
    }
    return out;
}

} // namespace detail

/// Sampled contact Jacobi curve of one geodesic, with a piecewise-Chebyshev
/// representation for evaluation between samples.
class JacobiTrace {
public:
    std::string structure;
    double z = 0.0, theta = 0.0;
    double r_max = 0.0;       ///< requested horizon
    double r_end = 0.0;       ///< horizon actually covered
    bool truncated = false;   ///< the geodesic left the chart domain before r_max
    JacobiOptions options;

    // uniform sample grid
    std::vector<double> r, w_theta, w_z, dw_theta, dw_z, ddw_theta, ddw_z, phi, a;

    WJet at(double t) const {
        const Panel& P = panel_for(t);
        WJet j;
        for (int d = 0; d < 4; ++d) {
            j.th[d] = P.cheb.eval(P.th[d], t);
            j.z[d] = P.cheb.eval(P.z[d], t);
        }
        return j;
    }

    double phi_at(double t) const {
        const std::size_t k = grid_index(t);
        const WJet j = at(t);
        return phi[k] + detail::wrap_angle(std::atan2(j.th[0], j.z[0]) - std::atan2(w_theta[k], w_z[k]));
    }

    /// a = w_z w_theta' - w_theta w_z', positive for small r > 0.
    double a_at(double t) const {
        const WJet j = at(t);
        return j.z[0] * j.th[1] - j.th[0] * j.z[1];
    }

    /// Grid index k with r[k] <= t < r[k+1], clamped to the grid.
    std::size_t grid_index(double t) const {
        const double u = std::floor(t * options.samples_per_unit + 1e-9);
        if (u <= 0) return 0;
        return std::min(static_cast<std::size_t>(u), r.size() - 1);
    }

    struct Panel {
        ChebyshevPanel cheb;
        std::array<std::vector<double>, 4> th, z;
    };
    std::vector<Panel> panels;

private:
    const Panel& panel_for(double t) const {
        const double u = std::floor(t / options.panel_width);
        std::size_t k = u <= 0 ? 0 : static_cast<std::size_t>(u);
        k = std::min(k, panels.size() - 1);
        while (k > 0 && t < panels[k].cheb.a()) --k;
        while (k + 1 < panels.size() && t > panels[k].cheb.b()) ++k;
        return panels[k];
    }
};

/// Traces w_theta(r) = omega(pi_* V_theta(r)) and w_z(r) = omega(pi_* V_z(r))
/// along the geodesic with initial covector at angle theta over orbit time z.
inline JacobiTrace jacobi_trace(const FrameStructure& s, const ReebOrbitSpec& orbit, double z, double theta,
                                double r_max, IntegratorConfig cfg = {}, const JacobiOptions& opt = {}) {
    if (!(r_max > 0)) throw Error(ErrorKind::InvalidInput, "r_max must be positive");
    const int N = opt.degree;
    const auto n_panels = static_cast<std::size_t>(std::ceil(r_max / opt.panel_width - 1e-9));
    std::vector<ChebyshevPanel> cheb;
    std::vector<double> stops;
    for (std::size_t k = 0; k < n_panels; ++k) {
        const double a = static_cast<double>(k) * opt.panel_width;
        const double b = std::min(r_max, a + opt.panel_width);
        cheb.emplace_back(a, b, N);
        const auto& x = cheb.back().nodes();
        for (int i = k == 0 ? 0 : 1; i <= N; ++i) stops.push_back(x[static_cast<std::size_t>(i)]);
    }
    cfg.dense = false;
    const VariationalState v0 = initial_variation(s, orbit, z, theta);
    const auto traj = integrate_variational(s, v0, r_max, cfg, stops);

    JacobiTrace t;
    t.structure = s.name;
    t.z = z;
    t.theta = theta;
    t.r_max = r_max;
    t.options = opt;
    const std::size_t recorded = traj.r.size();
    std::vector<std::array<std::array<double, 3>, 2>> vals(recorded);
    for (std::size_t i = 0; i < recorded; ++i) vals[i] = detail::node_values(s, traj.states[i]);
    for (std::size_t k = 0; k < n_panels; ++k) {
        const std::size_t first = k * static_cast<std::size_t>(N);
        if (first + static_cast<std::size_t>(N) >= recorded) break;
        JacobiTrace::Panel P;
        P.cheb = cheb[k];
        for (int d = 0; d < 3; ++d) {
            P.th[d].resize(N + 1);
            P.z[d].resize(N + 1);
            for (int i = 0; i <= N; ++i) {
                P.th[d][i] = vals[first + i][0][d];
                P.z[d][i] = vals[first + i][1][d];
            }
        }
        P.th[3] = P.cheb.differentiate(P.th[2]);
        P.z[3] = P.cheb.differentiate(P.z[2]);
        t.panels.push_back(std::move(P));
    }
    if (t.panels.empty()) throw Error(ErrorKind::DomainExit, "geodesic left the domain within the first panel", 0.0);
    t.r_end = t.panels.back().cheb.b();
    t.truncated = t.r_end < r_max - 1e-12;

    const double du = 1.0 / opt.samples_per_unit;
    const auto n = static_cast<std::size_t>(std::floor(t.r_end * opt.samples_per_unit + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
        const double rk = static_cast<double>(k) * du;
        const WJet j = t.at(rk);
        t.r.push_back(rk);
        t.w_theta.push_back(j.th[0]);
        t.w_z.push_back(j.z[0]);
        t.dw_theta.push_back(j.th[1]);
        t.dw_z.push_back(j.z[1]);
        t.ddw_theta.push_back(j.th[2]);
        t.ddw_z.push_back(j.z[2]);
        t.a.push_back(j.z[0] * j.th[1] - j.th[0] * j.z[1]);
        const double ang = std::atan2(j.th[0], j.z[0]);
        t.phi.push_back(k == 0 ? ang : t.phi.back() + detail::wrap_angle(ang - std::atan2(t.w_theta[k - 1], t.w_z[k - 1])));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Radii
// ---------------------------------------------------------------------------

/// A radius that may not exist before the horizon.
struct RadiusResult {
    std::optional<double> r;
    double horizon = 0.0;
    bool found() const { return r.has_value(); }
    double value_or_inf() const { return r ? *r : INFINITY; }
};

/// Crossings of phi through k*pi (k != 0), in increasing r.
struct PhiCrossing {
    double r;
    int k;
};

inline std::vector<PhiCrossing> phi_crossings(const JacobiTrace& t) {
    std::vector<PhiCrossing> out;
    constexpr double pi = std::numbers::pi;
    for (std::size_t i = 1; i < t.r.size(); ++i) {
        const double lo = std::min(t.phi[i - 1], t.phi[i]), hi = std::max(t.phi[i - 1], t.phi[i]);
        for (long k = static_cast<long>(std::floor(lo / pi)) + 1; k * pi <= hi; ++k) {
            if (k == 0) continue;
            const double level = static_cast<double>(k) * pi;
            if (!(t.phi[i - 1] < level && t.phi[i] >= level) && !(t.phi[i - 1] > level && t.phi[i] <= level))
                continue;
            const std::size_t base = i - 1;
            auto g = [&](double x) {
                const WJet j = t.at(x);
                return t.phi[base] +
                       detail::wrap_angle(std::atan2(j.th[0], j.z[0]) - std::atan2(t.w_theta[base], t.w_z[base])) -
                       level;
            };
            out.push_back({refine_root(g, t.r[i - 1], t.r[i]), static_cast<int>(k)});
        }
    }
    return out;
}

/// First r > 0 with phi(r) = pi, i.e. the first return of the Jacobi curve.
inline RadiusResult first_singular_radius(const JacobiTrace& t) {
    RadiusResult res;
    res.horizon = t.r_end;
    for (const auto& c : phi_crossings(t))
        if (c.k == 1) {
            res.r = c.r;
            break;
        }
    return res;
}

struct FocalRadius {
    double r = 0.0;
    int order = 1; ///< observed vanishing order of a(r), capped at 3
};

namespace detail {

inline int vanishing_order(const JacobiTrace& t, double r0) {
    const WJet j = t.at(r0);
    const double a1 = j.z[0] * j.th[2] - j.th[0] * j.z[2];
    const double a2 = j.z[1] * j.th[2] + j.z[0] * j.th[3] - j.th[1] * j.z[2] - j.th[0] * j.z[3];
    const double scale = 1.0 + std::abs(j.th[0]) + std::abs(j.z[0]);
    if (std::abs(a1) > 1e-6 * scale) return 1;
    if (std::abs(a2) > 1e-5 * scale) return 2;
    return 3;
}

} // namespace detail

/// Zeros of a(r) on (0, r_end]: sign changes and tangential zeros.
inline std::vector<FocalRadius> focal_radii(const JacobiTrace& t) {
    std::vector<FocalRadius> out;
    const std::size_t n = t.r.size();
    double scale = 0;
    for (double v : t.a) scale = std::max(scale, std::abs(v));
    scale = std::max(scale, 1.0);
    auto f = [&](double x) { return t.a_at(x); };
    for (std::size_t i = 2; i < n; ++i) {
        const double a0 = t.a[i - 1], a1 = t.a[i];
        if (a1 == 0.0 || (a0 < 0) != (a1 < 0)) {
            if (a0 == 0.0) continue;
            const double r0 = refine_root(f, t.r[i - 1], t.r[i]);
            out.push_back({r0, detail::vanishing_order(t, r0)});
            continue;
        }
        // tangential zero: local minimum of |a| that touches zero
        if (i + 1 < n && std::abs(a1) <= std::abs(a0) && std::abs(a1) <= std::abs(t.a[i + 1]) &&
            std::abs(a1) < 1e-6 * scale) {
            const auto [xm, fm] = minimize_scalar([&](double x) { return std::abs(t.a_at(x)); }, t.r[i - 1], t.r[i + 1]);
            if (fm < 1e-9 * scale) out.push_back({xm, detail::vanishing_order(t, xm)});
        }
    }
    return out;
}

inline RadiusResult first_focal_radius(const JacobiTrace& t) {
    RadiusResult res;
    res.horizon = t.r_end;
    const auto f = focal_radii(t);
    if (!f.empty()) res.r = f.front().r;
    return res;
}

// ---------------------------------------------------------------------------
// Initial jet
// ---------------------------------------------------------------------------

struct JetReport {
    /// (w_theta, w_theta', w_theta'', w_theta''', w_z, w_z') at r = 0
    std::array<double, 6> measured{};
    std::array<double, 6> expected{0, 0, 1, 0, 1, 0};
    std::array<double, 6> fitted{}; ///< same jet from a least-squares polynomial fit on (0, fit_radius]
    double max_deviation = 0.0;
    double fit_max_deviation = 0.0;
};

inline JetReport check_initial_jet(const JacobiTrace& t) {
    JetReport rep;
    const WJet j = t.at(0.0);
    rep.measured = {j.th[0], j.th[1], j.th[2], j.th[3], j.z[0], j.z[1]};
    // independent route: polynomial fit of degree 6 to the samples on (0, R]
    const double R = t.options.fit_radius;
    std::vector<std::size_t> idx;
    for (std::size_t k = 1; k < t.r.size() && t.r[k] <= R + 1e-12; ++k) idx.push_back(k);
    constexpr int deg = 6;
    if (idx.size() > 2 * deg) {
        Eigen::MatrixXd A(idx.size(), deg + 1);
        Eigen::VectorXd bt(idx.size()), bz(idx.size());
        for (std::size_t m = 0; m < idx.size(); ++m) {
            const double u = t.r[idx[m]] / R;
            double p = 1;
            for (int c = 0; c <= deg; ++c, p *= u) A(static_cast<Eigen::Index>(m), c) = p;
            bt(static_cast<Eigen::Index>(m)) = t.w_theta[idx[m]];
            bz(static_cast<Eigen::Index>(m)) = t.w_z[idx[m]];
        }
        const auto qr = A.householderQr();
        const Eigen::VectorXd ct = qr.solve(bt), cz = qr.solve(bz);
        rep.fitted = {ct(0), ct(1) / R, 2 * ct(2) / (R * R), 6 * ct(3) / (R * R * R), cz(0), cz(1) / R};
    }
    for (int i = 0; i < 6; ++i) {
        rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.measured[i] - rep.expected[i]));
        rep.fit_max_deviation = std::max(rep.fit_max_deviation, std::abs(rep.fitted[i] - rep.expected[i]));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Schwarzian derivative
// ---------------------------------------------------------------------------

/// S(v) = v'''/v' - 3/2 (v''/v')^2 from a third-order Taylor series of v.
inline double schwarzian_of(const Taylor<4>& v) {
    const double v1 = v.deriv(1), v2 = v.deriv(2), v3 = v.deriv(3);
    return v3 / v1 - 1.5 * (v2 / v1) * (v2 / v1);
}

inline Taylor<4> taylor_of(const std::array<double, 4>& d) {
    Taylor<4> t;
    t.c = {d[0], d[1], d[2] / 2, d[3] / 6};
    return t;
}

/// Homogeneous coordinate with the larger denominator: w_theta/w_z or -w_z/w_theta.
inline Taylor<4> projective_coordinate(const WJet& j) {
    const Taylor<4> th = taylor_of(j.th), zz = taylor_of(j.z);
    if (std::abs(j.z[0]) >= std::abs(j.th[0])) return th / zz;
    return -1.0 * (zz / th);
}

struct SchwarzianSample {
    double z = 0.0, theta = 0.0;
    std::vector<double> r;
    std::vector<double> S;     ///< S(Omega)(r)
    std::vector<double> S_reg; ///< S + 3/(2 r^2)
};

/// vdot = r + r^3 f(r) fitted on (0, R]; gives the regular part of S near r = 0.
struct NearAxisExpansion {
    double R = 0.1;
    std::vector<double> f; ///< coefficients of f in powers of r

    /// S + 3/(2 r^2) from D = 1 + r^2 f:
    ///   [D (3 r f' + r^2 f'') - 3/2 r^2 (2 f + r f')^2] / D^2
    double regular_part(double r) const {
        double F = 0, F1 = 0, F2 = 0;
        for (std::size_t k = f.size(); k-- > 0;) {
            F2 = F2 * r + 2 * F1;
            F1 = F1 * r + F;
            F = F * r + f[k];
        }
        const double D = 1 + r * r * F;
        const double g = 2 * F + r * F1;
        return (D * (3 * r * F1 + r * r * F2) - 1.5 * r * r * g * g) / (D * D);
    }
};

inline NearAxisExpansion fit_near_axis(const JacobiTrace& t) {
    NearAxisExpansion e;
    e.R = t.options.fit_radius;
    const int m = t.options.fit_degree;
    std::vector<std::size_t> idx;
    for (std::size_t k = 1; k < t.r.size() && t.r[k] <= e.R + 1e-12; ++k) idx.push_back(k);
    if (idx.size() <= static_cast<std::size_t>(2 * (m + 1)))
        throw Error(ErrorKind::InvalidInput, "trace too coarse for the near-axis Schwarzian fit");
    Eigen::MatrixXd A(idx.size(), m + 1);
    Eigen::VectorXd b(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double r = t.r[idx[i]], u = r / e.R;
        const WJet j = t.at(r);
        const double vdot = projective_coordinate(j).deriv(1);
        double p = u * u * u;
        for (int c = 0; c <= m; ++c, p *= u) A(static_cast<Eigen::Index>(i), c) = p;
        b(static_cast<Eigen::Index>(i)) = (vdot - r) / (e.R * e.R * e.R);
    }
    const Eigen::VectorXd g = A.householderQr().solve(b);
    e.f.resize(static_cast<std::size_t>(m + 1));
    for (int c = 0; c <= m; ++c) e.f[static_cast<std::size_t>(c)] = g(c) / std::pow(e.R, c);
    return e;
}

namespace detail {

inline std::vector<double> window_radii(const JacobiTrace& t, double r_lo, double r_hi, int stride,
                                        const std::vector<FocalRadius>& focal, double exclusion) {
    std::vector<double> out;
    stride = std::max(stride, 1);
    for (std::size_t k = 1; k < t.r.size(); k += static_cast<std::size_t>(stride)) {
        const double r = t.r[k];
        if (r < r_lo - 1e-12 || r > r_hi + 1e-12) continue;
        bool near = false;
        for (const auto& f : focal) near = near || std::abs(r - f.r) < exclusion;
        if (!near) out.push_back(r);
    }
    return out;
}

inline void require_immersion(const JacobiTrace& t, double r) {
    if (std::abs(t.a_at(r)) < 1e-10)
        throw Error(ErrorKind::ImmersionFailure, "Jacobi curve not immersed away from focal radii", r);
}

} // namespace detail

/// S from the homogeneous coordinate; within the near-axis window the regular
/// part comes from the fitted expansion instead of raw division.
inline SchwarzianSample schwarzian_numeric(const JacobiTrace& t, double r_lo, double r_hi, int stride = 16,
                                           double focal_exclusion = 0.02) {
    SchwarzianSample out;
    out.z = t.z;
    out.theta = t.theta;
    const auto focal = focal_radii(t);
    std::optional<NearAxisExpansion> near;
    for (double r : detail::window_radii(t, r_lo, r_hi, stride, focal, focal_exclusion)) {
        double reg;
        if (r <= t.options.fit_radius) {
            if (!near) near = fit_near_axis(t);
            reg = near->regular_part(r);
        } else {
            detail::require_immersion(t, r);
            reg = schwarzian_of(projective_coordinate(t.at(r))) + 1.5 / (r * r);
        }
        out.r.push_back(r);
        out.S_reg.push_back(reg);
        out.S.push_back(reg - 1.5 / (r * r));
    }
    return out;
}

/// A = (1/a) omega ^ omega''(d_theta, d_z), B = -(1/a) omega' ^ omega''(d_theta, d_z).
struct FrameTerms {
    double a = 0.0, A = 0.0, B = 0.0, Adot = 0.0;
};

inline FrameTerms schwarzian_frame_terms(const WJet& j) {
    FrameTerms ft;
    ft.a = j.z[0] * j.th[1] - j.th[0] * j.z[1];
    const double num = j.th[0] * j.z[2] - j.z[0] * j.th[2];
    const double num_dot = j.th[1] * j.z[2] + j.th[0] * j.z[3] - j.z[1] * j.th[2] - j.z[0] * j.th[3];
    ft.A = num / ft.a;
    ft.B = -(j.th[1] * j.z[2] - j.z[1] * j.th[2]) / ft.a;
    // a' = -num, so A' = (num' a + num^2) / a^2
    ft.Adot = (num_dot * ft.a + num * num) / (ft.a * ft.a);
    return ft;
}

/// S/2 = B - A'/2 - A^2/4, evaluated directly at every radius.
inline SchwarzianSample schwarzian_frame_formula(const JacobiTrace& t, double r_lo, double r_hi, int stride = 16,
                                                 double focal_exclusion = 0.02) {
    SchwarzianSample out;
    out.z = t.z;
    out.theta = t.theta;
    const auto focal = focal_radii(t);
    for (double r : detail::window_radii(t, r_lo, r_hi, stride, focal, focal_exclusion)) {
        detail::require_immersion(t, r);
        const FrameTerms ft = schwarzian_frame_terms(t.at(r));
        const double S = 2 * (ft.B - 0.5 * ft.Adot - 0.25 * ft.A * ft.A);
        out.r.push_back(r);
        out.S.push_back(S);
        out.S_reg.push_back(S + 1.5 / (r * r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Schwarzian bound
// ---------------------------------------------------------------------------

namespace detail {

/// Smallest sum_i (k1 r_i + k2 r_i^2) with k1 r_i + k2 r_i^2 >= d_i for all i,
/// by enumerating the vertices of the feasible polygon.
inline std::array<double, 2> majorant_lp(const std::vector<double>& r, const std::vector<double>& d) {
    const std::size_t n = r.size();
    if (n < 2) throw Error(ErrorKind::InvalidInput, "need at least two radii for a Schwarzian bound");
    double s1 = 0, s2 = 0;
    for (double x : r) {
        s1 += x;
        s2 += x * x;
    }
    double best = INFINITY;
    std::array<double, 2> k{NAN, NAN};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double det = r[i] * r[j] * (r[j] - r[i]);
            if (std::abs(det) < 1e-300) continue;
            const double k1 = (d[i] * r[j] * r[j] - d[j] * r[i] * r[i]) / det;
            const double k2 = (r[i] * d[j] - r[j] * d[i]) / det;
            const double obj = k1 * s1 + k2 * s2;
            if (obj > best + 1e-14 * (1 + std::abs(best))) continue;
            bool ok = true;
            for (std::size_t m = 0; m < n && ok; ++m)
                ok = k1 * r[m] + k2 * r[m] * r[m] >= d[m] - 1e-12 * (1 + std::abs(d[m]));
            if (!ok) continue;
            const bool tie = std::isfinite(best) && std::abs(obj - best) <= 1e-14 * (1 + std::abs(best));
            if (!tie && obj < best) {
                best = obj;
                k = {k1, k2};
            } else if (tie && (k2 < k[1] || (k2 == k[1] && k1 < k[0]))) {
                k = {k1, k2};
            }
        }
    return k;
}

} // namespace detail

/// Pair (k1, k2) with S/2 <= -3/(4r^2) + k1 r + k2 r^2 on [r_lo, r_hi] for every
/// sample: per sample the majorant of least total excess over the sample radii,
/// then the componentwise maximum over samples. |k| below `snap` is set to 0.
inline BoundFit fit_schwarzian_bound(const std::vector<SchwarzianSample>& samples, double r_lo, double r_hi,
                                     double snap = 1e-6) {
    BoundFit fit;
    fit.r_lo = r_lo;
    fit.r_hi = r_hi;
    fit.k1 = -INFINITY;
    fit.k2 = -INFINITY;
    for (const auto& s : samples) {
        std::vector<double> r, d;
        for (std::size_t i = 0; i < s.r.size(); ++i)
            if (s.r[i] >= r_lo - 1e-12 && s.r[i] <= r_hi + 1e-12 && std::isfinite(s.S_reg[i])) {
                r.push_back(s.r[i]);
                d.push_back(0.5 * s.S_reg[i]);
            }
        const auto k = detail::majorant_lp(r, d);
        fit.k1 = std::max(fit.k1, k[0]);
        fit.k2 = std::max(fit.k2, k[1]);
        fit.points = std::max(fit.points, r.size());
        ++fit.samples;
    }
    if (samples.empty()) throw Error(ErrorKind::InvalidInput, "no Schwarzian samples to fit");
    if (std::abs(fit.k1) < snap) fit.k1 = 0.0;
    if (std::abs(fit.k2) < snap) fit.k2 = 0.0;
    return fit;
}

/// CSV with columns r,w_theta,w_z,phi,a,S,S_reg on every `stride`-th sample.
inline void write_trace_csv(std::ostream& os, const JacobiTrace& t, int stride = 1) {
    os << "r,w_theta,w_z,phi,a,S,S_reg\n";
    os.precision(12);
    std::optional<NearAxisExpansion> near;
    try {
        near = fit_near_axis(t);
    } catch (const Error&) {
    }
    for (std::size_t k = 0; k < t.r.size(); k += static_cast<std::size_t>(std::max(stride, 1))) {
        const double r = t.r[k];
        double reg = NAN;
        if (r <= t.options.fit_radius) {
            if (near) reg = near->regular_part(r);
        } else {
            reg = schwarzian_of(projective_coordinate(t.at(r))) + 1.5 / (r * r);
        }
        const double S = r > 0 ? reg - 1.5 / (r * r) : NAN;
        os << r << ',' << t.w_theta[k] << ',' << t.w_z[k] << ',' << t.phi[k] << ',' << t.a[k] << ',' << S << ','
           << reg << '\n';
    }
}

} // namespace srtight
