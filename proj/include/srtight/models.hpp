/**
 * @file models.hpp
 * @brief Concrete structures: radial models (alpha, beta), the Heisenberg and
 *        overtwisted models, left-invariant K-contact models, the perturbed
 *        radial model and frames given by expressions.
 *
 * Radial profiles are functions of s = r^2:
 *   alpha(r) = a(s),   beta(r) = s (1/2 + s bh(s)).
 * Smoothness at the axis forces beta''(0) = 1; with that normalization r is the
 * distance to the axis and the Cartesian frame below is smooth at r = 0.
 */
#pragma once

#include "srtight/errors.hpp"
#include "srtight/expr.hpp"
#include "srtight/jet.hpp"
#include "srtight/spline.hpp"
#include "srtight/structures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace srtight {

using T4 = Taylor<4>;
using T3 = Taylor<3>;

// ---------------------------------------------------------------------------
// Radial profiles
// ---------------------------------------------------------------------------

/// a(s) and bh(s) as callables on truncated series.
struct RadialProfile {
    std::string alpha_spec, beta_spec;
    std::function<T4(const T4&)> a;
    std::function<T4(const T4&)> bh;
    double r_max = INFINITY; ///< largest radius the profile is defined for

    double alpha(double r) const { return a(T4(r * r)).c[0]; }
    double beta(double r) const {
        const double s = r * r;
        return s * (0.5 + s * bh(T4(s)).c[0]);
    }
    /// gamma/r = alpha beta'/r - beta alpha'/r, positive for a contact structure.
    double gamma_over_r(double r) const {
        const T4 A = a(T4::variable(r * r)), B = bh(T4::variable(r * r));
        const double s = r * r;
        const double b = 0.5 + s * B.c[0], bp = B.c[0] + s * B.c[1];
        return 2 * (A.c[0] * (b + s * bp) - s * A.c[1] * b);
    }
};

namespace detail {

inline std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parse, "bad number '" + item + "' in profile '" + s + "'");
        }
    }
    return out;
}

inline std::pair<std::string, std::string> split_spec(const std::string& spec) {
    const auto c = spec.find(':');
    if (c == std::string::npos) return {spec, ""};
    return {spec.substr(0, c), spec.substr(c + 1)};
}

struct Table {
    std::vector<double> r, alpha, beta;
};

inline Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open profile table '" + path + "'");
    Table t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (std::isalpha(static_cast<unsigned char>(line[0]))) continue; // header
        const auto v = parse_numbers(line);
        if (v.size() < 3) throw Error(ErrorKind::Parse, "profile table rows need r,alpha,beta");
        t.r.push_back(v[0]);
        t.alpha.push_back(v[1]);
        t.beta.push_back(v[2]);
    }
    if (t.r.size() < 4) throw Error(ErrorKind::InvalidInput, "profile table needs at least four rows");
    return t;
}

} // namespace detail

/// alpha families: poly:a0,a1,.. (powers of r^2), cos2:c = cos(c r^2/2),
/// kcos:k = cos(sqrt(k) r) (r <= pi/sqrt(k) when k > 0), table:path.csv
inline std::function<T4(const T4&)> alpha_profile(const std::string& spec, double* r_max = nullptr) {
    auto [kind, arg] = detail::split_spec(spec);
    if (kind == "poly") {
        const auto c = detail::parse_numbers(arg);
        if (c.empty()) throw Error(ErrorKind::Parse, "poly profile needs coefficients");
        return [c](const T4& s) {
            T4 r(c.back());
            for (std::size_t k = c.size() - 1; k-- > 0;) r = r * s + c[k];
            return r;
        };
    }
    if (kind == "one") return [](const T4&) { return T4(1.0); };
    if (kind == "cos2") {
        const double c = arg.empty() ? 1.0 : detail::parse_numbers(arg).at(0);
        return [c](const T4& s) { return cos(s * (c / 2)); };
    }
    if (kind == "kcos") {
        const double k = detail::parse_numbers(arg).at(0);
        // the chart covers the tube up to the first conjugate radius
        if (r_max && k > 0) *r_max = std::min(*r_max, std::numbers::pi / std::sqrt(k));
        return [k](const T4& s) { return cos_sqrt(s * k); };
    }
    if (kind == "table") {
        const auto t = detail::read_table(arg);
        std::vector<double> s(t.r.size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = t.r[i] * t.r[i];
        auto sp = std::make_shared<CubicSpline>(s, t.alpha);
        if (r_max) *r_max = std::min(*r_max, t.r.back());
        return [sp](const T4& x) { return (*sp)(x); };
    }
    throw Error(ErrorKind::Parse, "unknown alpha profile '" + spec + "'");
}

/// beta families (all with beta = r^2/2 + O(r^4)): half = r^2/2,
/// poly:b1,b2,.. (powers of r^2, b1 must be 1/2), sin2:c = sin(c r^2/2)/c,
/// kvers:k = (1 - cos(sqrt(k) r))/k, table:path.csv. Returns bh(s).
inline std::function<T4(const T4&)> beta_profile(const std::string& spec, double* r_max = nullptr) {
    auto [kind, arg] = detail::split_spec(spec);
    if (kind == "half") return [](const T4&) { return T4(0.0); };
    if (kind == "poly") {
        const auto c = detail::parse_numbers(arg);
        if (c.empty() || std::abs(c[0] - 0.5) > 1e-14)
            throw Error(ErrorKind::ContactViolation,
                        "beta must be r^2/2 + O(r^4) for a smooth structure at the axis (first coefficient 1/2)");
        std::vector<double> tail(c.begin() + 1, c.end());
        if (tail.empty()) tail.push_back(0.0);
        return [tail](const T4& s) {
            T4 r(tail.back());
            for (std::size_t k = tail.size() - 1; k-- > 0;) r = r * s + tail[k];
            return r;
        };
    }
    if (kind == "sin2") {
        const double c = arg.empty() ? 1.0 : detail::parse_numbers(arg).at(0);
        // bh = (sin(u)/u - 1)/(2 u) * (c/2) with u = c s/2, written via (u - sin u)/u^3
        return [c](const T4& s) {
            const T4 u = s * (c / 2);
            return -(c / 4) * u * sin_tail_sqrt(u * u);
        };
    }
    if (kind == "kvers") {
        const double k = detail::parse_numbers(arg).at(0);
        return [k](const T4& s) { return k * vers_sqrt_tail(s * k); };
    }
    if (kind == "table") {
        const auto t = detail::read_table(arg);
        std::vector<double> s{0.0}, b{0.5};
        for (std::size_t i = 0; i < t.r.size(); ++i) {
            if (t.r[i] <= 0) continue;
            s.push_back(t.r[i] * t.r[i]);
            b.push_back(t.beta[i] / (t.r[i] * t.r[i]));
        }
        auto sp = std::make_shared<CubicSpline>(s, b);
        if (r_max) *r_max = std::min(*r_max, t.r.back());
        return [sp](const T4& x) { return sp->divided(x); };
    }
    throw Error(ErrorKind::Parse, "unknown beta profile '" + spec + "'");
}

inline RadialProfile make_radial_profile(const std::string& alpha_spec, const std::string& beta_spec,
                                         double r_max = INFINITY) {
    RadialProfile p;
    p.alpha_spec = alpha_spec;
    p.beta_spec = beta_spec;
    p.r_max = r_max;
    p.a = alpha_profile(alpha_spec, &p.r_max);
    p.bh = beta_profile(beta_spec, &p.r_max);
    return p;
}

namespace detail {

/// Scalar functions of s needed by the radial frame, each as a series in s.
struct RadialCoefficients {
    T3 QD, Qb, Qz, Qt;
};

inline RadialCoefficients radial_coefficients(const RadialProfile& p, double s0) {
    const T4 A4 = p.a(T4::variable(s0)), B4 = p.bh(T4::variable(s0));
    auto head = [](const T4& x) {
        T3 r;
        for (int k = 0; k < 3; ++k) r.c[k] = x.c[k];
        return r;
    };
    auto dhead = [](const T4& x) {
        T3 r;
        for (int k = 0; k < 3; ++k) r.c[k] = (k + 1) * x.c[k + 1];
        return r;
    };
    const T3 a = head(A4), ap = dhead(A4), bh = head(B4), bhp = dhead(B4);
    const T3 S = T3::variable(s0);
    const T3 b = 0.5 + S * bh;
    const T3 bp = bh + S * bhp;
    const T3 G = 2.0 * (a * (b + S * bp) - S * ap * b);
    const T3 GmA_over_s = 2.0 * (a * bh + a * bp - ap * b);
    return {GmA_over_s / G, b / G, 2.0 * (b + S * bp) / G, 2.0 * ap / G};
}

inline double lift(double, const T3& q) { return q.c[0]; }
inline Jet2 lift(const Jet2& s, const T3& q) { return compose(s, D3{q.c[0], q.c[1], 2 * q.c[2], 0.0}); }

} // namespace detail

/// Smooth Cartesian frame of a radial model: (N, JN) rotated by -theta, so
/// that f1 -> d/dx and f2 -> d/dy on the axis.
inline FrameStructure radial_to_frame(const RadialProfile& p, double validate_radius = -1) {
    const double R = validate_radius > 0 ? validate_radius : (std::isfinite(p.r_max) ? p.r_max : 10.0);
    if (std::abs(p.alpha(0.0)) == 0.0) throw Error(ErrorKind::ContactViolation, "alpha(0) must be nonzero");
    for (int i = 0; i <= 400; ++i) {
        const double r = R * i / 400.0;
        const double g = p.gamma_over_r(r);
        if (!(g > 0)) {
            std::ostringstream os;
            os << "gamma/r = " << g << " <= 0 at r = " << r;
            throw Error(ErrorKind::ContactViolation, os.str(), r);
        }
    }
    auto prof = std::make_shared<RadialProfile>(p);
    auto f = [prof](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        const T& x = q[0];
        const T& y = q[1];
        const T s = x * x + y * y;
        const auto rc = detail::radial_coefficients(*prof, value_of(s));
        const T QD = detail::lift(s, rc.QD), Qb = detail::lift(s, rc.Qb), Qz = detail::lift(s, rc.Qz),
                Qt = detail::lift(s, rc.Qt);
        const T xy = QD * x * y;
        FrameT<T> F;
        F[0] = {Qt * y, -(Qt * x), Qz};
        F[1] = {1.0 - QD * y * y, xy, Qb * y};
        F[2] = {xy, 1.0 - QD * x * x, -(Qb * x)};
        return F;
    };
    return make_frame_structure("radial[" + p.alpha_spec + "," + p.beta_spec + "]", f,
                                Domain::cylinder(std::isfinite(p.r_max) ? p.r_max : INFINITY));
}

// ---------------------------------------------------------------------------
// Closed-form frames
// ---------------------------------------------------------------------------

/// f1 = dx + y/2 dz, f2 = dy - x/2 dz, f0 = dz.
inline FrameStructure heisenberg_frame() {
    auto f = [](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        FrameT<T> F;
        F[0] = {T(0.0), T(0.0), T(1.0)};
        F[1] = {T(1.0), T(0.0), q[1] * 0.5};
        F[2] = {T(0.0), T(1.0), q[0] * -0.5};
        return F;
    };
    return make_frame_structure("heisenberg", f);
}

/// Frame of the overtwisted model in cylindrical form, (d_r, (1/r)(cos(r^2/2) d_theta - sin(r^2/2) d_z)),
/// in Cartesian components. Singular on the axis; use radial_to_frame for a frame through r = 0.
inline FrameStructure overtwisted_polar_frame() {
    auto f = [](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        const T& x = q[0];
        const T& y = q[1];
        const T s = x * x + y * y;
        const T r = sqrt(s);
        const T c = cos(s * 0.5), sn = sin(s * 0.5);
        FrameT<T> F;
        F[0] = {-(sn * y), sn * x, c};
        F[1] = {x / r, y / r, T(0.0)};
        F[2] = {-(c * y) / r, c * x / r, -(sn / r)};
        return F;
    };
    Domain d = Domain::cylinder(50.0);
    return make_frame_structure("overtwisted-polar", f, d);
}

namespace detail {

// Quaternion-type products q*u for the unit vectors u = i, j, k.
// sign = +1: Hamilton quaternions (SU(2)); sign = -1: split quaternions (SL(2,R)).
template <class T>
std::array<T, 4> right_i(const std::array<T, 4>& q) {
    return {-q[1], q[0], q[3], -q[2]};
}
template <class T>
std::array<T, 4> right_j(const std::array<T, 4>& q, int sign) {
    if (sign > 0) return {-q[2], -q[3], q[0], q[1]};
    return {q[2], q[3], q[0], q[1]};
}
template <class T>
std::array<T, 4> right_k(const std::array<T, 4>& q, int sign) {
    if (sign > 0) return {-q[3], q[2], -q[1], q[0]};
    return {q[3], -q[2], -q[1], q[0]};
}

} // namespace detail

/// Left-invariant K-contact structure with [f2,f1] = f0, [f1,f0] = kappa f2,
/// [f2,f0] = -kappa f1.
///   kappa > 0: SU(2) in the stereographic chart from the pole i,
///              (X, Y, Z) = (q2, q3, q0)/(1 - q1) - (0, 0, 1).
///   kappa < 0: universal cover of SL(2,R) as unit split quaternions,
///              (X, Y, Z) = (q2, q3, arg(q0 + i q1)).
///   kappa = 0: the Heisenberg frame.
/// The Reeb orbit through the identity is the Z axis.
inline FrameStructure kcontact_frame(double kappa) {
    if (kappa == 0.0) {
        FrameStructure s = heisenberg_frame();
        s.name = "kcontact[0]";
        return s;
    }
    const double d = std::abs(kappa) / 2, c = std::sqrt(std::abs(kappa)) / 2;
    if (kappa > 0) {
        auto f = [d, c](const auto& q) {
            using T = std::decay_t<decltype(q[0])>;
            const T u = q[0], v = q[1], w = q[2] + 1.0;
            const T rho2 = u * u + v * v + w * w;
            const T den = 1.0 / (rho2 + 1.0);
            const std::array<T, 4> p{2.0 * w * den, (rho2 - 1.0) * den, 2.0 * u * den, 2.0 * v * den};
            const T om = 1.0 - p[1];
            auto push = [&](const std::array<T, 4>& t, double scale) {
                const T a = t[1] / (om * om);
                return Vec3<T>{(t[2] / om + p[2] * a) * scale, (t[3] / om + p[3] * a) * scale,
                               (t[0] / om + p[0] * a) * scale};
            };
            FrameT<T> F;
            F[0] = push(detail::right_i(p), d);
            F[1] = push(detail::right_k(p, +1), c);
            F[2] = push(detail::right_j(p, +1), c);
            return F;
        };
        std::ostringstream name;
        name << "kcontact[" << kappa << "]";
        return make_frame_structure(name.str(), f, Domain::box({-1e6, -1e6, -1e6}, {1e6, 1e6, 1e6}));
    }
    auto f = [d, c](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        const T rho2 = 1.0 + q[0] * q[0] + q[1] * q[1];
        const T rho = sqrt(rho2);
        const std::array<T, 4> p{rho * cos(q[2]), rho * sin(q[2]), q[0], q[1]};
        auto push = [&](const std::array<T, 4>& t, double scale) {
            return Vec3<T>{t[2] * scale, t[3] * scale, (p[0] * t[1] - p[1] * t[0]) / rho2 * scale};
        };
        FrameT<T> F;
        F[0] = push(detail::right_i(p), d);
        F[1] = push(detail::right_j(p, -1), c);
        F[2] = push(detail::right_k(p, -1), c);
        return F;
    };
    std::ostringstream name;
    name << "kcontact[" << kappa << "]";
    return make_frame_structure(name.str(), f);
}

/// Reeb orbit through the identity of the K-contact chart, as a function of Reeb time.
inline std::function<Vec3d(double)> kcontact_orbit(double kappa) {
    if (kappa == 0.0) return [](double z) { return Vec3d{0, 0, z}; };
    const double d = std::abs(kappa) / 2;
    if (kappa > 0)
        return [d](double z) { return Vec3d{0, 0, std::cos(z * d) / (1 - std::sin(z * d)) - 1}; };
    return [d](double z) { return Vec3d{0, 0, z * d}; };
}

/// Perturbed model: omega = sin f dtheta + cos f dz with
/// f = r^2/2 + eps r^5 cos(theta)/(1 + r^2), metric dr^2 + f_r^2 (dtheta^2 + dz^2) on ker omega.
inline FrameStructure perturbed_frame(double eps) {
    auto fr = [eps](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        const T& x = q[0];
        const T& y = q[1];
        const T s = x * x + y * y;
        const T inv1s = 1.0 / (1.0 + s);
        const T g = 0.5 + eps * s * x * inv1s;                              // f/s
        const T f = s * g;
        const T F = 1.0 + eps * x * s * (5.0 + 3.0 * s) * inv1s * inv1s;   // f_r/r
        const T f2 = f * f;
        const T sinc = sinc_sqrt(f2), vers = vers_sqrt(f2);
        const T sinf = f * sinc, cosf = cos(f);
        const T QD = (eps * x * (5.0 + 3.0 * s) * inv1s * inv1s + vers * f * g) / F;
        const T Qb = g * sinc / F;
        const T P = eps * s * y * sinf * inv1s / F;
        const T xy = QD * x * y;
        FrameT<T> Fr;
        Fr[0] = {P * x - sinf * y, P * y + sinf * x, cosf};
        Fr[1] = {1.0 - QD * y * y, xy, Qb * y};
        Fr[2] = {xy, 1.0 - QD * x * x, -(Qb * x)};
        return Fr;
    };
    std::ostringstream name;
    name << "perturbed[" << eps << "]";
    return make_frame_structure(name.str(), fr, Domain::cylinder(5.0));
}

/// Frame from nine component expressions in x, y, z (f0, f1, f2 in order).
inline FrameStructure expression_frame(const std::array<std::array<std::string, 3>, 3>& comps, Domain domain = {},
                                       std::string name = "frame") {
    auto ex = std::make_shared<std::array<std::array<Expr, 3>, 3>>();
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) (*ex)[i][a] = Expr::parse(comps[i][a]);
    auto f = [ex](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        FrameT<T> F;
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 3; ++a) F[i][a] = (*ex)[i][a](q);
        return F;
    };
    return make_frame_structure(std::move(name), f, domain);
}

} // namespace srtight
