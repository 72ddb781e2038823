/**
 * @file structures.hpp
 * @brief Contact sub-Riemannian frames on chart domains of R^3: evaluation
 *        with derivatives, structure coefficients, normalization checks and the
 *        metric invariants chi and kappa.
 *
 * A frame is (f0, f1, f2) with f0 the Reeb field and f1, f2 an orthonormal
 * basis of the contact plane. The frame matrix F has the frame vectors as
 * columns, F[a][i] = f_i^a. The dual coframe (nu0, nu1, nu2) is given by the
 * rows of F^{-1}, and nu0 is the contact form.
 */
#pragma once

#include "srtight/errors.hpp"
#include "srtight/jet.hpp"
#include "srtight/small.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace srtight {

template <class T>
using FrameT = std::array<Vec3<T>, 3>; ///< f0, f1, f2 in chart components

/// Axis-aligned box or z-cylinder; points outside are rejected.
struct Domain {
    enum class Kind { Box, Cylinder };
    Kind kind = Kind::Box;
    Vec3d lo{-INFINITY, -INFINITY, -INFINITY};
    Vec3d hi{INFINITY, INFINITY, INFINITY};
    double radius = INFINITY; ///< cylinder only; z-range taken from lo/hi

    static Domain box(Vec3d lo, Vec3d hi) { return {Kind::Box, lo, hi, INFINITY}; }
    static Domain cylinder(double r, double zlo = -INFINITY, double zhi = INFINITY) {
        return {Kind::Cylinder, {-r, -r, zlo}, {r, r, zhi}, r};
    }
    bool contains(const Vec3d& q) const {
        if (kind == Kind::Cylinder) return q[0] * q[0] + q[1] * q[1] < radius * radius && q[2] > lo[2] && q[2] < hi[2];
        for (int i = 0; i < 3; ++i)
            if (!(q[i] > lo[i] && q[i] < hi[i])) return false;
        return true;
    }
};

/// Frame values with first and (optionally) second partial derivatives.
struct FrameJet {
    Mat3d F{};                            ///< F[a][i] = f_i^a
    std::array<Mat3d, 3> dF{};            ///< dF[c] = d_c F
    std::array<std::array<Mat3d, 3>, 3> d2F{}; ///< d2F[c][d] = d_c d_d F
    int order = 0;
};

/// Contact sub-Riemannian structure given by a coordinate frame.
struct FrameStructure {
    std::string name = "frame";
    std::string chart = "cartesian";
    std::function<FrameT<double>(const Vec3d&)> eval;
    /// Optional exact second-order evaluation; finite differences are used when empty.
    std::function<FrameT<Jet2>(const Vec3<Jet2>&)> eval_jet;
    Domain domain;
    double h_fd = 1e-5;

    FrameT<double> operator()(const Vec3d& q) const { return eval(q); }

    Mat3d matrix(const Vec3d& q) const {
        const auto f = eval(q);
        Mat3d F{};
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < 3; ++i) F[a][i] = f[i][a];
        return F;
    }

    void require_inside(const Vec3d& q) const {
        if (!domain.contains(q)) {
            std::ostringstream os;
            os << "point (" << q[0] << ", " << q[1] << ", " << q[2] << ") outside the domain of " << name;
            throw Error(ErrorKind::DomainExit, os.str());
        }
    }

    FrameJet jet(const Vec3d& q, int order) const {
        return eval_jet ? jet_exact(q, order) : jet_fd(q, order);
    }

private:
    FrameJet jet_exact(const Vec3d& q, int order) const {
        const Vec3<Jet2> x{Jet2::variable(q[0], 0), Jet2::variable(q[1], 1), Jet2::variable(q[2], 2)};
        const auto f = eval_jet(x);
        FrameJet J;
        J.order = order;
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < 3; ++i) {
                const Jet2& c = f[i][a];
                J.F[a][i] = c.v;
                for (int d = 0; d < 3; ++d) {
                    J.dF[d][a][i] = c.g[d];
                    if (order >= 2)
                        for (int e = 0; e < 3; ++e) J.d2F[d][e][a][i] = c.hess(d, e);
                }
            }
        return J;
    }

    // Central differences, one Richardson step. Second derivatives use a larger
    // step (100 h_fd) to keep round-off below truncation error.
    FrameJet jet_fd(const Vec3d& q, int order) const {
        FrameJet J;
        J.order = order;
        J.F = matrix(q);
        auto shifted = [&](int a, double da, int b, double db) {
            Vec3d p = q;
            p[a] += da;
            if (b >= 0) p[b] += db;
            return matrix(p);
        };
        auto first = [&](int c, double h) {
            const Mat3d p = shifted(c, h, -1, 0), m = shifted(c, -h, -1, 0);
            Mat3d r{};
            for (int a = 0; a < 3; ++a)
                for (int i = 0; i < 3; ++i) r[a][i] = (p[a][i] - m[a][i]) / (2 * h);
            return r;
        };
        for (int c = 0; c < 3; ++c) {
            const Mat3d d1 = first(c, h_fd), d2 = first(c, h_fd / 2);
            for (int a = 0; a < 3; ++a)
                for (int i = 0; i < 3; ++i) J.dF[c][a][i] = (4 * d2[a][i] - d1[a][i]) / 3;
        }
        if (order < 2) return J;
        auto second = [&](int c, int d, double h) {
            Mat3d r{};
            if (c == d) {
                const Mat3d p = shifted(c, h, -1, 0), m = shifted(c, -h, -1, 0);
                for (int a = 0; a < 3; ++a)
                    for (int i = 0; i < 3; ++i) r[a][i] = (p[a][i] - 2 * J.F[a][i] + m[a][i]) / (h * h);
            } else {
                const Mat3d pp = shifted(c, h, d, h), pm = shifted(c, h, d, -h), mp = shifted(c, -h, d, h),
                            mm = shifted(c, -h, d, -h);
                for (int a = 0; a < 3; ++a)
                    for (int i = 0; i < 3; ++i) r[a][i] = (pp[a][i] - pm[a][i] - mp[a][i] + mm[a][i]) / (4 * h * h);
            }
            return r;
        };
        const double h2 = 100 * h_fd;
        for (int c = 0; c < 3; ++c)
            for (int d = c; d < 3; ++d) {
                const Mat3d s1 = second(c, d, h2), s2 = second(c, d, h2 / 2);
                for (int a = 0; a < 3; ++a)
                    for (int i = 0; i < 3; ++i) {
                        const double v = (4 * s2[a][i] - s1[a][i]) / 3;
                        J.d2F[c][d][a][i] = v;
                        J.d2F[d][c][a][i] = v;
                    }
            }
        return J;
    }
};

/// Builds a FrameStructure from a callable generic in the scalar type, so the
/// same code yields values and exact derivatives.
template <class F>
FrameStructure make_frame_structure(std::string name, F f, Domain domain = {}) {
    FrameStructure s;
    s.name = std::move(name);
    s.eval = [f](const Vec3d& q) { return f(q); };
    s.eval_jet = [f](const Vec3<Jet2>& q) { return f(q); };
    s.domain = domain;
    return s;
}

/// Rotates (f1, f2) by a constant angle; chi and kappa are unchanged.
inline FrameStructure rotate_frame(const FrameStructure& s, double angle) {
    FrameStructure r = s;
    const double c = std::cos(angle), sn = std::sin(angle);
    auto rot = [c, sn](auto f) {
        auto g = f;
        for (int a = 0; a < 3; ++a) {
            g[1][a] = f[1][a] * c - f[2][a] * sn;
            g[2][a] = f[1][a] * sn + f[2][a] * c;
        }
        return g;
    };
    r.eval = [e = s.eval, rot](const Vec3d& q) { return rot(e(q)); };
    if (s.eval_jet) r.eval_jet = [e = s.eval_jet, rot](const Vec3<Jet2>& q) { return rot(e(q)); };
    r.name = s.name + "+rot";
    return r;
}

/// Multiplies f0 by a constant; used to produce non-normalized frames.
inline FrameStructure scale_reeb(const FrameStructure& s, double factor) {
    FrameStructure r = s;
    auto sc = [factor](auto f) {
        for (auto& x : f[0]) x = x * factor;
        return f;
    };
    r.eval = [e = s.eval, sc](const Vec3d& q) { return sc(e(q)); };
    if (s.eval_jet) r.eval_jet = [e = s.eval_jet, sc](const Vec3<Jet2>& q) { return sc(e(q)); };
    r.name = s.name + "+scaled";
    return r;
}

// ---------------------------------------------------------------------------
// Structure coefficients
// ---------------------------------------------------------------------------

/// Value with gradient; enough to differentiate c_ij^k once.
struct Grad {
    double v = 0.0;
    Vec3d g{};
    Grad() = default;
    Grad(double x) : v(x) {}
    Grad(double x, Vec3d gr) : v(x), g(gr) {}
};
inline Grad operator+(const Grad& a, const Grad& b) { return {a.v + b.v, a.g + b.g}; }
inline Grad operator-(const Grad& a, const Grad& b) { return {a.v - b.v, a.g - b.g}; }
inline Grad operator*(const Grad& a, const Grad& b) { return {a.v * b.v, b.v * a.g + a.v * b.g}; }
inline Grad operator/(const Grad& a, const Grad& b) {
    return {a.v / b.v, (1.0 / (b.v * b.v)) * (b.v * a.g - a.v * b.g)};
}

using Coeffs = std::array<std::array<std::array<double, 3>, 3>, 3>; ///< c[i][j][k]

namespace detail {

inline void check_conditioning(const Mat3d& F, const Vec3d& q) {
    const double k = condition_number(F);
    if (!(k < 1e12)) {
        std::ostringstream os;
        os << "frame matrix condition number " << k << " at (" << q[0] << ", " << q[1] << ", " << q[2] << ")";
        throw Error(ErrorKind::FrameSingular, os.str());
    }
}

/// c[i][j][k] with gradients, from a jet of order >= 2.
inline std::array<std::array<std::array<Grad, 3>, 3>, 3> coefficients_with_gradient(const FrameJet& J) {
    Mat3<Grad> F{};
    std::array<Mat3<Grad>, 3> dF{};
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 3; ++i) {
            F[a][i] = Grad(J.F[a][i], {J.dF[0][a][i], J.dF[1][a][i], J.dF[2][a][i]});
            for (int c = 0; c < 3; ++c)
                dF[c][a][i] = Grad(J.dF[c][a][i], {J.d2F[c][0][a][i], J.d2F[c][1][a][i], J.d2F[c][2][a][i]});
        }
    const Mat3<Grad> Fi = inverse(F);
    std::array<std::array<std::array<Grad, 3>, 3>, 3> c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Vec3<Grad> br{};
            for (int a = 0; a < 3; ++a)
                for (int d = 0; d < 3; ++d) br[a] = br[a] + F[d][i] * dF[d][a][j] - F[d][j] * dF[d][a][i];
            const Vec3<Grad> e = matvec(Fi, br);
            for (int k = 0; k < 3; ++k) c[i][j][k] = e[k];
        }
    return c;
}

} // namespace detail

/// c_ij^k = nu_k([f_i, f_j]) at p.
inline Coeffs structure_coefficients(const FrameStructure& s, const Vec3d& p) {
    s.require_inside(p);
    const FrameJet J = s.jet(p, 1);
    detail::check_conditioning(J.F, p);
    const Mat3d Fi = inverse(J.F);
    Coeffs c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Vec3d br{};
            for (int a = 0; a < 3; ++a)
                for (int d = 0; d < 3; ++d) br[a] += J.F[d][i] * J.dF[d][a][j] - J.F[d][j] * J.dF[d][a][i];
            const Vec3d e = matvec(Fi, br);
            for (int k = 0; k < 3; ++k) c[i][j][k] = e[k];
        }
    return c;
}

struct ChiKappa {
    double chi = 0.0;
    double kappa = 0.0;
};

inline ChiKappa invariants_chi_kappa(const FrameStructure& s, const Vec3d& p) {
    s.require_inside(p);
    const FrameJet J = s.jet(p, 2);
    detail::check_conditioning(J.F, p);
    const auto c = detail::coefficients_with_gradient(J);
    Vec3d f1{J.F[0][1], J.F[1][1], J.F[2][1]}, f2{J.F[0][2], J.F[1][2], J.F[2][2]};
    const double c011 = c[0][1][1].v, c012 = c[0][1][2].v, c021 = c[0][2][1].v;
    const double c121 = c[1][2][1].v, c122 = c[1][2][2].v;
    ChiKappa r;
    r.chi = std::sqrt(c011 * c011 + 0.25 * (c012 + c021) * (c012 + c021));
    r.kappa = dot(c[1][2][2].g, f1) - dot(c[1][2][1].g, f2) - c121 * c121 - c122 * c122 + 0.5 * (c021 - c012);
    return r;
}

/// One normalization identity: worst violation over the probes and where it occurred.
struct Violation {
    std::string identity;
    double max_violation = 0.0;
    Vec3d worst_probe{};
};

struct NormalizationReport {
    std::vector<Violation> checks; ///< c12^0=-1, c10^0=0, c20^0=0, c01^1+c02^2=0
    std::size_t probes = 0;
    double worst() const {
        double w = 0;
        for (auto& v : checks) w = std::max(w, v.max_violation);
        return w;
    }
    bool ok(double tol) const { return worst() <= tol; }
};

inline NormalizationReport validate_normalization(const FrameStructure& s, const std::vector<Vec3d>& probes) {
    NormalizationReport rep;
    rep.checks = {{"c12^0 = -1", 0, {}}, {"c10^0 = 0", 0, {}}, {"c20^0 = 0", 0, {}}, {"c01^1 + c02^2 = 0", 0, {}}};
    for (const auto& p : probes) {
        const Coeffs c = structure_coefficients(s, p);
        const double v[4] = {std::abs(c[1][2][0] + 1.0), std::abs(c[1][0][0]), std::abs(c[2][0][0]),
                             std::abs(c[0][1][1] + c[0][2][2])};
        for (int k = 0; k < 4; ++k)
            if (!(v[k] <= rep.checks[k].max_violation)) {
                rep.checks[k].max_violation = v[k];
                rep.checks[k].worst_probe = p;
            }
        ++rep.probes;
    }
    return rep;
}

/// Reeb orbit through a base point, parametrized by Reeb time z. The
/// trivialization of the annihilator along the orbit is the dual of (f1, f2).
struct ReebOrbitSpec {
    Vec3d base{};
    double z_min = -1.0, z_max = 1.0; ///< parameter range I
    bool periodic = false;
    double period = 0.0;
    /// Exact curve z -> gamma(z) when known; otherwise the Reeb flow is integrated.
    std::function<Vec3d(double)> curve;
};

} // namespace srtight
