/**
 * @file flow.hpp
 * @brief Sub-Riemannian geodesic flow H = (h1^2 + h2^2)/2 in canonical
 *        coordinates, its linearization, and initial data on the unit
 *        annihilator of a Reeb orbit.
 *
 * State layout: y = (q[3], p[3]) for geodesics; variational states append
 * V_theta[6] and V_z[6], each a tangent vector (dq, dp) of T*R^3.
 */
#pragma once

#include "srtight/errors.hpp"
#include "srtight/ode.hpp"
#include "srtight/structures.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <vector>

namespace srtight {

using Vec6 = std::array<double, 6>;

struct PhasePoint {
    Vec3d q{};
    Vec3d p{};
    Vec3d h{}; ///< h_i = <p, f_i(q)>
};

inline PhasePoint make_phase_point(const FrameStructure& s, const Vec3d& q, const Vec3d& p) {
    return {q, p, matTvec(s.matrix(q), p)};
}

/// Half the squared sub-Riemannian norm of p, i.e. H.
inline double hamiltonian(const PhasePoint& x) { return 0.5 * (x.h[1] * x.h[1] + x.h[2] * x.h[2]); }

struct VariationalState {
    PhasePoint x;
    Vec6 v_theta{};
    Vec6 v_z{};
};

namespace detail {

/// q' = sum_i h_i f_i and p' = -sum_i h_i d_q(p . f_i) for i = 1, 2.
inline void geodesic_velocity(const FrameJet& J, const Vec3d& p, double* dy) {
    const Vec3d h = matTvec(J.F, p);
    for (int a = 0; a < 3; ++a) dy[a] = h[1] * J.F[a][1] + h[2] * J.F[a][2];
    for (int c = 0; c < 3; ++c) {
        double s = 0;
        for (int i = 1; i <= 2; ++i) {
            double dh = 0;
            for (int b = 0; b < 3; ++b) dh += p[b] * J.dF[c][b][i];
            s += h[i] * dh;
        }
        dy[3 + c] = -s;
    }
}

/// Jacobian of geodesic_velocity with respect to (q, p); needs a jet of order 2.
inline std::array<std::array<double, 6>, 6> geodesic_jacobian(const FrameJet& J, const Vec3d& p) {
    const Vec3d h = matTvec(J.F, p);
    // dh[c][i] = d_c h_i = p . d_c f_i
    double dh[3][3] = {};
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 3; ++i)
            for (int b = 0; b < 3; ++b) dh[c][i] += p[b] * J.dF[c][b][i];
    std::array<std::array<double, 6>, 6> A{};
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) {
            double qq = 0, qp = 0, pq = 0, pp = 0;
            for (int i = 1; i <= 2; ++i) {
                qq += dh[c][i] * J.F[a][i] + h[i] * J.dF[c][a][i];
                qp += J.F[c][i] * J.F[a][i];
                double d2h = 0;
                for (int b = 0; b < 3; ++b) d2h += p[b] * J.d2F[a][c][b][i];
                pq += dh[c][i] * dh[a][i] + h[i] * d2h;
                pp += J.F[c][i] * dh[a][i] + h[i] * J.dF[a][c][i];
            }
            A[a][c] = qq;
            A[a][3 + c] = qp;
            A[3 + a][c] = -pq;
            A[3 + a][3 + c] = -pp;
        }
    return A;
}

inline void check_finite_frame(const FrameJet& J, const Vec3d& q) {
    for (const auto& row : J.F)
        for (double v : row)
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << "frame not finite at (" << q[0] << ", " << q[1] << ", " << q[2] << ")";
                throw Error(ErrorKind::FrameSingular, os.str());
            }
}

} // namespace detail

/// Phase velocity (q', p') of the normal geodesic flow.
inline Vec6 hamiltonian_rhs(const FrameStructure& s, const PhasePoint& x) {
    s.require_inside(x.q);
    const FrameJet J = s.jet(x.q, 1);
    detail::check_finite_frame(J, x.q);
    Vec6 v{};
    detail::geodesic_velocity(J, x.p, v.data());
    return v;
}

/// Point of the orbit at Reeb time z: the exact curve when given, else the
/// integrated Reeb flow from the base point.
inline Vec3d orbit_point(const FrameStructure& s, const ReebOrbitSpec& orbit, double z) {
    if (orbit.curve) return orbit.curve(z);
    std::vector<double> y(orbit.base.begin(), orbit.base.end());
    if (z == 0.0) return orbit.base;
    const double sign = z > 0 ? 1.0 : -1.0;
    IntegratorConfig cfg;
    cfg.rtol = 1e-13;
    cfg.atol = 1e-14;
    cfg.max_step = 0.05;
    Dopri5 ode(3, [&](double, const double* q, double* dq) {
        const auto f = s.eval({q[0], q[1], q[2]});
        for (int a = 0; a < 3; ++a) dq[a] = sign * f[0][a];
    }, cfg);
    ode.integrate(0.0, y, std::abs(z));
    return {y[0], y[1], y[2]};
}

/// Covector on the unit annihilator: <p, f0> = 0, <p, f1> = cos(theta), <p, f2> = sin(theta).
inline PhasePoint initial_phase(const FrameStructure& s, const ReebOrbitSpec& orbit, double z, double theta) {
    const Vec3d q = orbit_point(s, orbit, z);
    s.require_inside(q);
    const Mat3d F = s.matrix(q);
    detail::check_conditioning(F, q);
    const Mat3d Fi = inverse(F);
    const Vec3d p = matTvec(Fi, Vec3d{0.0, std::cos(theta), std::sin(theta)});
    return make_phase_point(s, q, p);
}

/// Derivatives of initial_phase in theta and z. The coframe along the orbit is
/// the structure's own, so V_z transports p by p' = -F^{-T} (D_{f0} F)^T p.
inline VariationalState initial_variation(const FrameStructure& s, const ReebOrbitSpec& orbit, double z,
                                          double theta) {
    VariationalState v;
    v.x = initial_phase(s, orbit, z, theta);
    const FrameJet J = s.jet(v.x.q, 1);
    const Mat3d Fi = inverse(J.F);
    const Vec3d dp_theta = matTvec(Fi, Vec3d{0.0, -std::sin(theta), std::cos(theta)});
    const Vec3d f0{J.F[0][0], J.F[1][0], J.F[2][0]};
    Mat3d DF{}; // D_{f0} F
    for (int c = 0; c < 3; ++c)
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < 3; ++i) DF[a][i] += f0[c] * J.dF[c][a][i];
    const Vec3d dp_z = -1.0 * matTvec(Fi, matTvec(DF, v.x.p));
    for (int a = 0; a < 3; ++a) {
        v.v_theta[3 + a] = dp_theta[a];
        v.v_z[a] = f0[a];
        v.v_z[3 + a] = dp_z[a];
    }
    return v;
}

/// Symplectic pairing sigma(V, W) = <dp_V, dq_W> - <dp_W, dq_V>.
inline double symplectic_pairing(const Vec6& v, const Vec6& w) {
    double s = 0;
    for (int a = 0; a < 3; ++a) s += v[3 + a] * w[a] - w[3 + a] * v[a];
    return s;
}

/// Result of an integration: samples at the stop radii plus dense output.
template <class State>
struct Trajectory {
    std::vector<double> r;
    std::vector<State> states;
    DenseTrajectory dense;
    double r_end = 0.0;              ///< last radius reached
    bool exited = false;             ///< left the domain before r_max
    ErrorKind stop_reason = ErrorKind::DomainExit;
};

namespace detail {

/// Shared driver: integrates the flow (with tangents when n = 18), stops at
/// the domain boundary and records states at the requested radii.
template <class State, class Pack>
Trajectory<State> run_flow(const FrameStructure& s, std::vector<double> y, std::size_t n, double r_max,
                           const IntegratorConfig& cfg, const std::vector<double>& stops, Pack pack) {
    if (!(r_max > 0)) throw Error(ErrorKind::InvalidInput, "r_max must be positive");
    Trajectory<State> out;
    const bool tangents = n > 6;
    auto rhs = [&s, tangents, n](double, const double* yy, double* dy) {
        const Vec3d q{yy[0], yy[1], yy[2]}, p{yy[3], yy[4], yy[5]};
        const FrameJet J = s.jet(q, tangents ? 2 : 1);
        geodesic_velocity(J, p, dy);
        if (!tangents) return;
        const auto A = geodesic_jacobian(J, p);
        for (std::size_t base = 6; base < n; base += 6)
            for (int r = 0; r < 6; ++r) {
                double acc = 0;
                for (int c = 0; c < 6; ++c) acc += A[r][c] * yy[base + c];
                dy[base + r] = acc;
            }
    };
    Dopri5 ode(n, rhs, cfg);
    bool left = false;
    auto on_step = [&](double, const std::vector<double>& yy, const std::vector<double>&) {
        if (!s.domain.contains({yy[0], yy[1], yy[2]})) {
            left = true;
            return false;
        }
        return true;
    };
    auto on_stop = [&](std::size_t, double t, const std::vector<double>& yy) {
        out.r.push_back(t);
        out.states.push_back(pack(s, yy));
    };
    out.r_end = ode.integrate(0.0, y, r_max, stops, on_step, on_stop, cfg.dense ? &out.dense : nullptr);
    out.exited = left;
    if (left) {
        // drop the samples recorded past the boundary step
        while (!out.r.empty() && out.r.back() > out.r_end) {
            out.r.pop_back();
            out.states.pop_back();
        }
    }
    return out;
}

} // namespace detail

/// Unit-speed geodesic from x0 (2H = 1), sampled at `stops`.
inline Trajectory<PhasePoint> integrate_geodesic(const FrameStructure& s, const PhasePoint& x0, double r_max,
                                                 const IntegratorConfig& cfg = {},
                                                 const std::vector<double>& stops = {}) {
    if (std::abs(2 * hamiltonian(x0) - 1) > 1e-8)
        throw Error(ErrorKind::InvalidInput, "initial covector must satisfy 2H = 1");
    std::vector<double> y{x0.q[0], x0.q[1], x0.q[2], x0.p[0], x0.p[1], x0.p[2]};
    return detail::run_flow<PhasePoint>(s, y, 6, r_max, cfg, stops, [](const FrameStructure& st, const auto& yy) {
        return make_phase_point(st, {yy[0], yy[1], yy[2]}, {yy[3], yy[4], yy[5]});
    });
}

inline std::vector<double> pack_variational(const VariationalState& v) {
    std::vector<double> y(18);
    for (int a = 0; a < 3; ++a) {
        y[a] = v.x.q[a];
        y[3 + a] = v.x.p[a];
    }
    for (int k = 0; k < 6; ++k) {
        y[6 + k] = v.v_theta[k];
        y[12 + k] = v.v_z[k];
    }
    return y;
}

inline VariationalState unpack_variational(const FrameStructure& s, const std::vector<double>& y) {
    VariationalState v;
    v.x = make_phase_point(s, {y[0], y[1], y[2]}, {y[3], y[4], y[5]});
    for (int k = 0; k < 6; ++k) {
        v.v_theta[k] = y[6 + k];
        v.v_z[k] = y[12 + k];
    }
    return v;
}

/// Geodesic together with the transported tangent vectors V_theta, V_z.
inline Trajectory<VariationalState> integrate_variational(const FrameStructure& s, const VariationalState& v0,
                                                          double r_max, const IntegratorConfig& cfg = {},
                                                          const std::vector<double>& stops = {}) {
    return detail::run_flow<VariationalState>(
        s, pack_variational(v0), 18, r_max, cfg, stops,
        [](const FrameStructure& st, const auto& yy) { return unpack_variational(st, yy); });
}

/// CSV with columns r,x,y,z,p1,p2,p3,h0,h1,h2.
inline void write_trajectory_csv(std::ostream& os, const Trajectory<PhasePoint>& t) {
    os << "r,x,y,z,p1,p2,p3,h0,h1,h2\n";
    os.precision(12);
    for (std::size_t k = 0; k < t.r.size(); ++k) {
        const auto& x = t.states[k];
        os << t.r[k] << ',' << x.q[0] << ',' << x.q[1] << ',' << x.q[2] << ',' << x.p[0] << ',' << x.p[1] << ','
           << x.p[2] << ',' << x.h[0] << ',' << x.h[1] << ',' << x.h[2] << '\n';
    }
}

/// Uniform sample radii 0, dr, 2 dr, ... up to r_max.
inline std::vector<double> uniform_radii(double r_max, double dr) {
    std::vector<double> r;
    const auto n = static_cast<long>(std::floor(r_max / dr + 1e-9));
    for (long k = 0; k <= n; ++k) r.push_back(static_cast<double>(k) * dr);
    return r;
}

} // namespace srtight
