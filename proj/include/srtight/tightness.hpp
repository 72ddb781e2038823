/**
 * @file tightness.hpp
 * @brief Per-orbit analysis over a (z, theta) grid of unit covectors: first
 *        singular and focal radii, their extremes, the Schwarzian and
 *        curvature estimates, and the boundary of the overtwisted disk.
 *
 * The conclusion interval is
 *   min(r_inj, r_o^-) <= r_tight <= min(r_inj, r_o^+),
 * with r_o read as "beyond the horizon" where no singular radius was found.
 */
#pragma once

#include "srtight/bounds.hpp"
#include "srtight/curvature.hpp"
#include "srtight/errors.hpp"
#include "srtight/flow.hpp"
#include "srtight/jacobi.hpp"
#include "srtight/registry.hpp"
#include "srtight/sturm.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace srtight {

struct AnalysisOptions {
    int n_z = 8;
    int n_theta = 32;
    double r_max = 4.0;
    double fit_lo = 0.05;   ///< Schwarzian fit window starts here
    double fit_hi = 0.0;    ///< and ends here; 0 means min(r_inj, horizon)
    int fit_stride = 16;
    IntegratorConfig cfg{};
    JacobiOptions jacobi{};
    unsigned threads = 0;   ///< 0: TIGHTNESS_THREADS, else hardware concurrency
};

/// Worker count: explicit request, else TIGHTNESS_THREADS, else the hardware.
inline unsigned analysis_threads(unsigned requested) {
    unsigned n = requested;
    if (n == 0) {
        if (const char* env = std::getenv("TIGHTNESS_THREADS")) n = static_cast<unsigned>(std::max(1, std::atoi(env)));
        else n = std::max(1u, std::thread::hardware_concurrency());
    }
    return std::max(1u, n);
}

/// Runs f(i) for i in [0, n) on up to `threads` workers; results are written
/// by index, so the outcome does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F f) {
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) f(i);
        });
    for (auto& th : pool) th.join();
}

/// Uniform grid on the orbit parameter range; the period endpoint is dropped
/// for periodic orbits.
inline std::vector<double> z_grid(const ReebOrbitSpec& orbit, int n) {
    std::vector<double> z;
    if (n <= 1) return {0.5 * (orbit.z_min + orbit.z_max)};
    const double lo = orbit.z_min, hi = orbit.periodic ? orbit.z_min + orbit.period : orbit.z_max;
    const int den = orbit.periodic ? n : n - 1;
    for (int i = 0; i < n; ++i) z.push_back(lo + (hi - lo) * i / den);
    return z;
}

/// theta_j = 2 pi j / n; theta = 2 pi is the same covector as 0.
inline std::vector<double> theta_grid(int n) {
    std::vector<double> t;
    for (int j = 0; j < n; ++j) t.push_back(2 * std::numbers::pi * j / n);
    return t;
}

struct OrbitSample {
    double z = 0.0, theta = 0.0;
    double horizon = 0.0;           ///< radius covered by the trace
    bool truncated = false;
    std::optional<double> r_o;      ///< first singular radius
    std::optional<double> r_focal;  ///< first focal radius
    std::optional<std::string> error;
};

struct TightnessReport {
    static constexpr int schema_version = 1;
    std::string structure;
    ReebOrbitSpec orbit;
    AnalysisOptions options;
    std::vector<OrbitSample> samples;

    std::optional<double> r_o_minus, r_o_plus;
    bool r_o_all_found = false;   ///< false: r_o^+ is over the found samples only
    bool r_o_none_found = false;  ///< every sample NotFound up to its horizon
    double horizon = 0.0;         ///< smallest horizon over the samples

    double r_inj = INFINITY;
    bool r_inj_analytic = false;  ///< false: first focal radius, an upper proxy
    std::optional<double> min_focal;

    std::optional<BoundFit> schwarzian_fit;
    std::optional<BoundFit> curvature_fit;
    std::optional<double> rho_B, rho_C;
    bool estimates_consistent = true; ///< rho_B, rho_C do not exceed r_o^- (when found)

    double r_tight_lower = 0.0, r_tight_upper = INFINITY;
    std::optional<double> r_tight;    ///< set when the interval closes
    std::optional<double> reference_r_tight;
    std::string conclusion;
    std::size_t failures = 0;
};

/// Everything measured on one covector.
inline OrbitSample analyze_sample(const FrameStructure& s, const ReebOrbitSpec& orbit, double z, double theta,
                                  const AnalysisOptions& opt, std::optional<SchwarzianSample>* schw = nullptr,
                                  double fit_hi = 0.0) {
    OrbitSample o;
    o.z = z;
    o.theta = theta;
    try {
        const JacobiTrace t = jacobi_trace(s, orbit, z, theta, opt.r_max, opt.cfg, opt.jacobi);
        o.horizon = t.r_end;
        o.truncated = t.truncated;
        const auto ro = first_singular_radius(t);
        if (ro.found()) o.r_o = *ro.r;
        const auto rf = first_focal_radius(t);
        if (rf.found()) o.r_focal = *rf.r;
        if (schw) {
            const double hi = std::min(fit_hi > 0 ? fit_hi : t.r_end, t.r_end);
            *schw = schwarzian_numeric(t, opt.fit_lo, hi, opt.fit_stride);
        }
    } catch (const Error& e) {
        o.error = e.what();
    }
    return o;
}

/// Full analysis of one orbit of a model.
inline TightnessReport analyze_orbit(const Model& m, const AnalysisOptions& opt = {}) {
    TightnessReport rep;
    rep.structure = m.id;
    rep.orbit = m.orbit;
    rep.options = opt;
    const auto zs = z_grid(m.orbit, opt.n_z);
    const auto ths = theta_grid(opt.n_theta);
    const std::size_t n = zs.size() * ths.size();
    rep.samples.resize(n);
    std::vector<std::optional<SchwarzianSample>> schw(n);
    const double fit_hi = opt.fit_hi > 0 ? opt.fit_hi
                          : (m.r_inj && std::isfinite(*m.r_inj) ? std::min(*m.r_inj, opt.r_max) : opt.r_max);
    parallel_for(n, analysis_threads(opt.threads), [&](std::size_t i) {
        rep.samples[i] = analyze_sample(m.structure, m.orbit, zs[i / ths.size()], ths[i % ths.size()], opt, &schw[i],
                                        fit_hi);
    });

    // deterministic reduction in grid order
    rep.horizon = INFINITY;
    std::size_t found = 0, ok = 0;
    for (const auto& o : rep.samples) {
        if (o.error) {
            ++rep.failures;
            continue;
        }
        ++ok;
        rep.horizon = std::min(rep.horizon, o.horizon);
        if (o.r_o) {
            ++found;
            rep.r_o_minus = rep.r_o_minus ? std::min(*rep.r_o_minus, *o.r_o) : *o.r_o;
            rep.r_o_plus = rep.r_o_plus ? std::max(*rep.r_o_plus, *o.r_o) : *o.r_o;
        }
        if (o.r_focal) rep.min_focal = rep.min_focal ? std::min(*rep.min_focal, *o.r_focal) : *o.r_focal;
    }
    if (ok == 0) rep.horizon = 0.0;
    rep.r_o_all_found = ok > 0 && found == ok;
    rep.r_o_none_found = ok > 0 && found == 0;

    if (m.r_inj) {
        rep.r_inj = *m.r_inj;
        rep.r_inj_analytic = true;
    } else {
        rep.r_inj = rep.min_focal.value_or(INFINITY);
    }

    // estimates
    std::vector<SchwarzianSample> fit_in;
    for (const auto& s : schw)
        if (s && !s->r.empty()) fit_in.push_back(*s);
    if (!fit_in.empty()) {
        rep.schwarzian_fit = fit_schwarzian_bound(fit_in, opt.fit_lo, fit_hi);
        rep.rho_B = std::min(rep.r_inj, r_star(rep.schwarzian_fit->k1, rep.schwarzian_fit->k2));
    }
    if (m.curvatures) {
        rep.curvature_fit = curvature_bound_from_profiles({*m.curvatures}, 0.0,
                                                          std::isfinite(rep.r_inj) ? rep.r_inj : opt.r_max);
        rep.rho_C = std::min(rep.r_inj, tau_AC(rep.curvature_fit->A, rep.curvature_fit->C));
    }
    if (rep.r_o_minus) {
        if (rep.rho_B && *rep.rho_B > *rep.r_o_minus + 1e-4) rep.estimates_consistent = false;
        if (rep.rho_C && *rep.rho_C > *rep.r_o_minus + 1e-4) rep.estimates_consistent = false;
    }

    // conclusion: NotFound means r_o lies beyond the sample's horizon
    const double ro_lo = rep.r_o_all_found ? *rep.r_o_minus : rep.horizon;
    const double ro_hi = rep.r_o_all_found ? *rep.r_o_plus : INFINITY;
    rep.r_tight_lower = std::min(rep.r_inj, ro_lo);
    rep.r_tight_upper = std::min(rep.r_inj, ro_hi);
    if (m.kcontact() && rep.r_inj_analytic && rep.r_o_none_found) {
        // Reeb flow by isometries: the tube is tight up to r_inj
        rep.r_tight_lower = rep.r_tight_upper = rep.r_inj;
    }
    if (ok == 0) {
        rep.r_tight_lower = 0.0;
        rep.r_tight_upper = INFINITY;
        rep.conclusion = "no usable samples";
    } else if (rep.r_inj_analytic && (rep.r_tight_lower == rep.r_tight_upper ||
                                      rep.r_tight_upper - rep.r_tight_lower <= 1e-9 * rep.r_tight_upper)) {
        // interval closed up to the root-refinement tolerance
        rep.r_tight = rep.r_tight_lower;
        if (rep.r_o_all_found && *rep.r_o_plus < rep.r_inj)
            rep.conclusion = "overtwisted: the disk bounded at r_o lies inside the injectivity tube";
        else
            rep.conclusion = "tight up to the injectivity radius";
    } else if (rep.r_o_all_found && rep.r_o_plus && *rep.r_o_plus < rep.r_inj) {
        rep.conclusion = rep.r_inj_analytic ? "overtwisted within the sampled tube"
                                            : "candidate overtwisted disk (r_inj known only through the focal proxy)";
    } else {
        rep.conclusion = "tight at least up to the lower bound";
    }
    rep.reference_r_tight = m.r_tight;
    return rep;
}

// ---------------------------------------------------------------------------
// Overtwisted disk boundary
// ---------------------------------------------------------------------------

struct DiskBoundary {
    double z = 0.0;
    std::vector<double> theta, r_o;
    std::vector<Vec3d> points;  ///< E(r_o(lambda_theta) lambda_theta)
    double closure_defect = 0.0; ///< distance between the theta = 0 and theta = 2 pi endpoints
    bool simple = true;         ///< no self-intersection in the best-fit plane
};

namespace detail {

inline bool segments_cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                           const Eigen::Vector2d& d) {
    auto cross = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) { return u.x() * v.y() - u.y() * v.x(); };
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

/// Closed polyline simple after projection to its best-fit plane.
inline bool polyline_simple(const std::vector<Vec3d>& pts) {
    const std::size_t n = pts.size();
    if (n < 4) return true;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const auto& p : pts) c += Eigen::Vector3d(p[0], p[1], p[2]);
    c /= static_cast<double>(n);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : pts) {
        const Eigen::Vector3d d = Eigen::Vector3d(p[0], p[1], p[2]) - c;
        cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    const Eigen::Vector3d u = es.eigenvectors().col(2), v = es.eigenvectors().col(1);
    std::vector<Eigen::Vector2d> q;
    for (const auto& p : pts) {
        const Eigen::Vector3d d = Eigen::Vector3d(p[0], p[1], p[2]) - c;
        q.emplace_back(d.dot(u), d.dot(v));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // adjacent through the closing segment
            if (segments_cross(q[i], q[(i + 1) % n], q[j], q[(j + 1) % n])) return false;
        }
    return true;
}

/// Endpoint of the unit geodesic with initial covector (z, theta) at radius r.
inline Vec3d geodesic_endpoint(const FrameStructure& s, const ReebOrbitSpec& orbit, double z, double theta, double r,
                               const IntegratorConfig& cfg) {
    IntegratorConfig c = cfg;
    c.dense = false;
    const auto tr = integrate_geodesic(s, initial_phase(s, orbit, z, theta), r, c, {r});
    if (tr.states.empty() || tr.exited) throw Error(ErrorKind::DomainExit, "geodesic left the domain before r_o", r);
    return tr.states.back().q;
}

} // namespace detail

/// Boundary {E(r_o(lambda) lambda)} of the disk D_q over orbit time z.
inline DiskBoundary disk_boundary(const Model& m, double z, int n_theta, const AnalysisOptions& opt = {}) {
    DiskBoundary d;
    d.z = z;
    auto ths = theta_grid(n_theta);
    ths.push_back(2 * std::numbers::pi); // closure probe
    std::vector<OrbitSample> smp(ths.size());
    parallel_for(ths.size(), analysis_threads(opt.threads),
                 [&](std::size_t i) { smp[i] = analyze_sample(m.structure, m.orbit, z, ths[i], opt); });
    for (const auto& o : smp) {
        if (o.error) throw Error(ErrorKind::StepFailure, "disk sample failed: " + *o.error);
        if (!o.r_o || (o.r_focal && *o.r_focal < *o.r_o))
            throw Error(ErrorKind::NotOvertwistedWithinHorizon,
                        "a covector has no first singular radius before its focal radius or the horizon", o.theta);
    }
    std::vector<Vec3d> pts(ths.size());
    parallel_for(ths.size(), analysis_threads(opt.threads), [&](std::size_t i) {
        pts[i] = detail::geodesic_endpoint(m.structure, m.orbit, z, ths[i], *smp[i].r_o, opt.cfg);
    });
    for (std::size_t i = 0; i + 1 < ths.size(); ++i) {
        d.theta.push_back(ths[i]);
        d.r_o.push_back(*smp[i].r_o);
        d.points.push_back(pts[i]);
    }
    d.closure_defect = norm(pts.back() - pts.front());
    d.simple = detail::polyline_simple(d.points);
    return d;
}

/// CSV with columns theta,r_o,x,y,z; the first point is repeated to close the curve.
inline void write_disk_csv(std::ostream& os, const DiskBoundary& d) {
    os << "theta,r_o,x,y,z\n";
    os.precision(12);
    for (std::size_t i = 0; i <= d.points.size() && !d.points.empty(); ++i) {
        const std::size_t k = i % d.points.size();
        const double th = i == d.points.size() ? 2 * std::numbers::pi : d.theta[k];
        os << th << ',' << d.r_o[k] << ',' << d.points[k][0] << ',' << d.points[k][1] << ',' << d.points[k][2] << '\n';
    }
}

// ---------------------------------------------------------------------------
// Singular locus and focal comparison
// ---------------------------------------------------------------------------

struct SingularPoint {
    double z, theta, r;
    int k; ///< phi(r) = k pi
};

/// All crossings phi(r) = k pi (k != 0) up to r_max over the grid.
inline std::vector<SingularPoint> singular_locus_sample(const Model& m, const AnalysisOptions& opt = {}) {
    const auto zs = z_grid(m.orbit, opt.n_z);
    const auto ths = theta_grid(opt.n_theta);
    std::vector<std::vector<SingularPoint>> per(zs.size() * ths.size());
    parallel_for(per.size(), analysis_threads(opt.threads), [&](std::size_t i) {
        const double z = zs[i / ths.size()], th = ths[i % ths.size()];
        try {
            const JacobiTrace t = jacobi_trace(m.structure, m.orbit, z, th, opt.r_max, opt.cfg, opt.jacobi);
            for (const auto& c : phi_crossings(t)) per[i].push_back({z, th, c.r, c.k});
        } catch (const Error&) {
        }
    });
    std::vector<SingularPoint> out;
    for (const auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
}

struct FocalCheck {
    bool ok = true;
    double bound = INFINITY;                ///< pi / sqrt(kappa_plus), or +inf
    std::optional<double> min_focal;        ///< smallest measured first focal radius
};

/// Measured first focal radii against pi/sqrt(kappa_plus) for a K-contact model.
inline FocalCheck focal_lower_bound_check(const Model& m, double kappa_plus, const AnalysisOptions& opt = {}) {
    if (m.kappa && *m.kappa > kappa_plus) throw Error(ErrorKind::InvalidInput, "kappa exceeds kappa_plus");
    FocalCheck fc;
    fc.bound = kappa_plus > 0 ? std::numbers::pi / std::sqrt(kappa_plus) : INFINITY;
    const auto zs = z_grid(m.orbit, opt.n_z);
    const auto ths = theta_grid(opt.n_theta);
    std::vector<OrbitSample> smp(zs.size() * ths.size());
    parallel_for(smp.size(), analysis_threads(opt.threads), [&](std::size_t i) {
        smp[i] = analyze_sample(m.structure, m.orbit, zs[i / ths.size()], ths[i % ths.size()], opt);
    });
    for (const auto& o : smp) {
        if (o.error) {
            fc.ok = false;
            continue;
        }
        if (o.r_focal) fc.min_focal = fc.min_focal ? std::min(*fc.min_focal, *o.r_focal) : *o.r_focal;
    }
    if (fc.min_focal && *fc.min_focal < fc.bound - 1e-6) fc.ok = false;
    return fc;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace detail {

/// Numbers as JSON numbers; +-inf as the strings "inf" / "-inf"; missing as null.
inline nlohmann::json num(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}
inline nlohmann::json num(const std::optional<double>& v) { return v ? num(*v) : nlohmann::json(nullptr); }

} // namespace detail

inline nlohmann::json report_to_json(const TightnessReport& r) {
    using detail::num;
    nlohmann::json j;
    j["schema_version"] = TightnessReport::schema_version;
    j["structure"] = r.structure;
    j["orbit"] = {{"base", {r.orbit.base[0], r.orbit.base[1], r.orbit.base[2]}},
                  {"z_min", r.orbit.z_min},
                  {"z_max", r.orbit.z_max},
                  {"periodic", r.orbit.periodic}};
    j["grid"] = {{"n_z", r.options.n_z}, {"n_theta", r.options.n_theta}, {"r_max", r.options.r_max}};
    auto& s = j["samples"] = nlohmann::json::array();
    for (const auto& o : r.samples) {
        nlohmann::json e{{"z", o.z}, {"theta", o.theta}, {"horizon", o.horizon}, {"truncated", o.truncated},
                         {"r_o", o.r_o ? num(*o.r_o) : nlohmann::json("NotFound")}, {"r_focal", num(o.r_focal)}};
        if (o.error) e["error"] = *o.error;
        s.push_back(e);
    }
    j["r_o_minus"] = num(r.r_o_minus);
    j["r_o_plus"] = num(r.r_o_plus);
    j["r_o_all_found"] = r.r_o_all_found;
    j["horizon"] = num(r.horizon);
    j["r_inj"] = {{"value", num(r.r_inj)},
                  {"kind", r.r_inj_analytic ? "analytic" : "focal proxy, upper bound on r_inj"}};
    j["min_focal"] = num(r.min_focal);
    if (r.schwarzian_fit)
        j["schwarzian_fit"] = {{"k1", r.schwarzian_fit->k1}, {"k2", r.schwarzian_fit->k2},
                               {"r_lo", r.schwarzian_fit->r_lo}, {"r_hi", r.schwarzian_fit->r_hi}};
    if (r.curvature_fit) j["curvature_fit"] = {{"A", r.curvature_fit->A}, {"C", r.curvature_fit->C}};
    j["rho_B"] = num(r.rho_B);
    j["rho_C"] = num(r.rho_C);
    j["estimates_consistent"] = r.estimates_consistent;
    j["r_tight_interval"] = {num(r.r_tight_lower), num(r.r_tight_upper)};
    j["r_tight"] = num(r.r_tight);
    j["reference_r_tight"] = num(r.reference_r_tight);
    j["conclusion"] = r.conclusion;
    j["failures"] = r.failures;
    return j;
}

} // namespace srtight
