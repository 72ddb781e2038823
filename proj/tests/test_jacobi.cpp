// Contact Jacobi traces: closed forms, initial jets, singular and focal radii,
// both Schwarzian routes and the Schwarzian bound fit.
#include "srtight/jacobi.hpp"
#include "srtight/registry.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace srtight;

namespace {

constexpr double pi = std::numbers::pi;

JacobiTrace trace(const Model& m, double z, double theta, double r_max) {
    return jacobi_trace(m.structure, m.orbit, z, theta, r_max);
}

struct ClosedForm {
    const char* label;
    Model model;
    double r_max;
    std::function<double(double)> w_theta, w_z;
};

std::vector<ClosedForm> closed_forms() {
    return {
        {"heisenberg", builtin_model("heisenberg"), 4.0, [](double r) { return r * r / 2; }, [](double) { return 1.0; }},
        {"overtwisted", builtin_model("overtwisted"), 3.5, [](double r) { return std::sin(r * r / 2); },
         [](double r) { return std::cos(r * r / 2); }},
        {"radial kcos", radial_model("kcos:1", "kvers:1"), 3.0, [](double r) { return 1 - std::cos(r); },
         [](double r) { return std::cos(r); }},
        {"SU(2)", kcontact_model(1.0), 3.0, [](double r) { return 1 - std::cos(r); },
         [](double r) { return std::cos(r); }},
        {"SL(2)", kcontact_model(-1.0), 3.0, [](double r) { return std::cosh(r) - 1; },
         [](double r) { return std::cosh(r); }},
        {"kappa 0.25", kcontact_model(0.25), 3.0, [](double r) { return 4 * (1 - std::cos(r / 2)); },
         [](double r) { return std::cos(r / 2); }},
    };
}

} // namespace

TEST(JacobiTrace, ClosedFormTraces) {
    for (const auto& c : closed_forms())
        for (double z : {0.0, 0.6})
            for (double th : {0.0, 2.2}) {
                const auto t = trace(c.model, z, th, c.r_max);
                ASSERT_FALSE(t.truncated) << c.label;
                double worst = 0;
                for (std::size_t k = 0; k < t.r.size(); k += 7) {
                    const double r = t.r[k];
                    const double scale = std::max(1.0, std::abs(c.w_theta(r)));
                    worst = std::max(worst, std::abs(t.w_theta[k] - c.w_theta(r)) / scale);
                    worst = std::max(worst, std::abs(t.w_z[k] - c.w_z(r)) / scale);
                }
                EXPECT_LE(worst, 1e-7) << c.label << " z=" << z << " theta=" << th;
            }
}

TEST(JacobiTrace, InterpolantMatchesGridAndDerivatives) {
    const auto t = trace(builtin_model("overtwisted"), 0.0, 0.3, 3.0);
    for (double r : {0.0137, 0.51, 1.777, 2.9}) {
        const WJet j = t.at(r);
        const double u = r * r / 2;
        EXPECT_NEAR(j.th[0], std::sin(u), 1e-9);
        EXPECT_NEAR(j.th[1], r * std::cos(u), 1e-8);
        EXPECT_NEAR(j.th[2], std::cos(u) - r * r * std::sin(u), 1e-7);
        EXPECT_NEAR(j.z[1], -r * std::sin(u), 1e-8);
    }
}

TEST(JacobiTrace, TruncatesAtDomainBoundary) {
    const Model m = builtin_model("perturbed");
    const auto t = trace(m, 0.0, 0.0, 7.0);
    EXPECT_TRUE(t.truncated);
    EXPECT_LE(t.r_end, 5.0 + 1e-9);
    EXPECT_GT(t.r_end, 4.5);
}

TEST(InitialJet, AllBuiltinModels) {
    for (const char* name : {"heisenberg", "overtwisted", "kcontact", "perturbed"}) {
        const Model m = builtin_model(name);
        for (double th : {0.0, 1.9, 4.4}) {
            const auto rep = check_initial_jet(trace(m, 0.25, th, 1.0));
            EXPECT_LE(rep.max_deviation, 1e-6) << name;
            EXPECT_LE(rep.fit_max_deviation, 1e-4) << name;
        }
    }
    EXPECT_LE(check_initial_jet(trace(builtin_model("heisenberg"), 0, 0, 1.0)).max_deviation, 1e-8);
    const auto su2 = check_initial_jet(trace(kcontact_model(1.0), 0, 0.4, 1.0));
    EXPECT_NEAR(su2.measured[3], 0.0, 1e-5);
    const auto ot = check_initial_jet(trace(builtin_model("overtwisted"), 0, 1.0, 1.0));
    EXPECT_NEAR(ot.measured[2], 1.0, 1e-6);
}

TEST(SingularRadius, OvertwistedIsSqrtTwoPi) {
    const Model m = builtin_model("overtwisted");
    for (double th : {0.0, 1.0, 3.0}) {
        const auto r = first_singular_radius(trace(m, 0.1, th, 3.0));
        ASSERT_TRUE(r.found());
        EXPECT_NEAR(*r.r, std::sqrt(2 * pi), 1e-6);
    }
}

TEST(SingularRadius, NotFoundModels) {
    const auto h = first_singular_radius(trace(builtin_model("heisenberg"), 0, 0.5, 10.0));
    EXPECT_FALSE(h.found());
    EXPECT_NEAR(h.horizon, 10.0, 1e-12);
    // SU(2): phi stays below pi up to the focal radius pi
    const auto t = trace(kcontact_model(1.0), 0, 0.5, pi - 1e-3);
    EXPECT_FALSE(first_singular_radius(t).found());
    EXPECT_LT(t.phi.back(), pi);
}

TEST(SingularRadius, PhiCrossingsAtSqrtTwoPiK) {
    const auto c = phi_crossings(trace(builtin_model("overtwisted"), 0, 0.7, 5.2));
    ASSERT_EQ(c.size(), 4u);
    for (const auto& x : c) EXPECT_NEAR(x.r, std::sqrt(2 * pi * x.k), 1e-8);
}

TEST(FocalRadius, KContact) {
    const auto f = first_focal_radius(trace(kcontact_model(1.0), 0, 0.3, 4.0));
    ASSERT_TRUE(f.found());
    EXPECT_NEAR(*f.r, pi, 1e-6);
    const auto q = first_focal_radius(trace(kcontact_model(0.25), 0, 0.3, 7.0));
    ASSERT_TRUE(q.found());
    EXPECT_NEAR(*q.r, 2 * pi, 1e-6);
    EXPECT_FALSE(first_focal_radius(trace(kcontact_model(-1.0), 0, 0.3, 6.0)).found());
}

TEST(FocalRadius, NoneForRadialStandardModels) {
    EXPECT_TRUE(focal_radii(trace(builtin_model("heisenberg"), 0, 0, 10.0)).empty());
    EXPECT_TRUE(focal_radii(trace(builtin_model("overtwisted"), 0, 0, 4.0)).empty());
}

TEST(Schwarzian, HeisenbergNumeric) {
    const auto s = schwarzian_numeric(trace(builtin_model("heisenberg"), 0, 0.4, 2.1), 0.2, 2.0);
    ASSERT_GT(s.r.size(), 100u);
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        const double ex = -1.5 / (s.r[i] * s.r[i]);
        EXPECT_NEAR(s.S[i], ex, 1e-4 * std::abs(ex)) << s.r[i];
    }
}

TEST(Schwarzian, OvertwistedNumeric) {
    const auto s = schwarzian_numeric(trace(builtin_model("overtwisted"), 0, 0.4, 2.1), 0.2, 2.0);
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        const double r = s.r[i], ex = -1.5 / (r * r) + 2 * r * r;
        EXPECT_NEAR(s.S[i], ex, 1e-3 * std::abs(ex)) << r;
    }
}

TEST(Schwarzian, KContactSinAndSinh) {
    const auto p = schwarzian_numeric(trace(kcontact_model(1.0), 0, 0.4, 2.6), 0.3, 2.5);
    for (std::size_t i = 0; i < p.r.size(); ++i) {
        const double s = std::sin(p.r[i]);
        EXPECT_NEAR(0.5 * p.S[i], 0.25 * (1 - 3 / (s * s)), 1e-3) << p.r[i];
    }
    const auto n = schwarzian_numeric(trace(kcontact_model(-1.0), 0, 0.4, 2.6), 0.3, 2.5);
    for (std::size_t i = 0; i < n.r.size(); ++i) {
        const double s = std::sinh(n.r[i]);
        EXPECT_NEAR(0.5 * n.S[i], -0.25 * (1 + 3 / (s * s)), 1e-3) << n.r[i];
    }
}

TEST(Schwarzian, NearAxisRegularPart) {
    // regular part S + 3/(2r^2) of the overtwisted model is 2 r^2
    const auto s = schwarzian_numeric(trace(builtin_model("overtwisted"), 0, 0.4, 0.5), 0.01, 0.1);
    for (std::size_t i = 0; i < s.r.size(); ++i) EXPECT_NEAR(s.S_reg[i], 2 * s.r[i] * s.r[i], 1e-6);
}

TEST(Schwarzian, FrameFormulaAgreesWithNumeric) {
    for (const char* name : {"heisenberg", "overtwisted", "kcontact", "perturbed"}) {
        const auto t = trace(builtin_model(name), 0.1, 0.9, 2.1);
        const auto a = schwarzian_numeric(t, 0.3, 2.0), b = schwarzian_frame_formula(t, 0.3, 2.0);
        ASSERT_EQ(a.r.size(), b.r.size());
        for (std::size_t i = 0; i < a.r.size(); ++i) EXPECT_NEAR(b.S[i], a.S[i], 1e-3 * std::abs(a.S[i])) << name;
    }
}

TEST(Schwarzian, HeisenbergFrameTerms) {
    const auto t = trace(builtin_model("heisenberg"), 0, 0, 2.0);
    for (double r : {0.3, 1.0, 1.7}) {
        const auto ft = schwarzian_frame_terms(t.at(r));
        EXPECT_NEAR(ft.a, r, 1e-9);
        EXPECT_NEAR(ft.A, -1 / r, 1e-8);
        EXPECT_NEAR(ft.B, 0.0, 1e-8);
    }
}

TEST(Schwarzian, MoebiusInvariance) {
    const auto t = trace(builtin_model("perturbed"), 0, 0.5, 2.0);
    for (double r : {0.4, 1.1, 1.8}) {
        const Taylor<4> v = projective_coordinate(t.at(r));
        const Taylor<4> m = (2.0 * v + 1.0) / (0.5 * v + 3.0);
        EXPECT_NEAR(schwarzian_of(m), schwarzian_of(v), 1e-6 * (1 + std::abs(schwarzian_of(v))));
    }
    // the homogeneous coordinate chosen does not matter either
    const WJet j = t.at(1.3);
    const double s1 = schwarzian_of(taylor_of(j.th) / taylor_of(j.z));
    const double s2 = schwarzian_of(-1.0 * (taylor_of(j.z) / taylor_of(j.th)));
    EXPECT_NEAR(s1, s2, 1e-9 * (1 + std::abs(s1)));
}

TEST(SchwarzianBound, StandardModels) {
    std::vector<SchwarzianSample> h, o;
    for (double th : {0.0, 2.0, 4.0}) {
        h.push_back(schwarzian_numeric(trace(builtin_model("heisenberg"), 0, th, 3.1), 0.05, 3.0));
        o.push_back(schwarzian_numeric(trace(builtin_model("overtwisted"), 0, th, 3.1), 0.05, 3.0));
    }
    const auto fh = fit_schwarzian_bound(h, 0.05, 3.0), fo = fit_schwarzian_bound(o, 0.05, 3.0);
    EXPECT_NEAR(fh.k1, 0.0, 1e-4);
    EXPECT_NEAR(fh.k2, 0.0, 1e-4);
    EXPECT_NEAR(fo.k1, 0.0, 1e-3);
    EXPECT_NEAR(fo.k2, 1.0, 1e-3);
    EXPECT_EQ(fo.samples, 3u);
}

TEST(SchwarzianBound, MajorantDominatesSamples) {
    const auto s = schwarzian_numeric(trace(builtin_model("perturbed"), 0, 0, 2.4), 0.05, 2.4);
    const auto f = fit_schwarzian_bound({s}, 0.05, 2.4);
    for (std::size_t i = 0; i < s.r.size(); ++i)
        EXPECT_GE(f.k1 * s.r[i] + f.k2 * s.r[i] * s.r[i], 0.5 * s.S_reg[i] - 1e-10);
}

TEST(SchwarzianBound, PerturbedLeadingCoefficient) {
    // S/2 = -3/(4r^2) + 7.5 eps cos(theta) r + O(r^2): regress S_reg/(2r) on 1, r, r^2 near the axis
    for (double eps : {0.01, 0.02})
        for (double th : {0.0, pi / 3}) {
            ModelParams p;
            p.eps = eps;
            const auto s = schwarzian_numeric(trace(builtin_model("perturbed", p), 0, th, 0.3), 0.01, 0.2, 4);
            const auto n = static_cast<Eigen::Index>(s.r.size());
            Eigen::MatrixXd A(n, 3);
            Eigen::VectorXd y(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double x = s.r[static_cast<std::size_t>(i)];
                A.row(i) << 1.0, x, x * x;
                y(i) = s.S_reg[static_cast<std::size_t>(i)] / (2 * x);
            }
            const Eigen::VectorXd c = A.householderQr().solve(y);
            EXPECT_NEAR(c(0), 7.5 * eps * std::cos(th), 0.02 * 7.5 * eps) << eps << ' ' << th;
        }
}

TEST(Phi, MonotoneWithinFocalRadius) {
    std::vector<std::pair<Model, double>> cases{{builtin_model("heisenberg"), 6.0},
                                                {builtin_model("overtwisted"), 4.0},
                                                {kcontact_model(1.0), pi - 0.01},
                                                {kcontact_model(-1.0), 4.0},
                                                {builtin_model("perturbed"), 4.5}};
    for (const auto& [m, R] : cases)
        for (double th : {0.0, 1.5, 3.5}) {
            const auto t = trace(m, 0.2, th, R);
            for (std::size_t k = 1; k < t.phi.size(); ++k) {
                ASSERT_GE(t.phi[k], t.phi[k - 1]) << m.id << " r=" << t.r[k];
                if (t.r[k] > 0.01) ASSERT_GT(t.a[k], 0.0) << m.id << " r=" << t.r[k];
            }
        }
}

TEST(TraceCsv, ColumnsAndRows) {
    const auto t = trace(builtin_model("heisenberg"), 0, 0, 1.0);
    std::ostringstream os;
    write_trace_csv(os, t, 64);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "r,w_theta,w_z,phi,a,S,S_reg");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (rows == 9) {
            // r = 0.25: S = -3/(2 r^2) = -24
            std::istringstream f(line);
            std::vector<double> v;
            for (std::string c; std::getline(f, c, ',');) v.push_back(std::stod(c));
            EXPECT_NEAR(v[0], 0.25, 1e-12);
            EXPECT_NEAR(v[5], -24.0, 1e-4);
        }
    }
    EXPECT_EQ(rows, static_cast<int>((t.r.size() + 63) / 64));
}
