// Canonical-curvature Cauchy problem, tau(A, C) by three routes and the curvature bound.
#include "srtight/curvature.hpp"
#include "srtight/jacobi.hpp"
#include "srtight/registry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace srtight;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Jacobi4, ClosedFormSolutions) {
    const auto a = solve_jacobi4(kcontact_curvatures(1.0), 7.0);
    for (double r = 0; r <= 7.0; r += 0.05) {
        EXPECT_NEAR(a.x0(r), 1 - std::cos(r), 1e-10) << r;
        EXPECT_NEAR(a.x2(r), std::cos(r), 1e-10) << r;
    }
    ASSERT_TRUE(a.first_zero_x0.has_value());
    EXPECT_NEAR(*a.first_zero_x0, 2 * pi, 1e-6);
    ASSERT_TRUE(a.first_zero_x2.has_value());
    EXPECT_NEAR(*a.first_zero_x2, pi / 2, 1e-10);

    const auto h = solve_jacobi4(kcontact_curvatures(0.0), 10.0);
    for (double r = 0; r <= 10.0; r += 0.1) EXPECT_NEAR(h.x0(r), r * r / 2, 1e-10 * (1 + r * r));
    EXPECT_FALSE(h.first_zero_x0.has_value());
    EXPECT_FALSE(h.first_zero_x2.has_value());

    const auto s = solve_jacobi4(kcontact_curvatures(-1.0), 5.0);
    for (double r = 0; r <= 5.0; r += 0.1) EXPECT_NEAR(s.x0(r), std::cosh(r) - 1, 1e-10 * std::cosh(r));
    EXPECT_FALSE(s.first_zero_x0.has_value());
}

TEST(Jacobi4, FirstZerosExceedTau) {
    for (double ra = -2; ra <= 2; ra += 0.5)
        for (double rc = -2; rc <= 2; rc += 0.5) {
            const auto s = solve_jacobi4(constant_curvatures(ra, rc), 8.0);
            const double tau = tau_AC(std::hypot(1.0, ra), std::hypot(1.0, rc));
            if (s.first_zero_x0) EXPECT_GT(*s.first_zero_x0, tau) << ra << ' ' << rc;
            if (s.first_zero_x2) EXPECT_GT(*s.first_zero_x2, tau) << ra << ' ' << rc;
        }
}

TEST(Jacobi4, AgreesWithJacobiTraceForKContact) {
    const Model m = kcontact_model(1.0);
    const auto t = jacobi_trace(m.structure, m.orbit, 0.0, 0.8, 2 * pi + 0.05);
    const auto s = solve_jacobi4(*m.curvatures, 2 * pi + 0.05);
    for (double r = 0; r <= 2 * pi; r += 0.01) EXPECT_NEAR(std::abs(s.x0(r)), std::abs(t.at(r).th[0]), 1e-6) << r;
}

TEST(Tau, ClosedForms) {
    EXPECT_NEAR(tau_AC(1, 1), 2 * pi / (3 * std::sqrt(3.0)), 1e-15);
    EXPECT_NEAR(tau_AC(std::sqrt(2.0), 1), 1.05, 0.005);
    EXPECT_NEAR(tau_AC(1, 2), 1.0, 1e-15); // disc = 0: 2/C
    EXPECT_NEAR(tau_AC(2, 3), std::log(2.0), 1e-15);
    EXPECT_THROW(tau_AC(0, 1), Error);
    EXPECT_THROW(tau_AC(1, -1), Error);
}

TEST(Tau, QuadratureAgreesOnGrid) {
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double A = 0.5 + 3.5 * i / 9, C = 0.5 + 3.5 * j / 9;
            EXPECT_NEAR(tau_AC_quadrature(A, C), tau_AC(A, C), 1e-10) << A << ' ' << C;
        }
    EXPECT_NEAR(tau_AC_quadrature(1, 1), 2 * pi / (3 * std::sqrt(3.0)), 1e-8);
}

TEST(Tau, RiccatiBlowUp) {
    EXPECT_NEAR(riccati_blowup(1, 1), tau_AC(1, 1), 1e-6);
    EXPECT_NEAR(riccati_blowup(1, 0.01), pi / 2, 0.01 * pi / 2);
    EXPECT_NEAR(riccati_blowup(1, 0.01), tau_AC(1, 0.01), 1e-6);
    double prev_a = INFINITY;
    for (double A = 0.5; A <= 4; A += 0.5) {
        double prev_c = INFINITY;
        const double ta = riccati_blowup(A, 1.0);
        EXPECT_LT(ta, prev_a);
        prev_a = ta;
        for (double C = 0.5; C <= 4; C += 0.5) {
            const double t = riccati_blowup(A, C);
            EXPECT_LT(t, prev_c);
            prev_c = t;
        }
    }
}

TEST(CurvatureBound, KContactAndConstantProfiles) {
    for (double kappa : {1.0, -1.0}) {
        const auto b = curvature_bound_from_profiles({kcontact_curvatures(kappa)}, 0.0, 3.0);
        EXPECT_NEAR(b.A, std::sqrt(2.0), 1e-15);
        EXPECT_NEAR(b.C, 1.0, 1e-15);
        EXPECT_EQ(b.kind, BoundFit::Kind::Curvature);
    }
    const auto z = curvature_bound_from_profiles({kcontact_curvatures(0.0)}, 0.0, 3.0);
    EXPECT_EQ(z.A, 1.0);
    EXPECT_EQ(z.C, 1.0);
    const auto c = curvature_bound_from_profiles({constant_curvatures(3, 4)}, 0.0, 1.0);
    EXPECT_NEAR(c.A, std::sqrt(10.0), 1e-15);
    EXPECT_NEAR(c.C, std::sqrt(17.0), 1e-15);
}

TEST(CurvatureBound, SupremumOverProfilesAndRadii) {
    CurvatureProfile p{[](double r) { return std::sin(r); }, [](double r) { return r - 1; }, "varying"};
    const auto b = curvature_bound_from_profiles({p, constant_curvatures(0.5, 0.0)}, 0.0, 2.0, 2001);
    EXPECT_NEAR(b.A, std::sqrt(2.0), 1e-6); // sin reaches 1 at pi/2
    EXPECT_NEAR(b.C, std::sqrt(2.0), 1e-12);
    EXPECT_EQ(b.samples, 2u);
    EXPECT_THROW(curvature_bound_from_profiles({}, 0, 1), Error);
}
