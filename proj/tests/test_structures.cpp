// Frames, structure coefficients, invariants, models and structure files.
#include "srtight/registry.hpp"
#include "srtight/structures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace srtight;

namespace {

std::vector<Vec3d> random_probes(int n, double half, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-half, half);
    std::vector<Vec3d> p;
    for (int i = 0; i < n; ++i) p.push_back({u(rng), u(rng), u(rng)});
    return p;
}

std::vector<Vec3d> annulus_probes(double r_lo, double r_hi) {
    std::vector<Vec3d> p;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 7; ++j) {
            const double r = r_lo + (r_hi - r_lo) * i / 5, th = 0.9 * j;
            p.push_back({r * std::cos(th), r * std::sin(th), 0.3 * j - 1});
        }
    return p;
}

FrameStructure overtwisted_radial() { return radial_to_frame(make_radial_profile("cos2:1", "sin2:1")); }

} // namespace

TEST(Normalization, HeisenbergRandomProbes) {
    const auto rep = validate_normalization(heisenberg_frame(), random_probes(100, 5.0, 7));
    EXPECT_EQ(rep.probes, 100u);
    EXPECT_LE(rep.worst(), 1e-9);
}

TEST(Normalization, OvertwistedBothFrames) {
    EXPECT_LE(validate_normalization(overtwisted_radial(), annulus_probes(0.1, 3.0)).worst(), 1e-8);
    EXPECT_LE(validate_normalization(overtwisted_polar_frame(), annulus_probes(0.1, 3.0)).worst(), 1e-8);
}

TEST(Normalization, AllBuiltinModelsOnFixedGrid) {
    for (const char* name : {"heisenberg", "overtwisted", "kcontact", "radial", "perturbed"}) {
        for (double kappa : {1.0, -1.0, 0.5}) {
            ModelParams p;
            p.kappa = kappa;
            p.alpha = "kcos:1";
            p.beta = "kvers:1";
            const Model m = builtin_model(name, p);
            const auto rep = validate_normalization(m.structure, annulus_probes(0.0, 1.5));
            EXPECT_LE(rep.worst(), 1e-8) << m.id;
        }
    }
}

TEST(Normalization, ScaledReebViolatesByHalf) {
    const auto rep = validate_normalization(scale_reeb(heisenberg_frame(), 2.0), random_probes(10, 1.0, 3));
    // [f1, f2] = -f0 = -(1/2)(2 f0): c12^0 = -1/2
    EXPECT_NEAR(rep.checks[0].max_violation, 0.5, 1e-14);
    EXPECT_FALSE(rep.ok(1e-8));
}

TEST(StructureCoefficients, Heisenberg) {
    const auto c = structure_coefficients(heisenberg_frame(), {0.3, -1.2, 4.0});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                const double expect = (i == 1 && j == 2 && k == 0) ? -1.0 : (i == 2 && j == 1 && k == 0) ? 1.0 : 0.0;
                EXPECT_NEAR(c[i][j][k], expect, 1e-12) << i << j << k;
            }
}

TEST(StructureCoefficients, KContactFrameRelations) {
    for (double kappa : {1.0, -1.0, 2.5, -0.3}) {
        const Model m = kcontact_model(kappa);
        for (const Vec3d& q : {Vec3d{0, 0, 0}, Vec3d{0.2, -0.1, 0.3}, Vec3d{-0.4, 0.5, 0.1}}) {
            const auto c = structure_coefficients(m.structure, q);
            EXPECT_NEAR(c[2][1][0], 1.0, 1e-11);
            EXPECT_NEAR(c[1][0][2], kappa, 1e-11);
            EXPECT_NEAR(c[2][0][1], -kappa, 1e-11);
        }
    }
}

TEST(StructureCoefficients, Antisymmetric) {
    // a smooth non-normalized frame from expressions
    const auto s = expression_frame({{{"0.1*x", "0.2*y*x", "1 + 0.1*sin(x)"},
                                      {"1", "0.3*z", "y/2"},
                                      {"cos(z)*0.1", "1", "-x/2"}}});
    for (const auto& q : random_probes(20, 1.0, 11)) {
        const auto c = structure_coefficients(s, q);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) EXPECT_NEAR(c[i][j][k] + c[j][i][k], 0.0, 1e-12);
    }
}

TEST(StructureCoefficients, ExactJetAgreesWithFiniteDifferences) {
    FrameStructure fd = kcontact_frame(1.0);
    fd.eval_jet = nullptr;
    const FrameStructure ad = kcontact_frame(1.0);
    const Vec3d q{0.3, -0.2, 0.4};
    const auto a = structure_coefficients(ad, q), b = structure_coefficients(fd, q);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) EXPECT_NEAR(a[i][j][k], b[i][j][k], 1e-8);
}

TEST(Invariants, HeisenbergVanish) {
    const auto ck = invariants_chi_kappa(heisenberg_frame(), {1, 2, 3});
    EXPECT_NEAR(ck.chi, 0.0, 1e-12);
    EXPECT_NEAR(ck.kappa, 0.0, 1e-12);
}

TEST(Invariants, OvertwistedChiAndKappaBothRoutes) {
    // chi = kappa = r^2/2 (chi from the frame's own brackets [f0, f1] = -r^2 f2, [f0, f2] = 0)
    for (const auto& s : {overtwisted_radial(), overtwisted_polar_frame()})
        for (double r = 0.2; r <= 2.5 + 1e-12; r += 0.1) {
            const auto ck = invariants_chi_kappa(s, {r * std::cos(0.7), r * std::sin(0.7), 0.2});
            EXPECT_NEAR(ck.chi, r * r / 2, 1e-5 * r * r / 2) << s.name << " r=" << r;
            EXPECT_NEAR(ck.kappa, r * r / 2, 1e-5 * r * r / 2) << s.name << " r=" << r;
        }
}

TEST(Invariants, KContactChart) {
    for (double kappa : {1.0, -1.0, 0.25}) {
        const auto ck = invariants_chi_kappa(kcontact_frame(kappa), {0.1, 0.2, -0.1});
        EXPECT_NEAR(ck.chi, 0.0, 1e-10);
        EXPECT_NEAR(ck.kappa, kappa, 1e-10);
    }
    // the K-contact radial model alpha = cos(r), beta = 1 - cos(r)
    const auto ck = invariants_chi_kappa(radial_to_frame(make_radial_profile("kcos:1", "kvers:1")), {0.4, 0.3, 0});
    EXPECT_NEAR(ck.chi, 0.0, 1e-10);
    EXPECT_NEAR(ck.kappa, 1.0, 1e-10);
}

TEST(Invariants, RotationInvariance) {
    const auto s = overtwisted_radial();
    for (double ang : {0.3, 1.1, -2.0}) {
        const auto r = rotate_frame(s, ang);
        for (const Vec3d& q : {Vec3d{0.5, 0.4, 0}, Vec3d{-1.2, 0.3, 1}}) {
            const auto a = invariants_chi_kappa(s, q), b = invariants_chi_kappa(r, q);
            EXPECT_NEAR(a.chi, b.chi, 1e-8);
            EXPECT_NEAR(a.kappa, b.kappa, 1e-8);
        }
    }
}

TEST(RadialModels, StandardReducesToHeisenberg) {
    // alpha = 1, beta = r^2/2: f0 = d/dz, and [f1, f2] = -f0
    const auto s = radial_to_frame(make_radial_profile("one", "half"));
    for (const auto& q : random_probes(10, 2.0, 5)) {
        const auto f = s(q);
        EXPECT_NEAR(f[0][0], 0.0, 1e-14);
        EXPECT_NEAR(f[0][1], 0.0, 1e-14);
        EXPECT_NEAR(f[0][2], 1.0, 1e-14);
        const auto c = structure_coefficients(s, q);
        EXPECT_NEAR(c[1][2][0], -1.0, 1e-12);
    }
}

TEST(RadialModels, OvertwistedReebField) {
    // f0 = cos(r^2/2) dz + sin(r^2/2) d_theta; d_theta = (-y, x, 0)
    const auto s = overtwisted_radial();
    for (double r : {0.3, 1.0, 2.0}) {
        const double x = r * std::cos(0.4), y = r * std::sin(0.4);
        const auto f = s({x, y, 0.5});
        EXPECT_NEAR(f[0][2], std::cos(r * r / 2), 1e-12);
        EXPECT_NEAR(f[0][0], -std::sin(r * r / 2) * y, 1e-12);
        EXPECT_NEAR(f[0][1], std::sin(r * r / 2) * x, 1e-12);
    }
}

TEST(RadialModels, ContactViolationRejected) {
    // beta = r^2/2 gives gamma/r = alpha - s alpha'; alpha = 1 + s^2 makes it 1 - s^2
    EXPECT_THROW(radial_to_frame(make_radial_profile("poly:1,0,1", "half"), 3.0), Error);
    EXPECT_NO_THROW(radial_to_frame(make_radial_profile("poly:1,0,1", "half"), 0.99));
    try {
        radial_to_frame(make_radial_profile("poly:1,0,1", "half"), 3.0);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ContactViolation);
    }
    EXPECT_THROW(make_radial_profile("one", "poly:0.7"), Error);
    EXPECT_THROW(radial_to_frame(make_radial_profile("poly:0", "half")), Error);
}

TEST(RadialModels, TableProfileMatchesClosedForm) {
    const auto path = std::filesystem::temp_directory_path() / "srtight_ot_table.csv";
    {
        std::ofstream f(path);
        f << "r,alpha,beta\n";
        for (int i = 1; i <= 300; ++i) {
            const double r = 3.0 * i / 300;
            f << r << ',' << std::cos(r * r / 2) << ',' << std::sin(r * r / 2) << '\n';
        }
    }
    const auto p = make_radial_profile("table:" + path.string(), "table:" + path.string());
    EXPECT_NEAR(p.r_max, 3.0, 1e-12);
    for (double r : {0.5, 1.3, 2.2}) {
        EXPECT_NEAR(p.alpha(r), std::cos(r * r / 2), 1e-5);
        EXPECT_NEAR(p.beta(r), std::sin(r * r / 2), 1e-5);
    }
    std::filesystem::remove(path);
}

TEST(Frames, DomainRejectsOutsidePoints) {
    const auto s = perturbed_frame(0.01);
    EXPECT_THROW(s.require_inside({6, 0, 0}), Error);
    EXPECT_NO_THROW(s.require_inside({1, 0, 0}));
}

TEST(Frames, ExpressionFrameEqualsHeisenberg) {
    const auto e = expression_frame({{{"0", "0", "1"}, {"1", "0", "y/2"}, {"0", "1", "-x/2"}}});
    const auto h = heisenberg_frame();
    for (const auto& q : random_probes(10, 3, 1)) {
        const auto a = e(q), b = h(q);
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) EXPECT_NEAR(a[i][k], b[i][k], 1e-15);
    }
    EXPECT_THROW(expression_frame({{{"1 +", "0", "0"}, {"0", "0", "0"}, {"0", "0", "0"}}}), Error);
}

TEST(StructureFiles, JsonAndTomlAgree) {
    const auto dir = std::filesystem::temp_directory_path();
    const auto js = dir / "srtight_heis.json", tm = dir / "srtight_heis.toml";
    {
        std::ofstream f(js);
        f << R"({"kind": "frame", "name": "heis-file",
                 "f0": ["0", "0", "1"], "f1": ["1", "0", "y/2"], "f2": ["0", "1", "-x/2"],
                 "domain": {"kind": "box", "lo": [-10, -10, -10], "hi": [10, 10, 10]},
                 "orbit": {"base": [0, 0, 0], "z_min": -1, "z_max": 1}})";
    }
    {
        std::ofstream f(tm);
        f << "kind = \"frame\"\nname = \"heis-file\"\nf0 = [\"0\", \"0\", \"1\"]\nf1 = [\"1\", \"0\", \"y/2\"]\n"
             "f2 = [\"0\", \"1\", \"-x/2\"]\n[domain]\nkind = \"cylinder\"\nradius = 10.0\n";
    }
    const Model a = load_model_file(js.string()), b = load_model_file(tm.string());
    EXPECT_EQ(a.id, "heis-file");
    EXPECT_LE(validate_normalization(a.structure, random_probes(20, 2, 4)).worst(), 1e-12);
    EXPECT_LE(validate_normalization(b.structure, random_probes(20, 2, 4)).worst(), 1e-12);
    EXPECT_EQ(b.structure.domain.kind, Domain::Kind::Cylinder);
    std::filesystem::remove(js);
    std::filesystem::remove(tm);
}

TEST(StructureFiles, RadialAndKContactKinds) {
    const Model r = model_from_json(nlohmann::json{{"kind", "radial"}, {"alpha", "cos2:1"}, {"beta", "sin2:1"}});
    ASSERT_TRUE(r.r_tight.has_value());
    EXPECT_NEAR(*r.r_tight, std::sqrt(2 * std::numbers::pi), 1e-12);
    const Model k = model_from_json(nlohmann::json{{"kind", "kcontact"}, {"kappa", 1.0}});
    EXPECT_NEAR(*k.r_inj, std::numbers::pi, 1e-15);
    EXPECT_THROW(model_from_json(nlohmann::json{{"kind", "sphere"}}), Error);
    EXPECT_THROW(model_from_json(nlohmann::json{{"kind", "frame"}, {"f0", {"1", "0"}}}), Error);
}
