#include <gtest/gtest.h>

#include <set>

#include "csk3/surface.hpp"

using namespace csk3;

namespace {
Rational q(long n, long d = 1) { return make_rational(n, d); }

const SprCertificate& cert_325() {
    static const SprCertificate c = spr_check(3, 2, 5, 100);
    return c;
}
}  // namespace

TEST(SurfaceFamily, Validation) {
    SurfaceFamily S(3, 2);
    EXPECT_EQ(S.f(q(1)), q(15));
    EXPECT_THROW(SurfaceFamily(4, 2), InvalidArgument);
    EXPECT_THROW(SurfaceFamily(3, 0), InvalidArgument);
    EXPECT_THROW(SurfaceFamily(0, 1), InvalidArgument);
}

TEST(PhiMap, Examples) {
    auto P = phi_map(3, 2, 5, CurvePoint(q(-3, 5), q(4, 25)), TorsorPoint{q(1), q(1)});
    EXPECT_EQ(P, (SurfacePoint{q(-3, 5), q(4, 25), q(1)}));
    EXPECT_FALSE(P.exceptional);
    EXPECT_TRUE(surface_contains(SurfaceFamily(3, 2), P));

    auto R = phi_map(3, 2, 5, CurvePoint(q(-3, 5), q(4, 25)), TorsorPoint{q(1), q(-1)});
    EXPECT_EQ(R, (SurfacePoint{q(-3, 5), q(-4, 25), q(1)}));

    EXPECT_THROW(phi_map(3, 2, 5, CurvePoint::infinity(), TorsorPoint{q(1), q(1)}), ExceptionalPoint);
    EXPECT_THROW(phi_map(3, 2, 5, CurvePoint(q(1), q(1)), TorsorPoint{q(1), q(1)}), OffCurve);
    EXPECT_THROW(phi_map(3, 2, 5, CurvePoint(q(-3, 5), q(4, 25)), TorsorPoint{q(1), q(2)}), OffCurve);
    // Mismatched C: (1,1) is on H_2^5 but not on H_2^13.
    EXPECT_THROW(phi_map(3, 2, 13, CurvePoint(q(-3, 5), q(4, 25)), TorsorPoint{q(1), q(1)}), OffCurve);
}

TEST(SurfaceContains, Examples) {
    SurfaceFamily S(3, 2);
    EXPECT_TRUE(surface_contains(S, {q(-3, 5), q(4, 25), q(1)}));
    EXPECT_FALSE(surface_contains(S, {q(0), q(1), q(0)}));
    for (auto T : {q(0), q(1), q(-7, 3)}) {
        auto m = surface_contains(S, {q(1), q(0), T});
        EXPECT_TRUE(m.on_surface);
        EXPECT_TRUE(m.exceptional);
    }
    EXPECT_FALSE(surface_contains(S, {q(-3, 5), q(4, 25), q(1)}).exceptional);
}

TEST(EvaluationClass, Examples) {
    EXPECT_EQ(evaluation_class(2, q(1)).representative, 5);
    EXPECT_EQ(evaluation_class(2, q(3)).representative, 13);
    EXPECT_EQ(evaluation_class(1, q(0)).representative, 1);
    EXPECT_EQ(evaluation_class(1, q(2)).representative, 17);
    // 1 + 4/16 = 5/4.
    EXPECT_EQ(evaluation_class(2, q(1, 2)).representative, 5);
}

TEST(FiberTwistClass, Examples) {
    EXPECT_EQ(fiber_twist_class(3, 2, q(1)).representative, 15);
    EXPECT_EQ(fiber_twist_class(3, 2, q(3)).representative, 39);
    EXPECT_EQ(fiber_twist_class(7, 1, q(0)).representative, 7);
}

TEST(Spr, ThreeTwoFive) {
    const auto& c = cert_325();
    EXPECT_TRUE(c.complete());
    EXPECT_TRUE(c.verify());
    EXPECT_FALSE(c.uses_external_facts());
    EXPECT_EQ(*c.torsor_witness, (TorsorPoint{q(1), q(1)}));
    ASSERT_TRUE(c.jacobian);
    EXPECT_EQ(c.jacobian->curve.D(), 5);
    EXPECT_EQ(*c.jacobian->witness, CurvePoint(q(-4), q(6)));
    ASSERT_TRUE(c.curve);
    EXPECT_EQ(c.curve->curve.D(), 15);
    EXPECT_EQ(*c.curve->witness, CurvePoint(q(-9), q(36)));
}

TEST(Spr, SevenOneSeventeen) {
    auto c = spr_check(7, 1, 17, 100);
    EXPECT_EQ(c.torsor_status, LegStatus::Found);
    EXPECT_EQ(*c.torsor_witness, (TorsorPoint{q(2), q(1)}));
    EXPECT_EQ(c.jacobian_status, LegStatus::Found);
    EXPECT_EQ(c.jacobian->curve.D(), 34);
    EXPECT_TRUE(c.jacobian->verify());
    EXPECT_EQ(c.curve_status, LegStatus::Inconclusive);
    EXPECT_FALSE(c.complete());
    EXPECT_TRUE(c.verify());

    auto facts = ExternalFactTable::load(CSK3_FACT_TABLE);
    auto e = spr_check(7, 1, 17, 100, &facts);
    EXPECT_EQ(e.curve_status, LegStatus::External);
    EXPECT_TRUE(e.complete());
    EXPECT_TRUE(e.uses_external_facts());
}

TEST(Spr, InconclusiveTorsor) {
    auto c = spr_check(3, 2, 3, 100);
    EXPECT_EQ(c.torsor_status, LegStatus::Inconclusive);
    EXPECT_FALSE(c.complete());
    EXPECT_THROW(spr_check(3, 2, 12, 100), InvalidArgument);
    EXPECT_THROW(spr_check(4, 2, 5, 100), InvalidArgument);
}

TEST(Spr, ForgedWitnessFailsVerify) {
    auto c = cert_325();
    c.torsor_witness = TorsorPoint{q(1), q(2)};
    EXPECT_FALSE(c.verify());
    auto d = cert_325();
    d.curve->witness = CurvePoint(q(0), q(0));
    EXPECT_FALSE(d.verify());
}

TEST(Atlas, SmallGridContainsBasePoint) {
    auto A = atlas_generate(cert_325(), 1, 1);
    EXPECT_NE(std::find(A.points.begin(), A.points.end(), SurfacePoint{q(-3, 5), q(4, 25), q(1)}), A.points.end());
}

TEST(Atlas, GridTenThree) {
    auto A = atlas_generate(cert_325(), 10, 3);
    EXPECT_GE(A.points.size(), 30u);
    EXPECT_TRUE(std::is_sorted(A.points.begin(), A.points.end()));
    EXPECT_EQ(std::adjacent_find(A.points.begin(), A.points.end()), A.points.end());
    SurfaceFamily S(3, 2);
    for (const auto& P : A.points) {
        auto m = surface_contains(S, P);
        ASSERT_TRUE(m.on_surface) << P.str();
        ASSERT_FALSE(m.exceptional) << P.str();
    }
}

TEST(Atlas, ClassCoherence) {
    for (long C : {5, 13}) {
        auto A = atlas_generate(spr_check(3, 2, C, 100), 4, 2);
        ASSERT_FALSE(A.points.empty());
        for (const auto& P : A.points) ASSERT_EQ(evaluation_class(2, P.T).representative, C) << P.str();
    }
}

TEST(Atlas, DisjointAcrossClasses) {
    auto A5 = atlas_generate(spr_check(3, 2, 5, 100), 4, 2);
    auto A13 = atlas_generate(spr_check(3, 2, 13, 100), 4, 2);
    std::set<SurfacePoint> s5(A5.points.begin(), A5.points.end());
    for (const auto& P : A13.points) ASSERT_FALSE(s5.count(P)) << P.str();
}

TEST(Atlas, FiberWitnessIsNonTorsion) {
    auto A = atlas_generate(cert_325(), 5, 2);
    SurfaceFamily S(3, 2);
    for (const auto& P : A.points) {
        auto D = fiber_twist_class(3, 2, P.T).representative;
        auto W = detail::model_to_normalized(S.f(P.T), CurvePoint(P.X, P.Y));
        auto E = TwistedCurve(D).normalized();
        ASSERT_TRUE(on_curve(E, W)) << P.str();
        ASSERT_FALSE(torsion_test(E, W)) << P.str();
    }
}

TEST(Atlas, DoubleCoverSymmetry) {
    const auto& c = cert_325();
    auto curve_pts = atlas_curve_points(c, 3);
    std::size_t skipped = 0;
    auto torsor_pts = atlas_torsor_points(c, 2, skipped);
    for (const auto& P : curve_pts) {
        if (P.y() == 0) continue;
        for (const auto& Q : torsor_pts) {
            auto a = phi_map(3, 2, 5, P, Q);
            auto b = phi_map(3, 2, 5, P, hyperelliptic_involution(Q));
            ASSERT_EQ(b, (SurfacePoint{a.X, -a.Y, a.T}));
        }
    }
    auto A = atlas_generate(c, 3, 2);
    std::set<SurfacePoint> all(A.points.begin(), A.points.end());
    for (const auto& P : A.points) EXPECT_TRUE(all.count({P.X, -P.Y, P.T}));
}

TEST(Atlas, RequiresCompleteWitnesses) {
    EXPECT_THROW(atlas_generate(spr_check(7, 1, 17, 100), 2, 2), InvalidArgument);
    EXPECT_THROW(atlas_generate(cert_325(), 0, 2), InvalidArgument);
}

TEST(TwistModel, Roundtrip) {
    // 15 * 4 y^2 = x^3 - x against y^2 = x^3 - 225 x.
    CurvePoint W(q(-9), q(36));
    auto M = detail::normalized_to_model(60, W);
    EXPECT_EQ(Rational(60) * M.y() * M.y(), M.x() * M.x() * M.x() - M.x());
    EXPECT_EQ(detail::model_to_normalized(Rational(60), M), W);
}
