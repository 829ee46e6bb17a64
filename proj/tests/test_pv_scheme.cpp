#include <cmath>

#include <gtest/gtest.h>

#include "pvfree/io.hpp"
#include "pvfree/pv_scheme.hpp"

using namespace pvfree;

TEST(PvScheme, WorkedMasses) {
    const auto s = scheme_from_masses(1, 2, 3);
    EXPECT_DOUBLE_EQ(s.c[0], 1.0);
    EXPECT_NEAR(s.c[1], -1.6, 1e-15);
    EXPECT_NEAR(s.c[2], 0.6, 1e-15);
    EXPECT_LE(std::abs(s.c[0] + s.c[1] + s.c[2]), 1e-14);
    EXPECT_LE(std::abs(s.c[0] + 4 * s.c[1] + 9 * s.c[2]), 1e-12);
    // exp(-(1/2)(-1.6 log 4 + 0.6 log 9))
    EXPECT_NEAR(s.cutoff, 1.5681053634, 1e-9);
}

TEST(PvScheme, InvalidMasses) {
    EXPECT_THROW(scheme_from_masses(1, 2, 2), degenerate_scheme_error);
    EXPECT_THROW(scheme_from_masses(1, 3, 2), domain_error);
    EXPECT_THROW(scheme_from_masses(0, 2, 3), domain_error);
    EXPECT_THROW(scheme_from_masses(-1, 2, 3), domain_error);
}

TEST(PvScheme, CoefficientSigns) {
    for (double m1 : {1.5, 3.0, 40.0}) {
        const auto s = scheme_from_masses(1, m1, 1.7 * m1);
        EXPECT_LT(s.c[1], 0.0);
        EXPECT_GT(s.c[2], 0.0);
    }
}

TEST(PvScheme, CutoffInversion) {
    const auto s = scheme_from_cutoff(1.0, 1.5681053634, 1.5);
    EXPECT_NEAR(s.m[1], 2.0, 1e-6);
    EXPECT_NEAR(s.m[2], 3.0, 1e-6);
}

TEST(PvScheme, CutoffInfeasible) {
    EXPECT_THROW(scheme_from_cutoff(1.0, 1.0, 2.0), infeasible_cutoff_error);
    EXPECT_THROW(scheme_from_cutoff(1.0, 0.5, 2.0), infeasible_cutoff_error);
}

TEST(PvScheme, CutoffRoundTripSweep) {
    for (double ratio : {1.5, 2.0, 4.0}) {
        const double r2 = ratio * ratio;
        for (double target = 1.5; target <= 1e4; target *= 3.1) {
            const auto s = scheme_from_cutoff(1.0, target, ratio);
            EXPECT_NEAR(s.cutoff / target, 1.0, 1e-8);
            const auto r = scheme_residuals(s);
            EXPECT_LE(r.sum_c, 1e-14);
            EXPECT_LE(r.sum_c_m2, 1e-12);
            EXPECT_LE(std::abs(s.c[1]), r2 / (r2 - 1));
            EXPECT_LE(std::abs(s.c[2]), 1 / (r2 - 1));
        }
    }
}

TEST(PvScheme, LargeCutoffSatisfiesConditions) {
    const auto s = scheme_from_cutoff(1.0, 100.0, 2.0);
    const auto r = scheme_residuals(s);
    EXPECT_LE(r.sum_c, 1e-14);
    EXPECT_LE(r.sum_c_m2, 1e-12);
}

TEST(PvScheme, CutoffScaleInvariant) {
    const auto a = scheme_from_masses(1, 2, 3);
    const auto b = scheme_from_masses(5, 10, 15);
    EXPECT_NEAR(a.cutoff, b.cutoff, 1e-13);
}

TEST(PvScheme, JsonRoundTrip) {
    const auto s = scheme_from_masses(1, 2, 3);
    const auto text = dump_json(scheme_to_json(s));
    const auto t = scheme_from_json(text);
    EXPECT_EQ(s.m, t.m);
    EXPECT_EQ(s.c, t.c);
    EXPECT_EQ(s.cutoff, t.cutoff);
    EXPECT_NE(text.find("-1.6000000000000001"), std::string::npos);
}

TEST(PvScheme, JsonRejectsInconsistentCoefficients) {
    EXPECT_THROW(scheme_from_json(R"({"m":[1,2,3],"c":[1,-1.5,0.5],"cutoff":1})"), invalid_data_error);
    EXPECT_THROW(scheme_from_json(R"({"m":[1,2]})"), malformed_payload_error);
    EXPECT_THROW(scheme_from_json("not json"), malformed_payload_error);
}
