#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pvfree/matsubara_oracles.hpp"
#include "pvfree/multipliers.hpp"

using namespace pvfree;

namespace {
const PauliVillarsScheme s123 = scheme_from_masses(1, 2, 3);
const PauliVillarsScheme single = unchecked_scheme({1, 2, 3}, {1, 0, 0});
}  // namespace

TEST(BesselIdentity, ReferenceValues) {
    // mpmath: 2 K0(2), 2 K1(2)
    const auto a = bessel_integral_identity_check(0.0, 1.0, 1.0, {});
    EXPECT_NEAR(a.lhs, 0.227787745499066871, 1e-9);
    EXPECT_NEAR(a.rhs_corrected / a.lhs, 1.0, 1e-6);
    EXPECT_TRUE(std::isinf(a.rhs_as_printed));
    const auto b = bessel_integral_identity_check(1.0, 1.0, 1.0, {});
    EXPECT_NEAR(b.lhs, 0.279731763633044855, 1e-9);
    EXPECT_NEAR(b.rhs_corrected / b.lhs, 1.0, 1e-6);
    const auto c = bessel_integral_identity_check(0.5, 0.25, 4.0, {});
    // 2 (1/16)^(1/4) K_1/2(2) = sqrt(pi) e^-2 / 2
    EXPECT_NEAR(c.lhs, std::sqrt(std::numbers::pi) * std::exp(-2.0) / 2, 1e-9);
    EXPECT_NEAR(c.rhs_corrected / c.lhs, 1.0, 1e-6);
    EXPECT_GT(std::abs(c.rhs_as_printed / c.lhs - 1.0), 1e-2);
}

TEST(Boundedness, MatsubaraSum) {
    // Each sign of l contributes at most (1/pi^2) Sum_{l>=1} 1/(2l-1)^2 = 1/8
    for (double b : {0.01, 0.1, 1.0, 10.0, 100.0}) EXPECT_LE(matsubara_boundedness_sum(1.0, b, 4000), 0.25);
    EXPECT_GT(matsubara_boundedness_sum(1.0, 0.01, 4000), 0.2);
}

TEST(DividedDifferences, ReciprocalMatchesDirectCombination) {
    // Sum_j c_j / (A + M_j) with well-separated masses
    const auto w = detail::species_weights(s123);
    const double A = 2.5;
    const auto d = detail::dd_reciprocal(A, w.M);
    double direct = 0.0;
    for (int j = 0; j < 3; ++j) direct += s123.c[j] / (A + w.M[j]);
    EXPECT_NEAR(w.w0 * d.f0 + w.w1 * d.f01 + w.w2 * d.f012, direct, 1e-15);
}

TEST(GammaOracle, AgreesWithClosedForm) {
    const double o = gamma_matsubara_oracle(0.5, 1.0, s123);
    EXPECT_NEAR(o / gamma(0.5, 1.0, s123).gamma_total, 1.0, 1e-3);
}

TEST(GammaOracle, ZeroMomentumMatchesScalar) {
    const auto b = matsubara_oracles(0.0, 1.0, s123);
    EXPECT_NEAR(b.gamma.value / b.scalar.value, 1.0, 1e-6);
    EXPECT_NEAR(b.vector.value, 0.0, 1e-14);
}

TEST(GammaOracle, TruncationSelfConsistent) {
    OracleSpec a, b;
    b.l_max = 800;
    const auto ra = oracle_result(OracleKind::gamma, 0.5, 1.0, s123, a);
    const auto rb = oracle_result(OracleKind::gamma, 0.5, 1.0, s123, b);
    EXPECT_LE(std::abs(ra.value - rb.value), ra.tail_estimate + ra.error_estimate);
}

TEST(VectorOracle, VanishesQuadraticallyAtOrigin) {
    const double a = vector_multiplier_oracle(1e-3, 1.0, s123);
    const double b = vector_multiplier_oracle(2e-3, 1.0, s123);
    EXPECT_LE(std::abs(a), 1e-5);
    EXPECT_NEAR(b / a, 4.0, 0.05);
}

TEST(SingleSpecies, PartialSumsGrowAndOraclesRaise) {
    const OracleSpec spec;
    const auto t = matsubara_oracle_terms(0.5, 1.0, single, spec);
    for (auto kind : {OracleKind::gamma, OracleKind::vector, OracleKind::scalar}) {
        const auto ps = oracle_partial_sums(t, kind, {50, 100, 200, 400});
        EXPECT_LT(ps[0], ps[1]);
        EXPECT_LT(ps[1], ps[2]);
        EXPECT_LT(ps[2], ps[3]);
        EXPECT_THROW(reduce_oracle(t, kind, spec), oracle_accuracy_error);
    }
    const auto g = oracle_partial_sums(t, OracleKind::gamma, {100, 200, 400});
    EXPECT_GE(g[2] - g[1], g[1] - g[0]);
}

TEST(OracleSpec, Validation) {
    OracleSpec s;
    s.l_max = 4;
    EXPECT_THROW(gamma_matsubara_oracle(1.0, 1.0, s123, s), domain_error);
    EXPECT_THROW(gamma_matsubara_oracle(-1.0, 1.0, s123), domain_error);
}
