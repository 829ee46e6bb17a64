#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pvfree/special_functions.hpp"

using namespace pvfree;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Matsubara, Frequencies) {
    EXPECT_DOUBLE_EQ(matsubara_frequency(1, pi), 1.0);
    EXPECT_DOUBLE_EQ(matsubara_frequency(0, pi), -1.0);
    EXPECT_NEAR(matsubara_frequency(-3, 2.0), -3.5 * pi, 1e-15);
    EXPECT_THROW(matsubara_frequency(1, 0.0), domain_error);
    EXPECT_THROW(matsubara_frequency(1, -1.0), domain_error);
    for (std::int64_t l : {-1000000LL, -1LL, 0LL, 1LL, 2LL, 1000000LL}) EXPECT_NE(matsubara_frequency(l, 3.0), 0.0);
}

TEST(XTanhX, PartialSums) {
    EXPECT_EQ(x_tanh_x_partial(0.0, 12), 0.0);
    EXPECT_NEAR(x_tanh_x_partial(1.0, 10000), std::tanh(1.0), 1e-4);
    // mpmath: sum over l = -9..10 of 4/((2l-1)^2 pi^2 + 4)
    EXPECT_NEAR(x_tanh_x_partial(1.0, 10), 0.74135355340486909, 1e-15);
    EXPECT_EQ(x_tanh_x_partial(-2.0, 50), x_tanh_x_partial(2.0, 50));
    for (double x : {0.2, 1.0, 3.0, -5.0}) {
        double prev = 0.0;
        for (int L : {1, 3, 10, 30, 100, 1000}) {
            const double v = x_tanh_x_partial(x, L);
            EXPECT_GE(v, prev);
            EXPECT_LE(v, x * std::tanh(x));
            prev = v;
        }
    }
}

TEST(Theta2, ReferenceValues) {
    // mpmath nsum of exp(-s ((2l-1) pi / beta)^2) at 30 digits.
    struct Case {
        double s, beta, value;
    };
    const Case cases[] = {{1.0, 2 * pi, 1.7722704969843799523},
                          {0.05, 0.5, 0.2778223048035785425},
                          {0.5, 2.0, 0.58245599134966149928},
                          {5.0, 10.0, 1.2445655330056030781},
                          {5.0, 0.5, 3.7560848674583408043e-86},
                          {0.05, 10.0, 12.615662610100799891}};
    for (const auto& c : cases) {
        EXPECT_NEAR(theta2(c.s, c.beta, ThetaRepresentation::direct) / c.value, 1.0, 1e-12) << c.s << " " << c.beta;
        EXPECT_NEAR(theta2(c.s, c.beta, ThetaRepresentation::poisson) / c.value, 1.0, 1e-10) << c.s << " " << c.beta;
    }
}

TEST(Theta2, RepresentationsAgreeOnGrid) {
    for (double s : {0.05, 0.5, 5.0})
        for (double b : {0.5, 2.0, 10.0}) {
            const double d = theta2(s, b, ThetaRepresentation::direct);
            const double p = theta2(s, b, ThetaRepresentation::poisson);
            EXPECT_LE(std::abs(p - d) / d, 1e-10) << s << " " << b;
        }
}

TEST(Theta2, DecreasingInS) {
    double prev = INFINITY;
    for (double s = 0.01; s < 100; s *= 1.5) {
        const double v = theta2(s, 1.3);
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_THROW(theta2(0.0, 1.0), domain_error);
    EXPECT_THROW(theta2(1.0, 0.0), domain_error);
}

TEST(BesselK, ClosedFormHalfOrder) {
    for (double x : {0.5, 1.0, 5.0}) {
        const double exact = std::sqrt(pi / (2 * x)) * std::exp(-x);
        EXPECT_NEAR(bessel_k(0.5, x) / exact, 1.0, 1e-8);
    }
    EXPECT_NEAR(bessel_k(0.5, 1.0), 0.4610685, 1e-7);
}

TEST(BesselK, ReferenceValues) {
    // mpmath besselk
    EXPECT_NEAR(bessel_k(0.0, 1.0, 1e-12) / 0.421024438240708333, 1.0, 1e-11);
    EXPECT_NEAR(bessel_k(1.0, 1.0, 1e-12) / 0.601907230197234575, 1.0, 1e-11);
    EXPECT_NEAR(bessel_k(2.5, 3.0, 1e-12) / 0.0840606319741173827, 1.0, 1e-11);
}

TEST(BesselK, DecreasingAndDomain) {
    for (double nu : {0.0, 0.7, 2.0}) {
        double prev = INFINITY;
        for (double x = 0.05; x < 50; x *= 1.4) {
            const double v = bessel_k(nu, x);
            EXPECT_LT(v, prev);
            prev = v;
        }
    }
    EXPECT_THROW(bessel_k(0.0, 0.0), domain_error);
    EXPECT_THROW(bessel_k(0.0, -1.0), domain_error);
}

TEST(FermiThermo, Examples) {
    const auto p = fermi_thermo(0.0, 2.0);
    EXPECT_EQ(p.occupation, 0.5);
    EXPECT_NEAR(p.entropy, std::log(2.0), 1e-15);
    EXPECT_NEAR(p.free_energy_density, -std::log(2.0) / 2, 1e-15);
    const auto q = fermi_thermo(1.0, 1.0);
    EXPECT_NEAR(q.free_energy_density, -0.813261687518222834, 1e-15);
    EXPECT_NEAR(1.0 * (q.occupation - 0.5) - q.entropy, -0.813261687518222834, 1e-12);
    EXPECT_NEAR(fermi_thermo(3, 0.7).occupation + fermi_thermo(-3, 0.7).occupation, 1.0, 1e-15);
    EXPECT_THROW(fermi_thermo(1.0, 0.0), domain_error);
}

TEST(FermiThermo, IdentityOverflowSafe) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> lam(-50, 50), lb(std::log(0.01), std::log(100.0));
    for (int i = 0; i < 200; ++i) {
        const double l = lam(rng), b = std::exp(lb(rng));
        const auto p = fermi_thermo(l, b);
        ASSERT_TRUE(std::isfinite(p.free_energy_density));
        EXPECT_GE(p.entropy, 0.0);
        EXPECT_LE(std::abs(l * (p.occupation - 0.5) - p.entropy / b - p.free_energy_density), 1e-12 * std::max(1.0, std::abs(l)));
    }
    const auto far = fermi_thermo(50.0, 100.0);
    EXPECT_LE(far.occupation, 1e-300);
    EXPECT_NEAR(far.free_energy_density, -25.0, 1e-12);
}
