#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pvfree/free_energy.hpp"

using namespace pvfree;

namespace {

const PauliVillarsScheme s123 = scheme_from_masses(1, 2, 3);

SpectralField small_gaussian(double amp) {
    return coulomb_project(spectral_transform(gaussian_test_field(amp, 1.0, {12, 12, 12}, {12, 12, 12})));
}

SpectralField random_magnetic(std::uint64_t seed) {
    GridField f;
    f.n = {8, 8, 8};
    f.box_length = {8, 8, 8};
    f.v.assign(f.size(), 0.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    for (auto& a : f.a) {
        a.resize(f.size());
        for (auto& x : a) x = N(rng);
    }
    return coulomb_project(spectral_transform(f));
}

}  // namespace

TEST(Remainder, Factors) {
    const auto r = remainder_factors(1.0, s123);
    EXPECT_NEAR(r.factor4, 2.0, 1e-15);
    EXPECT_NEAR(r.factor6, 22.0 / 15, 1e-15);
    EXPECT_NEAR(r.bound, 2.0 + 22.0 / 15, 1e-15);
    const auto q = remainder_factors(2.0, s123, 0.5);
    EXPECT_NEAR(q.factor4, 8.0, 1e-14);
    EXPECT_NEAR(q.factor6, 8 * 22.0 / 15, 1e-14);
    EXPECT_NEAR(q.bound, 0.5 * (q.factor4 + q.factor6), 1e-14);
    EXPECT_THROW(remainder_factors(-1.0, s123), domain_error);
    EXPECT_THROW(remainder_factors(1.0, s123, 0.0), domain_error);
}

TEST(FreeEnergy, ZeroField) {
    const auto z = coulomb_project(spectral_transform(gaussian_test_field(0.0, 1.0, {8, 8, 8}, {10, 10, 10})));
    const auto r = quadratic_free_energy(z, 1.0, s123);
    EXPECT_EQ(r.f2_total, 0.0);
    EXPECT_EQ(r.remainder_bound, 0.0);
    EXPECT_EQ(r.l2_F_squared, 0.0);
}

TEST(FreeEnergy, Preconditions) {
    const auto raw = spectral_transform(gaussian_test_field(1.0, 1.0, {8, 8, 8}, {10, 10, 10}));
    EXPECT_THROW(quadratic_free_energy(raw, 1.0, s123), gauge_precondition_error);
    EXPECT_THROW(quadratic_free_energy(coulomb_project(raw), 0.0, s123), domain_error);
}

TEST(FreeEnergy, PureMagneticHasNoGammaPart) {
    const auto r = quadratic_free_energy(random_magnetic(11), 1.0, s123);
    EXPECT_EQ(r.gamma_part, 0.0);
    EXPECT_EQ(r.f2_total, r.magnetic_electric_part);
    EXPECT_NE(r.f2_total, 0.0);
}

TEST(FreeEnergy, QuadraticScalingAndSum) {
    const auto a = quadratic_free_energy(small_gaussian(1.0), 1.0, s123);
    const auto b = quadratic_free_energy(small_gaussian(2.0), 1.0, s123);
    EXPECT_NEAR(b.f2_total / a.f2_total, 4.0, 1e-10);
    EXPECT_EQ(a.f2_total, a.magnetic_electric_part + a.gamma_part);
    EXPECT_NEAR(b.remainder_factor_4 / a.remainder_factor_4, 16.0, 1e-12);
    EXPECT_FALSE(a.quadrature_diagnostics.interpolated);
    EXPECT_LE(a.quadrature_diagnostics.richardson_max_rel, 1e-6);
    EXPECT_EQ(a.beta, 1.0);
}

TEST(FreeEnergy, WorkerCountIndependent) {
    FreeEnergyOptions one, many;
    one.workers = 1;
    many.workers = 3;
    const auto s = small_gaussian(1.0);
    const auto a = quadratic_free_energy(s, 0.7, s123, {}, one);
    const auto b = quadratic_free_energy(s, 0.7, s123, {}, many);
    EXPECT_EQ(a.f2_total, b.f2_total);
    EXPECT_EQ(a.gamma_part, b.gamma_part);
}

TEST(FreeEnergy, InterpolatedPathAgrees) {
    FreeEnergyOptions exact, coarse;
    coarse.max_exact_nodes = 16;
    const auto s = small_gaussian(1.0);
    const auto a = quadratic_free_energy(s, 1.0, s123, {}, exact);
    const auto b = quadratic_free_energy(s, 1.0, s123, {}, coarse);
    EXPECT_TRUE(b.quadrature_diagnostics.interpolated);
    EXPECT_NEAR(b.f2_total / a.f2_total, 1.0, 1e-3);
}
