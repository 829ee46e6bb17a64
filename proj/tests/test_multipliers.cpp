#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pvfree/multipliers.hpp"
#include "pvfree/printed_forms.hpp"

using namespace pvfree;

namespace {
const PauliVillarsScheme s123 = scheme_from_masses(1, 2, 3);
constexpr double pi = std::numbers::pi;
}  // namespace

TEST(Uehling, Values) {
    EXPECT_EQ(uehling(0.0), 0.0);
    // mpmath quad of the defining integral
    EXPECT_NEAR(uehling(1.0), 0.0192353209028294045, 1e-15);
    EXPECT_NEAR(uehling(5.0), 0.18649969917108941, 1e-14);
    EXPECT_NEAR(uehling(100.0), 0.80047223968144933, 1e-12);
    for (double k : {1e2, 1e3, 1e4}) EXPECT_LE(std::abs(uehling(k) - 2 / (3 * pi) * std::log(k)), 1.0);
    EXPECT_THROW(uehling(-1.0), domain_error);
}

TEST(MZero, Values) {
    // mpmath quad of -(2/pi) int u(1-u) Sum c log(m^2 + u(1-u)k^2)
    EXPECT_NEAR(m_zero(0.0, s123), 0.095464979136404473, 1e-15);
    EXPECT_NEAR(m_zero(0.0, s123), 2 / (3 * pi) * std::log(s123.cutoff), 1e-15);
    EXPECT_NEAR(m_zero(0.5, s123), 0.092052224825327467, 1e-15);
    EXPECT_NEAR(m_zero(1.0, s123), 0.083100494609399769, 1e-15);
    EXPECT_NEAR(m_zero(5.0, s123), 0.016607821811671649, 1e-15);
    EXPECT_NEAR(m_zero(50.0, s123) / 1.3001621590801989e-5, 1.0, 1e-9);
    EXPECT_NEAR(m_zero(1e-8, s123), m_zero(0.0, s123), 1e-8);
}

TEST(MZero, UehlingLimit) {
    for (double k : {0.5, 1.0, 5.0}) {
        double prev = INFINITY;
        for (double L : {10.0, 100.0, 1000.0}) {
            const auto s = scheme_from_masses(1, L, 2 * L);
            const double d = std::abs(2 * std::log(s.cutoff) / (3 * pi) - m_zero(k, s) - uehling(k));
            EXPECT_LT(d, prev);
            prev = d;
        }
        EXPECT_LE(prev, 5e-3);
    }
}

TEST(LogSums, Switchover) {
    const double k = std::sqrt(2.0) * 3.0;
    for (double u = 0.05; u < 1; u += 0.1)
        EXPECT_NEAR(pv_log_sum_direct(s123, k, u), pv_log_sum_scaled(s123, k, u), 1e-12);
}

TEST(MThermal, OracleConsistentValue) {
    // b-averaged vector Matsubara oracle minus M0 at (0.5, 1), agreement 1e-12
    EXPECT_NEAR(m_thermal(0.5, 1.0, s123) / -0.0762818321, 1.0, 1e-9);
}

TEST(MThermal, AverageOfInstantaneousKernel) {
    const double avg = beta_average([](double b) { return m_thermal_instantaneous(0.7, b, s123); }, 1.3, {}).value;
    EXPECT_NEAR(avg / m_thermal(0.7, 1.3, s123), 1.0, 1e-7);
}

TEST(MThermal, Suppression) {
    for (double k : {0.0, 1.0, 2.0, 5.0}) EXPECT_LE(std::abs(m_thermal(k, 40.0, s123)), 1e-10);
}

TEST(MThermal, RefinementConsistent) {
    QuadratureSpec fine;
    fine.rel_tol = 1e-11;
    fine.max_subdivisions = 4000;
    EXPECT_NEAR(m_thermal(1.0, 1.0, s123), m_thermal(1.0, 1.0, s123, fine), 1e-8 * std::abs(m_thermal(1.0, 1.0, s123)));
}

TEST(MThermal, PrintedFormDiffers) {
    EXPECT_GT(std::abs(printed::m_thermal(1.0, 40.0, s123)), 1e-3);
    const double m0 = m_zero(0.5, s123);
    EXPECT_LT((m0 + printed::m_thermal(0.5, 1.0, s123)) * (m0 + m_thermal(0.5, 1.0, s123)), 0.0);
}

TEST(GammaZero, AtOrigin) {
    const auto g = gamma_zero_part(0.0, s123);
    // Sum c m^2 log m^2 = 2.9927288064482855
    const double S = 2.9927288064482855;
    EXPECT_EQ(g.g11, 0.0);
    EXPECT_NEAR(g.g12, 9 / (32 * pi * pi) * S, 1e-14);
    EXPECT_NEAR(g.g2, -3 / (16 * pi * pi) * S, 1e-14);
    EXPECT_NEAR(g.g3, -3 / (32 * pi * pi) * S, 1e-14);
}

TEST(Gamma, OracleConsistentValues) {
    // Matsubara oracle values; closed forms agree to 1e-10 or better
    EXPECT_NEAR(gamma(0.0, 1.0, s123).gamma_total / -0.0282359139, 1.0, 1e-8);
    EXPECT_NEAR(gamma(0.5, 1.0, s123).gamma_total / -0.0276638963, 1.0, 1e-8);
    EXPECT_NEAR(gamma(2.0, 0.5, s123).gamma_total / -0.0264030941, 1.0, 1e-8);
    EXPECT_NEAR(gamma(1.0, 2.0, s123).gamma_total / 0.0112753599, 1.0, 1e-8);
}

TEST(Gamma, ComponentSum) {
    const auto g = gamma(1.0, 1.0, s123);
    EXPECT_EQ(g.gamma_total, ((g.gamma_zero.g11 + g.gamma_zero.g12) + (g.gamma_zero.g2 + g.gamma_zero.g3)) +
                                 ((g.gamma_thermal.g11T + g.gamma_thermal.g12T) +
                                  (g.gamma_thermal.g2T + g.gamma_thermal.g3T)));
}

TEST(Gamma, ThermalSuppression) {
    for (double k : {0.0, 1.0, 2.0, 5.0}) EXPECT_LE(std::abs(gamma_thermal_part(k, 40.0, s123).sum()), 1e-10);
    EXPECT_NEAR(gamma(1.0, 50.0, s123).gamma_total, gamma_zero_part(1.0, s123).sum(), 1e-9);
}

TEST(Gamma, ToleranceRefinement) {
    QuadratureSpec a, b;
    a.rel_tol = 1e-7;
    b.rel_tol = 1e-10;
    const auto ga = gamma(1.0, 1.0, s123, a);
    const auto gb = gamma(1.0, 1.0, s123, b);
    EXPECT_LE(std::abs(ga.gamma_total - gb.gamma_total), std::max(ga.error_estimate, 1e-7 * std::abs(gb.gamma_total)));
}

TEST(Gamma, ThermalAtOriginFinite) {
    const auto g = gamma_thermal_part(0.0, 1.0, s123);
    EXPECT_TRUE(std::isfinite(g.g11T) && std::isfinite(g.g12T) && std::isfinite(g.g2T) && std::isfinite(g.g3T));
    EXPECT_EQ(g.g11T, 0.0);
}

TEST(Gamma, OverKSquaredBounded) {
    for (double beta : {0.5, 1.0, 5.0})
        for (double k = 0.5; k <= 50; k *= 1.3) {
            const double v = gamma(k, beta, s123).gamma_total / (k * k);
            ASSERT_TRUE(std::isfinite(v));
            EXPECT_LE(std::abs(v), 1.0);
        }
}

TEST(Gamma, ContinuousInK) {
    const auto ks = k_grid(0.0, 50.0, 200, KSpacing::linear);
    const auto t = build_table(s123, 1.0, ks, KSpacing::linear);
    const double dk = ks[1] - ks[0];
    double c_m0 = 0, c_mt = 0, c_g = 0;
    for (std::size_t i = 1; i < ks.size(); ++i) {
        c_m0 = std::max(c_m0, std::abs(t.samples[i].m_zero - t.samples[i - 1].m_zero) / dk);
        c_mt = std::max(c_mt, std::abs(t.samples[i].m_thermal - t.samples[i - 1].m_thermal) / dk);
        c_g = std::max(c_g, std::abs(t.samples[i].gamma_total - t.samples[i - 1].gamma_total) / dk);
    }
    EXPECT_LE(c_m0, 0.1);
    EXPECT_LE(c_mt, 0.1);
    EXPECT_LE(c_g, 0.1);
}

TEST(GammaBetaAveraged, Values) {
    const auto r = gamma_beta_averaged_result(1.0, 0.5, s123);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.error_estimate, 1e-6 * std::abs(r.value));
    EXPECT_NEAR(r.value / -0.01169127, 1.0, 1e-6);
    QuadratureSpec fine;
    fine.rel_tol = 1e-11;
    EXPECT_NEAR(gamma_beta_averaged(1.0, 1.0, s123) / gamma_beta_averaged(1.0, 1.0, s123, fine), 1.0, 1e-7);
}

TEST(GammaBetaAveraged, LargeBetaMatchesGaussComposition) {
    const double z = gamma_zero_part(1.0, s123).sum();
    const double thermal =
        gauss_beta_average([](double b) { return gamma_thermal_part(1.0, b, s123).sum(); }, 50.0, 40);
    EXPECT_NEAR(gamma_beta_averaged(1.0, 50.0, s123), z + thermal, 1e-6);
}

TEST(Table, GridAndOrdering) {
    EXPECT_THROW(k_grid(0.0, 1.0, 5, KSpacing::log), domain_error);
    const auto ks = k_grid(0.1, 10.0, 3, KSpacing::log);
    EXPECT_NEAR(ks[1], 1.0, 1e-15);
    EXPECT_EQ(ks.back(), 10.0);
    EXPECT_THROW(build_table(s123, 1.0, {1.0, 0.5}, KSpacing::linear), domain_error);
}

TEST(Table, WorkerCountIndependent) {
    const auto ks = k_grid(0.0, 4.0, 9, KSpacing::linear);
    const auto a = build_table(s123, 1.0, ks, KSpacing::linear, {}, quantity_all, 1);
    const auto b = build_table(s123, 1.0, ks, KSpacing::linear, {}, quantity_all, 4);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        EXPECT_EQ(a.samples[i].gamma_total, b.samples[i].gamma_total);
        EXPECT_EQ(a.samples[i].m_thermal, b.samples[i].m_thermal);
    }
}

TEST(Table, ErrorsNameTheFailingPoint) {
    QuadratureSpec tiny;
    tiny.max_subdivisions = 1;
    tiny.rel_tol = 1e-15;
    tiny.abs_tol = 1e-300;
    try {
        gamma(1.25, 0.75, s123, tiny);
        FAIL() << "no exception";
    } catch (const accuracy_error& e) {
        EXPECT_NE(std::string(e.what()).find("k = 1.25"), std::string::npos);
    }
}
