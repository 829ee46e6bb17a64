#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pvfree/errors.hpp"
#include "pvfree/fields.hpp"
#include "pvfree/free_energy.hpp"
#include "pvfree/matsubara_oracles.hpp"
#include "pvfree/multipliers.hpp"
#include "pvfree/printed_forms.hpp"
#include "pvfree/pv_scheme.hpp"
#include "pvfree/quadrature.hpp"
#include "pvfree/special_functions.hpp"

namespace pvfree {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyOptions {
    double oracle_rel_tol = 1e-3;
};

/// Collects named checks; an exception inside a check counts as a failure.
class Checker {
public:
    explicit Checker(std::string suite) : suite_(std::move(suite)) {}

    void check(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        CheckResult r{suite_, name, false, ""};
        try {
            std::tie(r.passed, r.detail) = fn();
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        results_.push_back(std::move(r));
    }

    template <class E, class F>
    void expect_throw(const std::string& name, F&& fn) {
        check(name, [&]() -> std::pair<bool, std::string> {
            try {
                fn();
            } catch (const E& e) {
                return {true, e.what()};
            }
            return {false, "no exception raised"};
        });
    }

    std::vector<CheckResult>& results() { return results_; }

private:
    std::string suite_;
    std::vector<CheckResult> results_;
};

namespace detail {

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::pair<bool, std::string> near(double value, double expected, double tol, bool relative = true) {
    const double d = relative ? rel_diff(value, expected) : std::abs(value - expected);
    return {d <= tol, "value " + fmt(value) + " expected " + fmt(expected) + (relative ? " rel " : " abs ") + fmt(d)};
}

inline PauliVillarsScheme default_scheme() { return scheme_from_masses(1.0, 2.0, 3.0); }

}  // namespace detail

inline void suite_pv(Checker& c) {
    using detail::near;
    c.check("masses (1,2,3)", [] {
        const auto s = detail::default_scheme();
        double cm = 0.0;
        for (int j = 0; j < 3; ++j) cm += s.c[j] * s.mass_squared(j);
        const bool ok = std::abs(s.c[1] + 1.6) <= 1e-14 && std::abs(s.c[2] - 0.6) <= 1e-14 &&
                        std::abs(s.c[0] + s.c[1] + s.c[2]) <= 1e-14 && std::abs(cm) <= 1e-12 &&
                        std::abs(s.cutoff - 1.56811) <= 1e-4;
        return std::pair{ok, "c1 " + detail::fmt(s.c[1]) + " c2 " + detail::fmt(s.c[2]) + " cutoff " +
                                 detail::fmt(s.cutoff)};
    });
    c.expect_throw<degenerate_scheme_error>("degenerate (1,2,2)", [] { scheme_from_masses(1, 2, 2); });
    c.expect_throw<domain_error>("unordered masses", [] { scheme_from_masses(2, 1, 3); });
    c.check("cutoff inversion to (1,2,3)", [] {
        const auto s = scheme_from_cutoff(1.0, detail::default_scheme().cutoff, 1.5);
        return std::pair{std::abs(s.m[1] - 2.0) <= 1e-6 && std::abs(s.m[2] - 3.0) <= 1e-6,
                         "m1 " + detail::fmt(s.m[1]) + " m2 " + detail::fmt(s.m[2])};
    });
    c.expect_throw<infeasible_cutoff_error>("cutoff 1 infeasible", [] { scheme_from_cutoff(1.0, 1.0, 2.0); });
    for (double ratio : {1.5, 2.0, 4.0}) {
        c.check("cutoff round trip, ratio " + detail::fmt(ratio), [ratio] {
            double worst = 0.0, worst_res = 0.0;
            bool bounded = true;
            const double r2 = ratio * ratio;
            for (double target : {1.5, 3.0, 10.0, 30.0, 100.0, 1e3, 1e4}) {
                const auto s = scheme_from_cutoff(1.0, target, ratio);
                worst = std::max(worst, detail::rel_diff(s.cutoff, target));
                const auto r = scheme_residuals(s);
                worst_res = std::max({worst_res, r.sum_c, r.sum_c_m2});
                bounded = bounded && std::abs(s.c[1]) <= r2 / (r2 - 1.0) && std::abs(s.c[2]) <= 1.0 / (r2 - 1.0);
            }
            return std::pair{worst <= 1e-8 && worst_res <= 1e-12 && bounded,
                             "cutoff rel " + detail::fmt(worst) + " residual " + detail::fmt(worst_res) +
                                 (bounded ? " coefficients bounded" : " coefficients unbounded")};
        });
    }
}

inline void suite_theta(Checker& c) {
    using detail::near;
    for (double s : {0.05, 0.5, 5.0})
        for (double b : {0.5, 2.0, 10.0})
            c.check("theta2 representations s=" + detail::fmt(s) + " beta=" + detail::fmt(b), [s, b] {
                return near(theta2(s, b, ThetaRepresentation::poisson), theta2(s, b, ThetaRepresentation::direct),
                            1e-10);
            });
    c.check("theta2(1, 2pi) direct", [] { return near(theta2(1.0, 2 * std::numbers::pi), 1.7722705, 1e-7); });
    c.check("theta2(1, 2pi) poisson", [] {
        const double b = 2 * std::numbers::pi;
        return near(theta2(1.0, b, ThetaRepresentation::poisson), theta2(1.0, b, ThetaRepresentation::direct), 1e-12);
    });
    c.check("theta2 decreasing in s", [] {
        double prev = std::numeric_limits<double>::infinity();
        for (double s = 0.1; s < 50.0; s *= 1.7) {
            const double v = theta2(s, 2.0);
            if (!(v < prev)) return std::pair{false, "not decreasing at s = " + detail::fmt(s)};
            prev = v;
        }
        return std::pair{true, std::string("decreasing")};
    });
    c.check("matsubara frequencies", [] {
        const double pi = std::numbers::pi;
        const bool ok = matsubara_frequency(1, pi) == 1.0 && matsubara_frequency(0, pi) == -1.0 &&
                        std::abs(matsubara_frequency(-3, 2.0) + 3.5 * pi) <= 1e-15 &&
                        matsubara_frequency(1000000, 1.0) != 0.0 && matsubara_frequency(-1000000, 1.0) != 0.0;
        return std::pair{ok, std::string("examples")};
    });
    c.check("x tanh x partial sums", [] {
        bool ok = std::abs(x_tanh_x_partial(1.0, 10000) - std::tanh(1.0)) <= 1e-4 && x_tanh_x_partial(0.0, 7) == 0.0 &&
                  x_tanh_x_partial(-2.0, 50) == x_tanh_x_partial(2.0, 50);
        for (double x : {0.3, 1.0, 4.0}) {
            double prev = 0.0;
            for (int L : {1, 2, 5, 10, 100, 1000}) {
                const double v = x_tanh_x_partial(x, L);
                ok = ok && v >= prev && v <= x * std::tanh(x);
                prev = v;
            }
        }
        return std::pair{ok, std::string("monotone and bounded by x tanh x")};
    });
}

inline void suite_bessel(Checker& c) {
    using detail::near;
    for (double x : {0.5, 1.0, 5.0})
        c.check("K_1/2(" + detail::fmt(x) + ")", [x] {
            return near(bessel_k(0.5, x), std::sqrt(std::numbers::pi / (2 * x)) * std::exp(-x), 1e-8);
        });
    c.check("K_0(1)", [] { return near(bessel_k(0.0, 1.0, 1e-12), 0.4210244382, 1e-9); });
    c.check("K_1(1)", [] { return near(bessel_k(1.0, 1.0, 1e-12), 0.6019072302, 1e-9); });
    c.check("K decreasing in x", [] {
        for (double nu : {0.0, 0.5, 1.0, 2.5}) {
            double prev = std::numeric_limits<double>::infinity();
            for (double x = 0.1; x < 40.0; x *= 1.5) {
                const double v = bessel_k(nu, x);
                if (!(v < prev)) return std::pair{false, "nu " + detail::fmt(nu) + " x " + detail::fmt(x)};
                prev = v;
            }
        }
        return std::pair{true, std::string("decreasing")};
    });
    c.expect_throw<domain_error>("K at x = 0", [] { bessel_k(0.0, 0.0); });
    const std::array<std::array<double, 3>, 3> triples = {{{0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {0.5, 0.25, 4.0}}};
    for (const auto& t : triples)
        c.check("integral identity nu=" + detail::fmt(t[0]) + " alpha=" + detail::fmt(t[1]) +
                    " gamma=" + detail::fmt(t[2]),
                [t] {
                    const auto r = bessel_integral_identity_check(t[0], t[1], t[2], QuadratureSpec{});
                    return near(r.lhs, r.rhs_corrected, 1e-6);
                });
    c.check("printed argument diverges at nu = 0", [] {
        const auto r = bessel_integral_identity_check(0.0, 1.0, 1.0, QuadratureSpec{});
        return std::pair{std::isinf(r.rhs_as_printed) && std::isfinite(r.lhs),
                         "lhs " + detail::fmt(r.lhs) + " printed " + detail::fmt(r.rhs_as_printed)};
    });
}

inline void suite_fermi(Checker& c) {
    c.check("identity on 100 random points", [] {
        std::mt19937_64 rng(20240917);
        std::uniform_real_distribution<double> lam(-50.0, 50.0), lb(std::log(0.01), std::log(100.0));
        double worst = 0.0;
        bool ok = true;
        for (int i = 0; i < 100; ++i) {
            const double l = i == 0 ? 50.0 : (i == 1 ? -50.0 : lam(rng));
            const double b = i < 2 ? 100.0 : std::exp(lb(rng));
            const auto p = fermi_thermo(l, b);
            const double lhs = l * (p.occupation - 0.5) - p.entropy / b;
            const double d = std::abs(lhs - p.free_energy_density) / std::max(1.0, std::abs(l));
            worst = std::max(worst, d);
            ok = ok && std::isfinite(lhs) && d <= 1e-12;
        }
        return std::pair{ok, "worst scaled deviation " + detail::fmt(worst)};
    });
    c.check("symmetric point", [] {
        const auto p = fermi_thermo(0.0, 2.0);
        const double l2 = std::numbers::ln2;
        return std::pair{p.occupation == 0.5 && std::abs(p.entropy - l2) <= 1e-15 &&
                             std::abs(p.free_energy_density + l2 / 2) <= 1e-15,
                         std::string("f = 1/2, S = log 2")};
    });
    c.check("density at (1, 1)", [] { return detail::near(fermi_thermo(1.0, 1.0).free_energy_density, -0.813261687518222834, 1e-14); });
    c.check("particle-hole symmetry", [] {
        const double s = fermi_thermo(3.0, 0.7).occupation + fermi_thermo(-3.0, 0.7).occupation;
        return detail::near(s, 1.0, 1e-15, false);
    });
}

inline void suite_uehling(Checker& c) {
    using detail::near;
    c.check("U(0) = 0", [] { return std::pair{uehling(0.0) == 0.0, std::string("exact")}; });
    c.check("U(1)", [] { return near(uehling(1.0), 0.0192353209028294, 1e-9); });
    c.check("logarithmic growth", [] {
        double worst = 0.0;
        for (double k : {1e2, 1e3, 1e4}) worst = std::max(worst, std::abs(uehling(k) - 2.0 / (3 * std::numbers::pi) * std::log(k)));
        return std::pair{worst <= 1.0, "max |U - (2/3pi) log k| " + detail::fmt(worst)};
    });
    c.check("M0(0) from cutoff", [] {
        const auto s = detail::default_scheme();
        return near(m_zero(0.0, s), 2.0 / (3 * std::numbers::pi) * std::log(s.cutoff), 1e-12);
    });
    c.check("M0 continuous at 0", [] {
        const auto s = detail::default_scheme();
        return near(m_zero(1e-8, s), m_zero(0.0, s), 1e-8, false);
    });
    for (double k : {0.5, 1.0, 5.0})
        c.check("Uehling limit k=" + detail::fmt(k), [k] {
            std::vector<double> deficit;
            for (double L : {10.0, 100.0, 1000.0}) {
                const auto s = scheme_from_masses(1.0, L, 2.0 * L);
                deficit.push_back(std::abs(2.0 * std::log(s.cutoff) / (3 * std::numbers::pi) - m_zero(k, s) - uehling(k)));
            }
            const bool ok = deficit[1] < deficit[0] && deficit[2] < deficit[1] && deficit[2] <= 5e-3;
            return std::pair{ok, "deficits " + detail::fmt(deficit[0]) + " " + detail::fmt(deficit[1]) + " " +
                                     detail::fmt(deficit[2])};
        });
}

inline void suite_multipliers(Checker& c) {
    using detail::near;
    const auto s = detail::default_scheme();
    c.check("log-sum switchover", [s] {
        const double k = std::sqrt(2.0) * s.m[2];
        double worst = 0.0;
        for (double u : {0.1, 0.3, 0.5, 0.9})
            worst = std::max(worst, std::abs(pv_log_sum_direct(s, k, u) - pv_log_sum_scaled(s, k, u)));
        return std::pair{worst <= 1e-12, "max difference " + detail::fmt(worst)};
    });
    c.check("zero-temperature parts at k=0", [s] {
        const auto g = gamma_zero_part(0.0, s);
        const bool ok = g.g11 == 0.0 && std::abs(g.g12 - 0.0852825445) <= 1e-9 &&
                        std::abs(g.g2 + 0.0568550297) <= 1e-9 && std::abs(g.g3 + 0.0284275148) <= 1e-9;
        return std::pair{ok, "g12 " + detail::fmt(g.g12) + " g2 " + detail::fmt(g.g2) + " g3 " + detail::fmt(g.g3)};
    });
    for (double k : {0.0, 1.0, 2.0, 5.0})
        c.check("thermal suppression beta=40 k=" + detail::fmt(k), [s, k] {
            const double mt = m_thermal(k, 40.0, s);
            const double gt = gamma_thermal_part(k, 40.0, s).sum();
            return std::pair{std::abs(mt) <= 1e-10 && std::abs(gt) <= 1e-10,
                             "MT " + detail::fmt(mt) + " Gamma_T " + detail::fmt(gt)};
        });
    c.check("gamma(1, 50) equals zero part", [s] {
        return near(gamma(1.0, 50.0, s).gamma_total, gamma_zero_part(1.0, s).sum(), 1e-9, false);
    });
    c.check("gamma refinement consistency", [s] {
        QuadratureSpec loose;
        loose.rel_tol = 1e-7;
        QuadratureSpec tight;
        tight.rel_tol = 1e-10;
        const auto a = gamma(1.0, 1.0, s, loose);
        const auto b = gamma(1.0, 1.0, s, tight);
        const double d = std::abs(a.gamma_total - b.gamma_total);
        return std::pair{d <= std::max(a.error_estimate, 1e-7 * std::abs(b.gamma_total)),
                         "difference " + detail::fmt(d) + " estimate " + detail::fmt(a.error_estimate)};
    });
    c.check("beta-averaged Gamma b-grid refinement", [s] {
        QuadratureSpec fine;
        fine.rel_tol = 1e-11;
        return near(gamma_beta_averaged(1.0, 1.0, s), gamma_beta_averaged(1.0, 1.0, s, fine), 1e-7);
    });
    c.check("Gamma/k^2 bounded on [0.5, 50]", [s] {
        double worst = 0.0;
        for (double beta : {0.5, 1.0, 5.0})
            for (double k = 0.5; k <= 50.0; k *= 1.6) {
                const double v = gamma(k, beta, s).gamma_total / (k * k);
                if (!std::isfinite(v)) return std::pair{false, "non-finite at k " + detail::fmt(k)};
                worst = std::max(worst, std::abs(v));
            }
        return std::pair{worst <= 1.0, "max |Gamma/k^2| " + detail::fmt(worst)};
    });
}

inline void suite_gamma_oracle(Checker& c, const VerifyOptions& opt) {
    const auto s = detail::default_scheme();
    const std::array<std::array<double, 2>, 3> pts = {{{0.5, 1.0}, {2.0, 0.5}, {1.0, 2.0}}};
    for (const auto& p : pts)
        c.check("oracle vs closed form k=" + detail::fmt(p[0]) + " beta=" + detail::fmt(p[1]), [&, p] {
            const double o = gamma_matsubara_oracle(p[0], p[1], s);
            const double g = gamma(p[0], p[1], s).gamma_total;
            const double pr = printed::gamma_parts(p[0], p[1], s).gamma_total;
            auto r = detail::near(g, o, opt.oracle_rel_tol);
            r.second += "; printed forms give " + detail::fmt(pr) + " (ratio to oracle " + detail::fmt(pr / o) + ")";
            return r;
        });
    c.check("oracle at k=0 equals scalar oracle", [s] {
        const auto b = matsubara_oracles(0.0, 1.0, s);
        return detail::near(b.gamma.value, b.scalar.value, 1e-6);
    });
    c.expect_throw<oracle_accuracy_error>("single species diverges", [] {
        gamma_matsubara_oracle(0.5, 1.0, unchecked_scheme({1.0, 2.0, 3.0}, {1.0, 0.0, 0.0}));
    });
    c.check("Matsubara boundedness sum", [] {
        double worst = 0.0;
        for (double bm : {0.01, 0.1, 1.0, 10.0, 100.0}) worst = std::max(worst, matsubara_boundedness_sum(1.0, bm, 2000));
        return std::pair{worst <= 0.25, "max " + detail::fmt(worst) + " (bound 1/4 over both signs of l)"};
    });
}

inline void suite_multiplier_oracle(Checker& c, const VerifyOptions& opt) {
    const auto s = detail::default_scheme();
    OracleSpec os;
    os.p_quadrature.rel_tol = 1e-5;
    QuadratureSpec bs;
    bs.rel_tol = 1e-6;
    bs.abs_tol = 1e-12;
    const std::array<std::array<double, 2>, 2> pts = {{{0.5, 1.0}, {1.0, 2.0}}};
    for (const auto& p : pts) {
        const double k = p[0], beta = p[1];
        std::array<double, 2> avg{};
        bool have = false;
        std::string failure;
        try {
            const auto r = beta_average(
                [&](double b) {
                    const auto o = matsubara_oracles(k, b, s, os);
                    return std::array<double, 2>{o.vector.value, o.scalar.value};
                },
                beta, bs);
            avg = r.value;
            have = r.converged;
            if (!have) failure = "b-average did not converge";
        } catch (const std::exception& e) {
            failure = e.what();
        }
        const std::string tag = " k=" + detail::fmt(k) + " beta=" + detail::fmt(beta);
        const double vec = k * k / (8 * std::numbers::pi) * (m_zero(k, s) + m_thermal(k, beta, s));
        c.check("vector identity" + tag, [&] {
            if (!have) return std::pair{false, failure};
            auto r = detail::near(avg[0], vec, opt.oracle_rel_tol);
            const double printed_vec = k * k / (8 * std::numbers::pi) * (m_zero(k, s) + printed::m_thermal(k, beta, s));
            r.second += "; printed M^T gives ratio " + detail::fmt(printed_vec / avg[0]);
            return r;
        });
        c.check("scalar identity" + tag, [&] {
            if (!have) return std::pair{false, failure};
            return detail::near(avg[1], -vec + gamma_beta_averaged(k, beta, s), opt.oracle_rel_tol);
        });
    }
    c.check("vector oracle vanishes as k -> 0", [s] {
        const double a = vector_multiplier_oracle(1e-3, 1.0, s);
        const double b = vector_multiplier_oracle(2e-3, 1.0, s);
        return std::pair{std::abs(a) <= 1e-5 && std::abs(b / a - 4.0) <= 0.05,
                         "a(1e-3) " + detail::fmt(a) + " a(2e-3)/a(1e-3) " + detail::fmt(b / a)};
    });
    c.check("single species diverges", [] {
        const auto bad = unchecked_scheme({1.0, 2.0, 3.0}, {1.0, 0.0, 0.0});
        const OracleSpec spec;
        const auto t = matsubara_oracle_terms(0.5, 1.0, bad, spec);
        bool ok = true;
        std::string d;
        for (auto kind : {OracleKind::gamma, OracleKind::vector, OracleKind::scalar}) {
            const auto ps = oracle_partial_sums(t, kind, {50, 100, 200, 400});
            ok = ok && ps[0] < ps[1] && ps[1] < ps[2] && ps[2] < ps[3];
            bool thrown = false;
            try {
                reduce_oracle(t, kind, spec);
            } catch (const oracle_accuracy_error&) {
                thrown = true;
            }
            ok = ok && thrown;
            d += detail::fmt(ps[3]) + " ";
        }
        return std::pair{ok, "partial sums at 400: " + d};
    });
}

inline void suite_quadrature(Checker& c) {
    using detail::near;
    const QuadratureSpec spec;
    c.check("u(1-u)", [&] { return near(integrate_interval([](double u) { return u * (1 - u); }, 0.0, 1.0, spec).value, 1.0 / 6, 1e-14); });
    c.check("1/sqrt(u)", [&] { return near(integrate_interval([](double u) { return 1 / std::sqrt(u); }, 0.0, 1.0, spec).value, 2.0, 1e-9); });
    c.check("Uehling integrand evaluations", [&] {
        const auto r = integrate_interval([](double z) { return (z * z - z * z * z * z / 3) / (1 + 0.25 * (1 - z * z)); }, 0.0, 1.0, spec);
        return std::pair{r.converged && r.evaluations <= 200, std::to_string(r.evaluations) + " evaluations"};
    });
    c.check("exp(-s)", [&] { return near(integrate_half_line([](double s) { return std::exp(-s); }, spec).value, 1.0, 1e-9); });
    c.check("Gaussian volume", [&] {
        return near(integrate_half_line([](double r) { return 4 * std::numbers::pi * r * r * std::exp(-r * r); }, spec).value,
                    std::pow(std::numbers::pi, 1.5), 1e-9);
    });
    c.check("Gaussian second moment", [&] {
        return near(integrate_half_line([](double r) { return 4 * std::numbers::pi * r * r * r * r * std::exp(-r * r); }, spec).value,
                    1.5 * std::pow(std::numbers::pi, 1.5), 1e-9);
    });
    c.check("beta average of constants and lines", [&] {
        const double a = beta_average([](double) { return 3.25; }, 0.7, spec).value;
        const double b = beta_average([](double x) { return x; }, 2.0, spec).value;
        return std::pair{std::abs(a - 3.25) <= 1e-14 * 3.25 && std::abs(b - 1.0) <= 1e-14,
                         detail::fmt(a) + " " + detail::fmt(b)};
    });
    c.check("beta average of Gamma(1, b) on (0, 0.5]", [&] {
        const auto r = gamma_beta_averaged_result(1.0, 0.5, detail::default_scheme(), spec);
        return std::pair{r.converged && r.error_estimate <= 1e-6 * std::abs(r.value),
                         "value " + detail::fmt(r.value) + " error " + detail::fmt(r.error_estimate)};
    });
    c.check("linearity", [&] {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> U(-2.0, 2.0);
        bool ok = true;
        for (int trial = 0; trial < 10; ++trial) {
            std::array<double, 4> p, q;
            for (auto& x : p) x = U(rng);
            for (auto& x : q) x = U(rng);
            const double al = U(rng), ga = U(rng);
            auto poly = [](const std::array<double, 4>& a) {
                return [a](double x) { return a[0] + x * (a[1] + x * (a[2] + x * a[3])); };
            };
            const auto fp = poly(p), fq = poly(q);
            const auto rp = integrate_interval(fp, -1.0, 2.0, spec), rq = integrate_interval(fq, -1.0, 2.0, spec);
            const auto rc = integrate_interval([&](double x) { return al * fp(x) + ga * fq(x); }, -1.0, 2.0, spec);
            const double tol = std::abs(al) * rp.error_estimate + std::abs(ga) * rq.error_estimate + rc.error_estimate +
                               1e-14 * (1 + std::abs(rc.value));
            ok = ok && std::abs(rc.value - (al * rp.value + ga * rq.value)) <= tol;
        }
        return std::pair{ok, std::string("10 random polynomial pairs")};
    });
    c.check("tolerance refinement", [&] {
        auto f = [](double z) { return (z * z - z * z * z * z / 3) / (1 + 0.25 * (1 - z * z)); };
        QuadratureSpec ref = spec;
        ref.rel_tol = 1e-13;
        const double exact = integrate_interval(f, 0.0, 1.0, ref).value;
        QuadratureSpec a = spec, b = spec;
        a.rel_tol = 1e-6;
        b.rel_tol = 5e-7;
        const double ea = std::abs(integrate_interval(f, 0.0, 1.0, a).value - exact);
        const double eb = std::abs(integrate_interval(f, 0.0, 1.0, b).value - exact);
        return std::pair{eb <= ea + 4 * std::numeric_limits<double>::epsilon() * std::abs(exact),
                         detail::fmt(ea) + " -> " + detail::fmt(eb)};
    });
}

inline void suite_fields(Checker& c) {
    const Grid3 n64{64, 64, 64};
    const Box3 box20{20, 20, 20};
    c.check("Gaussian L2 norm", [&] {
        const auto s = coulomb_project(spectral_transform(gaussian_test_field(1.0, 1.0, n64, box20)));
        return detail::near(field_spectra_and_norms(s).l2_F_squared, 1.5 * std::pow(std::numbers::pi, 1.5), 5e-3);
    });
    c.check("Gaussian transform", [&] {
        const auto s = spectral_transform(gaussian_test_field(1.0, 1.0, n64, box20));
        double worst = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto k = s.wavevector(i);
            const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if (k2 <= 9.0) worst = std::max(worst, std::abs(s.v_hat[i] - std::exp(-0.5 * k2)));
        }
        return std::pair{worst <= 1e-6, "max deviation " + detail::fmt(worst)};
    });
    c.check("Plancherel", [] {
        GridField f;
        f.n = {12, 10, 9};
        f.box_length = {3.0, 2.5, 4.0};
        std::mt19937_64 rng(11);
        std::normal_distribution<double> N;
        f.v.resize(f.size());
        for (auto& x : f.v) x = N(rng);
        for (auto& a : f.a) a.assign(f.size(), 0.0);
        const auto s = spectral_transform(f);
        double lhs = 0.0, rhs = 0.0;
        for (double x : f.v) lhs += x * x;
        for (const auto& z : s.v_hat) rhs += std::norm(z);
        return detail::near(rhs * s.k_cell_volume(), lhs * f.cell_volume(), 1e-12);
    });
    c.check("constant field", [] {
        GridField f;
        f.n = {8, 8, 8};
        f.box_length = {1, 1, 1};
        f.v.assign(f.size(), 2.5);
        for (auto& a : f.a) a.assign(f.size(), 0.0);
        const auto s = spectral_transform(f);
        double off = 0.0;
        for (std::size_t i = 1; i < s.size(); ++i) off = std::max(off, std::abs(s.v_hat[i]));
        return std::pair{off <= 1e-14 * std::abs(s.v_hat[0]), "max off-zero " + detail::fmt(off)};
    });
    c.check("Hermitian symmetry", [] {
        GridField f;
        f.n = {6, 5, 4};
        f.box_length = {1, 1, 1};
        std::mt19937_64 rng(3);
        std::normal_distribution<double> N;
        f.v.resize(f.size());
        for (auto& x : f.v) x = N(rng);
        for (auto& a : f.a) a.assign(f.size(), 0.0);
        const auto s = spectral_transform(f);
        double worst = 0.0;
        for (std::size_t iz = 0; iz < 4; ++iz)
            for (std::size_t iy = 0; iy < 5; ++iy)
                for (std::size_t ix = 0; ix < 6; ++ix) {
                    const std::size_t j = ((6 - ix) % 6) + 6 * (((5 - iy) % 5) + 5 * ((4 - iz) % 4));
                    worst = std::max(worst, std::abs(s.v_hat[ix + 6 * (iy + 5 * iz)] - std::conj(s.v_hat[j])));
                }
        return std::pair{worst <= 1e-14, "max asymmetry " + detail::fmt(worst)};
    });
    auto random_vector_field = [](std::uint64_t seed) {
        GridField f;
        f.n = {10, 8, 6};
        f.box_length = {2, 3, 4};
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> N;
        f.v.resize(f.size());
        for (auto& x : f.v) x = N(rng);
        for (auto& a : f.a) {
            a.resize(f.size());
            for (auto& x : a) x = N(rng);
        }
        return f;
    };
    c.check("Coulomb projector", [&] {
        const auto s = spectral_transform(random_vector_field(5));
        const auto p1 = coulomb_project(s);
        const auto p2 = coulomb_project(p1);
        double idem = 0.0, div = 0.0, n_in = 0.0, n_out = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto k = s.wavevector(i);
            const double kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
            double an = 0.0;
            for (int cc = 0; cc < 3; ++cc) {
                idem = std::max(idem, std::abs(p2.a_hat[cc][i] - p1.a_hat[cc][i]));
                n_in += std::norm(s.a_hat[cc][i]);
                n_out += std::norm(p1.a_hat[cc][i]);
                an += std::norm(p1.a_hat[cc][i]);
            }
            const std::complex<double> d = k[0] * p1.a_hat[0][i] + k[1] * p1.a_hat[1][i] + k[2] * p1.a_hat[2][i];
            if (kn > 0) div = std::max(div, std::abs(d) / (kn * std::sqrt(an) + 1e-300));
        }
        return std::pair{idem <= 1e-15 && div <= 1e-12 && n_out <= n_in,
                         "idempotence " + detail::fmt(idem) + " divergence " + detail::fmt(div)};
    });
    c.check("projector kills gradients", [&] {
        auto s = spectral_transform(random_vector_field(9));
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto k = s.wavevector(i);
            for (int cc = 0; cc < 3; ++cc) s.a_hat[cc][i] = k[cc] * s.v_hat[i];
        }
        const auto p = coulomb_project(s);
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = 1; i < s.size(); ++i)
            for (int cc = 0; cc < 3; ++cc) {
                worst = std::max(worst, std::abs(p.a_hat[cc][i]));
                scale = std::max(scale, std::abs(s.a_hat[cc][i]));
            }
        return std::pair{worst <= 1e-14 * scale, "max residual " + detail::fmt(worst)};
    });
    c.expect_throw<gauge_precondition_error>("spectra require projection",
                                             [&] { field_spectra_and_norms(spectral_transform(random_vector_field(1))); });
    c.check("magnetic spectrum under Coulomb gauge", [&] {
        auto f = random_vector_field(13);
        std::fill(f.v.begin(), f.v.end(), 0.0);
        const auto p = coulomb_project(spectral_transform(f));
        const auto fs = field_spectra_and_norms(p);
        double worst = 0.0, e = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto k = p.wavevector(i);
            double a2 = 0.0;
            for (int cc = 0; cc < 3; ++cc) a2 += std::norm(p.a_hat[cc][i]);
            const double expected = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * a2;
            worst = std::max(worst, std::abs(fs.b_spectrum[i] - expected) / std::max(expected, 1e-300));
            e = std::max(e, fs.e_spectrum[i]);
        }
        return std::pair{worst <= 1e-12 && e == 0.0, "rel " + detail::fmt(worst)};
    });
    c.check("spectra translation invariant", [] {
        const Grid3 n{48, 48, 48};
        const Box3 L{24, 24, 24};
        const double dx = 0.5;
        const auto a = field_spectra_and_norms(coulomb_project(spectral_transform(gaussian_test_field(1, 1, n, L))));
        const auto b = field_spectra_and_norms(
            coulomb_project(spectral_transform(gaussian_test_field(1, 1, n, L, {3 * dx, -2 * dx, 5 * dx}))));
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < a.e_spectrum.size(); ++i) {
            worst = std::max(worst, std::abs(a.e_spectrum[i] - b.e_spectrum[i]));
            scale = std::max(scale, a.e_spectrum[i]);
        }
        return std::pair{worst <= 1e-12 * scale, "max change " + detail::fmt(worst)};
    });
    c.check("E in L1 grid-converged", [&] {
        const auto l64 = field_spectra_and_norms(coulomb_project(spectral_transform(gaussian_test_field(1, 1, n64, box20)))).l1_E;
        const auto l96 = field_spectra_and_norms(
                             coulomb_project(spectral_transform(gaussian_test_field(1, 1, {96, 96, 96}, box20))))
                             .l1_E;
        return detail::near(l64, l96, 1e-2);
    });
    c.check("file round trip", [&] {
        const auto f = random_vector_field(21);
        const auto g = load_grid_field(write_grid_field(f));
        const bool ok = g.n == f.n && g.box_length == f.box_length && g.v == f.v && g.a == f.a;
        return std::pair{ok, std::string(ok ? "bit-exact" : "mismatch")};
    });
    c.expect_throw<malformed_payload_error>("truncated payload", [&] {
        auto doc = nlohmann::json::parse(write_grid_field(random_vector_field(2)));
        auto bytes = detail::base64_decode(doc["v"].get<std::string>());
        bytes.pop_back();
        doc["v"] = detail::base64_encode(bytes);
        load_grid_field(doc.dump());
    });
    c.expect_throw<unsupported_version_error>("version 2", [&] {
        auto doc = nlohmann::json::parse(write_grid_field(random_vector_field(2)));
        doc["version"] = 2;
        load_grid_field(doc.dump());
    });
    c.expect_throw<invalid_data_error>("non-finite payload", [&] {
        auto f = random_vector_field(2);
        auto doc = nlohmann::json::parse(write_grid_field(f));
        f.v[3] = std::numeric_limits<double>::quiet_NaN();
        doc["v"] = detail::encode_doubles(f.v);
        load_grid_field(doc.dump());
    });
}

inline void suite_energy(Checker& c) {
    const auto s = detail::default_scheme();
    const Grid3 n{12, 12, 12};
    const Box3 L{12, 12, 12};
    c.check("remainder factors", [s] {
        const auto r = remainder_factors(1.0, s);
        const auto z = remainder_factors(0.0, s);
        const bool mono = remainder_factors(2.0, s).bound > remainder_factors(1.5, s).bound;
        return std::pair{std::abs(r.factor4 - 2.0) <= 1e-14 && std::abs(r.factor6 - 22.0 / 15.0) <= 1e-14 &&
                             z.bound == 0.0 && mono,
                         "factor4 " + detail::fmt(r.factor4) + " factor6 " + detail::fmt(r.factor6)};
    });
    c.check("zero field", [&] {
        const auto r = quadratic_free_energy(coulomb_project(spectral_transform(gaussian_test_field(0, 1, n, L))), 1.0, s);
        return std::pair{r.f2_total == 0.0 && r.gamma_part == 0.0 && r.magnetic_electric_part == 0.0 &&
                             r.remainder_bound == 0.0,
                         "f2 " + detail::fmt(r.f2_total)};
    });
    c.check("pure magnetic field", [&] {
        GridField f = gaussian_test_field(0, 1, n, L);
        for (std::size_t iz = 0; iz < n[2]; ++iz)
            for (std::size_t iy = 0; iy < n[1]; ++iy)
                for (std::size_t ix = 0; ix < n[0]; ++ix) {
                    const double x = f.coordinate(0, ix), y = f.coordinate(1, iy), z = f.coordinate(2, iz);
                    const double g = std::exp(-(x * x + y * y + z * z) / 2);
                    f.a[0][f.index(ix, iy, iz)] = -y * g;
                    f.a[1][f.index(ix, iy, iz)] = x * g;
                }
        const auto sp = coulomb_project(spectral_transform(f));
        const auto r = quadratic_free_energy(sp, 1.0, s);
        const auto fs = field_spectra_and_norms(sp);
        double expect = 0.0;
        for (std::size_t i = 0; i < sp.size(); ++i) {
            const auto k = sp.wavevector(i);
            const double kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
            expect += (m_zero(kn, s) + m_thermal(kn, 1.0, s)) * fs.b_spectrum[i];
        }
        expect *= sp.k_cell_volume() / (8 * std::numbers::pi);
        auto out = detail::near(r.f2_total, expect, 1e-10);
        out.first = out.first && r.gamma_part == 0.0;
        return out;
    });
    c.check("quadratic scaling and sign structure", [&] {
        const auto a = quadratic_free_energy(coulomb_project(spectral_transform(gaussian_test_field(1, 1, n, L))), 1.0, s);
        const auto b = quadratic_free_energy(coulomb_project(spectral_transform(gaussian_test_field(3, 1, n, L))), 1.0, s);
        const double dm = detail::rel_diff(b.magnetic_electric_part, 9 * a.magnetic_electric_part);
        const double dg = detail::rel_diff(b.gamma_part, 9 * a.gamma_part);
        const double dt = detail::rel_diff(a.f2_total, a.magnetic_electric_part + a.gamma_part);
        bool nonneg = true;
        for (double k = 0.0; k <= 4.0; k += 0.25) nonneg = nonneg && m_zero(k, s) + m_thermal(k, 1.0, s) >= 0.0;
        const bool sign_ok = !nonneg || a.magnetic_electric_part <= 0.0;
        return std::pair{dm <= 1e-12 && dg <= 1e-12 && dt <= 1e-13 && sign_ok,
                         "scaling " + detail::fmt(dm) + " " + detail::fmt(dg) + " sum " + detail::fmt(dt)};
    });
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"pv",    "theta",        "bessel",        "fermi",
                                                   "uehling", "multipliers", "gamma-oracle", "multiplier-oracle",
                                                   "fields", "quadrature",   "energy"};
    return names;
}

/// Runs one suite, or every suite for "all".
inline std::vector<CheckResult> run_suite(const std::string& name, const VerifyOptions& opt = {}) {
    if (name == "all") {
        std::vector<CheckResult> out;
        for (const auto& n : suite_names()) {
            auto r = run_suite(n, opt);
            out.insert(out.end(), r.begin(), r.end());
        }
        return out;
    }
    Checker c(name);
    if (name == "pv") suite_pv(c);
    else if (name == "theta") suite_theta(c);
    else if (name == "bessel") suite_bessel(c);
    else if (name == "fermi") suite_fermi(c);
    else if (name == "uehling") suite_uehling(c);
    else if (name == "multipliers") suite_multipliers(c);
    else if (name == "gamma-oracle") suite_gamma_oracle(c, opt);
    else if (name == "multiplier-oracle") suite_multiplier_oracle(c, opt);
    else if (name == "fields") suite_fields(c);
    else if (name == "quadrature") suite_quadrature(c);
    else if (name == "energy") suite_energy(c);
    else throw domain_error("unknown verification suite '" + name + "'");
    return std::move(c.results());
}

}  // namespace pvfree
