#pragma once

// Multiplier integrands exactly as printed in the source derivation. These
// disagree with the Matsubara oracles and are kept only to report the mismatch.

#include <array>
#include <cmath>
#include <numbers>

#include "pvfree/errors.hpp"
#include "pvfree/multipliers.hpp"
#include "pvfree/pv_scheme.hpp"
#include "pvfree/quadrature.hpp"

namespace pvfree::printed {

namespace detail {

// int_0^1 du int_0^inf dt Sum_j weight(u, c_j, D_j, m_j^2) * kernel(Y_j, t), Y_j = b sqrt(D_j) cosh t.
template <std::size_t N, class Kernel, class Weight>
std::array<double, N> double_integral(const char* what, double k, double b, const PauliVillarsScheme& s,
                                      const QuadratureSpec& spec, Kernel kernel, Weight weight) {
    using Vec = std::array<double, N>;
    const double k2 = k * k;
    QuadratureSpec sp = spec;
    sp.abs_tol = std::max(spec.abs_tol, pvfree::detail::thermal_noise_floor(s, k, b));
    bool ok = true;
    auto outer = [&](double u) -> Vec {
        std::array<double, 3> D, X;
        std::array<Vec, 3> w;
        for (int j = 0; j < 3; ++j) {
            D[j] = s.mass_squared(j) + u * (1.0 - u) * k2;
            X[j] = b * std::sqrt(D[j]);
            w[j] = weight(u, s.c[j], D[j], s.mass_squared(j));
        }
        auto inner = [&](double t) -> Vec {
            Vec v{};
            const double ch = std::cosh(t);
            for (int j = 0; j < 3; ++j) {
                const Vec kv = kernel(X[j] * ch, t);
                for (std::size_t i = 0; i < N; ++i) v[i] += w[j][i] * kv[i];
            }
            return v;
        };
        const auto r = integrate_half_line(inner, sp);
        ok = ok && r.converged;
        return r.value;
    };
    const auto r = integrate_interval(outer, 0.0, 1.0, sp);
    pvfree::detail::require_converged(what, k, b, pvfree::detail::vnorm(r.value), r.error_estimate, r.converged && ok);
    return r.value;
}

}  // namespace detail

/// Thermal magnetic multiplier with the reconstructed printed integrand
/// 1/(1+e^{-Y}) + (2 log 2 - Y - 2 log1p(e^{-Y}))/Y.
inline double m_thermal(double k, double beta, const PauliVillarsScheme& s, const QuadratureSpec& spec = {}) {
    if (!(k >= 0.0) || !(beta > 0.0)) throw domain_error("printed m_thermal requires k >= 0, beta > 0");
    auto kernel = [](double Y, double) {
        // Species-constant limit 1 removed; it cancels in the j-sum.
        const double e = std::exp(-Y);
        return std::array<double, 1>{-e / (1.0 + e) + (2.0 * std::numbers::ln2 - 2.0 * std::log1p(e)) / Y};
    };
    auto weight = [](double u, double c, double, double) { return std::array<double, 1>{c * u * (1.0 - u)}; };
    return -8.0 / std::numbers::pi * detail::double_integral<1>("printed m_thermal", k, beta, s, spec, kernel, weight)[0];
}

struct GammaParts {
    double g12_zero = 0.0;
    double g3_zero = 0.0;
    double g11_thermal = 0.0;
    double g11_thermal_alt = 0.0;  // denominator (1 + e^{-Y})^2
    double g12_thermal = 0.0;
    double g2_thermal = 0.0;
    double g3_thermal = 0.0;
    double gamma_total = 0.0;      // all eight components, printed where they differ
};

/// Alternating sum Sum_{n>=1} (-1)^n sqrt(n) e^{-n Y}, truncated when the next
/// term falls below 1e-16 of the partial sum; n_max = 500.
inline double alternating_sqrt_sum(double Y) {
    double sum = 0.0;
    for (int n = 1; n <= 500; ++n) {
        const double term = (n % 2 ? -1.0 : 1.0) * std::sqrt(static_cast<double>(n)) * std::exp(-n * Y);
        sum += term;
        const double next = std::sqrt(n + 1.0) * std::exp(-(n + 1) * Y);
        if (next < 1e-16 * std::abs(sum) || next == 0.0) return sum;
    }
    throw convergence_error("alternating sqrt(n) sum did not converge within 500 terms");
}

inline GammaParts gamma_parts(double k, double beta, const PauliVillarsScheme& s, const QuadratureSpec& spec = {}) {
    if (!(k >= 0.0) || !(beta > 0.0)) throw domain_error("printed gamma requires k >= 0, beta > 0");
    const double pi = std::numbers::pi;
    const double pi2 = pi * pi;
    const double k2 = k * k;
    GammaParts g;

    auto zero = [&](double u) {
        const double w = u * (1.0 - u);
        std::array<double, 2> v{};
        for (int j = 0; j < 3; ++j) {
            const double D = s.mass_squared(j) + w * k2;
            v[0] += s.c[j] * u * std::sqrt(D);
            v[1] += s.c[j] * u * D * std::log(D);
        }
        return v;
    };
    const auto z = integrate_interval(zero, 0.0, 1.0, spec);
    g.g12_zero = -3.0 / (2.0 * pi2) * z.value[0];
    g.g3_zero = 5.0 / (16.0 * pi2) * z.value[1];

    const double b = beta;
    auto kernel = [b](double Y, double t) {
        if (Y > 2.0 * exp_underflow) return std::array<double, 6>{};
        const double y = std::exp(-Y);
        const double d = 1.0 + y;
        return std::array<double, 6>{
            y * y * y * (1.0 + Y + y) / (d * d),
            y * (1.0 + Y + y) / (d * d),
            std::sqrt(2.0 * b) * std::cosh(0.5 * t) * alternating_sqrt_sum(Y),
            y * (1.0 + Y + y) / (d * d),
            2.0 * Y / (b * b) * std::log1p(std::exp(-0.5 * Y)) - Y * y / (d * d),
            2.0 * y / d,
        };
    };
    auto weight = [](double u, double c, double D, double M) {
        const double a = c * u * (1.0 - u) * (1.0 - u);
        return std::array<double, 6>{a, a, c * u * D * std::sqrt(D), c * u * M, c * u, c * u * D};
    };
    const auto t = detail::double_integral<6>("printed gamma_thermal", k, beta, s, spec, kernel, weight);
    g.g11_thermal = -3.0 * k2 / (4.0 * pi2) * t[0];
    g.g11_thermal_alt = -3.0 * k2 / (4.0 * pi2) * t[1];
    g.g12_thermal = -3.0 / std::pow(pi, 2.5) * t[2];
    g.g2_thermal = -3.0 / (2.0 * pi2) * t[3];
    g.g3_thermal = 1.0 / (2.0 * pi2) * (t[4] + t[5]);

    const auto z0 = gamma_zero_part(k, s, spec);
    g.gamma_total = z0.g11 + g.g12_zero + z0.g2 + g.g3_zero + g.g11_thermal + g.g12_thermal + g.g2_thermal +
                    g.g3_thermal;
    return g;
}

}  // namespace pvfree::printed
