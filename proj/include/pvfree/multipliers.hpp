#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pvfree/errors.hpp"
#include "pvfree/parallel.hpp"
#include "pvfree/pv_scheme.hpp"
#include "pvfree/quadrature.hpp"
#include "pvfree/special_functions.hpp"

namespace pvfree {

struct GammaZeroParts {
    double g11 = 0.0;
    double g12 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    double error_estimate = 0.0;
    double sum() const { return g11 + g12 + g2 + g3; }
};

struct GammaThermalParts {
    double g11T = 0.0;
    double g12T = 0.0;
    double g2T = 0.0;
    double g3T = 0.0;
    double error_estimate = 0.0;
    double sum() const { return g11T + g12T + g2T + g3T; }
};

namespace detail {

inline constexpr double pi = std::numbers::pi;

inline void require_converged(const char* what, double k, double beta, double value, double err, bool ok) {
    if (ok) return;
    std::ostringstream os;
    os.precision(17);
    os << what << " did not converge at k = " << k;
    if (beta > 0.0) os << ", beta = " << beta;
    os << " (estimate " << value << ", error " << err << ")";
    throw accuracy_error(os.str(), value, err);
}

inline void require_converged_k(const char* what, double k, double beta, const auto& r) {
    require_converged(what, k, beta, vnorm(r.value), r.error_estimate, r.converged);
}

/// Sum_j c_j log(Delta_j), sum_j c_j Delta_j log(Delta_j), sum_j c_j m_j^2 log(Delta_j),
/// with Delta_j = m_j^2 + w k^2. For k^2 above the largest mass squared every
/// logarithm is taken of Delta_j / k^2; the three sums are unchanged since
/// sum c_j = sum c_j Delta_j = sum c_j m_j^2 = 0.
struct LogSums {
    double s_log = 0.0;
    double s_dlogd = 0.0;
    double s_mlogd = 0.0;
};

inline LogSums log_sums(const PauliVillarsScheme& s, double k2, double w) {
    LogSums r;
    const bool scaled = k2 > s.mass_squared(2);
    for (int j = 0; j < 3; ++j) {
        const double M = s.mass_squared(j);
        const double L = scaled ? std::log(M / k2 + w) : std::log(M + w * k2);
        const double D = M + w * k2;
        r.s_log += s.c[j] * L;
        r.s_dlogd += s.c[j] * D * L;
        r.s_mlogd += s.c[j] * M * L;
    }
    return r;
}

/// Absolute tolerance floor for species-combined thermal integrands at inverse temperature b.
inline double thermal_noise_floor(const PauliVillarsScheme& s, double k, double b) {
    double scale = 0.0;
    for (int j = 0; j < 3; ++j) scale += std::abs(s.c[j]) / (b * b * s.mass_squared(j));
    return 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + k * k) * scale;
}

/// Upper t limit beyond which exp(-x cosh t) underflows.
inline double t_cut(double x) {
    const double r = (exp_underflow + 40.0) / x;
    return r > 1.0 ? std::acosh(r) : 0.0;
}

/// Outer u-integral of an inner t-integral of a species-summed kernel.
/// kernel(y, Y, t) returns the per-species contribution (without c_j, Delta_j
/// weights); weight(u, c_j, Delta_j, m_j^2) multiplies componentwise.
template <std::size_t N, class Kernel, class Weight>
BasicQuadratureResult<std::array<double, N>> thermal_double_integral(double k, double b,
                                                                     const PauliVillarsScheme& s,
                                                                     const QuadratureSpec& spec, Kernel kernel,
                                                                     Weight weight) {
    using Vec = std::array<double, N>;
    QuadratureSpec sp = spec;
    sp.abs_tol = std::max(spec.abs_tol, thermal_noise_floor(s, k, b));
    const double k2 = k * k;
    double inner_err = 0.0;
    std::size_t evals = 0;
    auto outer = [&](double u) -> Vec {
        const double w = u * (1.0 - u);
        std::array<double, 3> D, X;
        for (int j = 0; j < 3; ++j) {
            D[j] = s.mass_squared(j) + w * k2;
            X[j] = b * std::sqrt(D[j]);
        }
        const double tmax = t_cut(X[0]);
        Vec acc{};
        if (tmax <= 0.0) return acc;
        std::array<Vec, 3> wj;
        for (int j = 0; j < 3; ++j) wj[j] = weight(u, s.c[j], D[j], s.mass_squared(j));
        auto inner = [&](double t) -> Vec {
            const double ch = std::cosh(t);
            Vec v{};
            for (int j = 0; j < 3; ++j) {
                const double Y = X[j] * ch;
                const double y = std::exp(-Y);
                const Vec kv = kernel(y, Y, t);
                for (std::size_t i = 0; i < N; ++i) v[i] += wj[j][i] * kv[i];
            }
            return v;
        };
        const auto r = integrate_interval(inner, 0.0, tmax, sp);
        evals += r.evaluations;
        inner_err = std::max(inner_err, r.error_estimate);
        if (!r.converged) inner_err = std::numeric_limits<double>::infinity();
        return r.value;
    };
    auto res = integrate_interval(outer, 0.0, 1.0, sp);
    res.evaluations += evals;
    res.error_estimate += inner_err;
    res.converged = res.converged && std::isfinite(inner_err);
    return res;
}

}  // namespace detail

/// Sum_j c_j log(m_j^2 + u(1-u)k^2) evaluated directly.
inline double pv_log_sum_direct(const PauliVillarsScheme& s, double k, double u) {
    const double w = u * (1.0 - u);
    double r = 0.0;
    for (int j = 0; j < 3; ++j) r += s.c[j] * std::log(s.mass_squared(j) + w * k * k);
    return r;
}

/// Same sum as Sum_j c_j log(m_j^2/k^2 + u(1-u)); requires k > 0.
inline double pv_log_sum_scaled(const PauliVillarsScheme& s, double k, double u) {
    const double w = u * (1.0 - u);
    double r = 0.0;
    for (int j = 0; j < 3; ++j) r += s.c[j] * std::log(s.mass_squared(j) / (k * k) + w);
    return r;
}

/// Uehling function U(k) = (k^2/4pi) * int_0^1 (z^2 - z^4/3) / (1 + k^2(1-z^2)/4) dz.
inline double uehling(double k, const QuadratureSpec& spec = {}) {
    if (!(k >= 0.0)) throw domain_error("uehling requires k >= 0");
    if (k == 0.0) return 0.0;
    const double k2 = k * k;
    auto f = [&](double z) { return (z * z - z * z * z * z / 3.0) / (1.0 + 0.25 * k2 * (1.0 - z * z)); };
    const auto r = integrate_interval(f, 0.0, 1.0, spec);
    detail::require_converged_k("uehling", k, 0.0, r);
    return k2 / (4.0 * std::numbers::pi) * r.value;
}

/// Zero-temperature magnetic multiplier -(2/pi) int_0^1 u(1-u) Sum_j c_j log(Delta_j) du.
inline double m_zero(double k, const PauliVillarsScheme& s, const QuadratureSpec& spec = {}) {
    if (!(k >= 0.0)) throw domain_error("m_zero requires k >= 0");
    const double k2 = k * k;
    auto f = [&](double u) {
        const double w = u * (1.0 - u);
        return w * detail::log_sums(s, k2, w).s_log;
    };
    const auto r = integrate_interval(f, 0.0, 1.0, spec);
    detail::require_converged_k("m_zero", k, 0.0, r);
    return -(2.0 / std::numbers::pi) * r.value;
}

/// Thermal magnetic multiplier, averaged over inverse temperatures (0, beta]:
/// -(8/pi) int_0^1 u(1-u) int_0^inf Sum_j c_j / (1 + exp(X_j cosh t)) dt du.
inline BasicQuadratureResult<double> m_thermal_result(double k, double beta, const PauliVillarsScheme& s,
                                                      const QuadratureSpec& spec = {}) {
    if (!(k >= 0.0)) throw domain_error("m_thermal requires k >= 0");
    if (!(beta > 0.0)) throw domain_error("m_thermal requires beta > 0");
    auto kernel = [](double y, double, double) { return std::array<double, 1>{y / (1.0 + y)}; };
    auto weight = [](double u, double c, double, double) { return std::array<double, 1>{c * u * (1.0 - u)}; };
    const auto r = detail::thermal_double_integral<1>(k, beta, s, spec, kernel, weight);
    const double f = -8.0 / std::numbers::pi;
    return {f * r.value[0], std::abs(f) * r.error_estimate, r.evaluations, r.converged};
}

inline double m_thermal(double k, double beta, const PauliVillarsScheme& s, const QuadratureSpec& spec = {}) {
    const auto r = m_thermal_result(k, beta, s, spec);
    detail::require_converged("m_thermal", k, beta, r.value, r.error_estimate, r.converged);
    return r.value;
}

/// Thermal magnetic kernel at a single inverse temperature b; its average over
/// (0, beta] equals m_thermal(k, beta).
inline double m_thermal_instantaneous(double k, double b, const PauliVillarsScheme& s,
                                      const QuadratureSpec& spec = {}) {
    if (!(k >= 0.0) || !(b > 0.0)) throw domain_error("m_thermal_instantaneous requires k >= 0, b > 0");
    auto kernel = [](double y, double Y, double) {
        const double d = 1.0 + y;
        return std::array<double, 1>{y * (d - Y) / (d * d)};
    };
    auto weight = [](double u, double c, double, double) { return std::array<double, 1>{c * u * (1.0 - u)}; };
    const auto r = detail::thermal_double_integral<1>(k, b, s, spec, kernel, weight);
    detail::require_converged_k("m_thermal_instantaneous", k, b, r);
    return -8.0 / std::numbers::pi * r.value[0];
}

/// Zero-temperature Gamma components.
inline GammaZeroParts gamma_zero_part(double k, const PauliVillarsScheme& s, const QuadratureSpec& spec = {}) {
    if (!(k >= 0.0)) throw domain_error("gamma_zero_part requires k >= 0");
    const double k2 = k * k;
    auto f = [&](double u) {
        const double w = u * (1.0 - u);
        const auto L = detail::log_sums(s, k2, w);
        return std::array<double, 3>{u * (1.0 - u) * (1.0 - u) * L.s_log, u * L.s_dlogd, u * L.s_mlogd};
    };
    const auto r = integrate_interval(f, 0.0, 1.0, spec);
    detail::require_converged_k("gamma_zero_part", k, 0.0, r);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    GammaZeroParts g;
    g.g11 = -3.0 * k2 / (8.0 * pi2) * r.value[0];
    g.g12 = 9.0 / (16.0 * pi2) * r.value[1];
    g.g2 = -3.0 / (8.0 * pi2) * r.value[2];
    g.g3 = -3.0 / (16.0 * pi2) * r.value[1];
    g.error_estimate = (1.0 + k2) * r.error_estimate;
    return g;
}

/// Thermal Gamma components at inverse temperature beta.
inline GammaThermalParts gamma_thermal_part(double k, double beta, const PauliVillarsScheme& s,
                                            const QuadratureSpec& spec = {}) {
    if (!(k >= 0.0)) throw domain_error("gamma_thermal_part requires k >= 0");
    if (!(beta > 0.0)) throw domain_error("gamma_thermal_part requires beta > 0");
    const double k2 = k * k;
    // Components: [u(1-u)^2, u*Delta, u*m^2, u*Delta] weights against the kernels
    // y(1+y-Y)/(1+y)^2, cosh^2 t y/(1+y), y(1+y-Y)/(1+y)^2, (sinh^2 t + 2) y/(1+y) - Y y/(1+y)^2.
    auto kernel = [](double y, double Y, double t) {
        const double d = 1.0 + y;
        const double fermi = y / d;
        const double dfermi = y / (d * d);
        const double sh = std::sinh(t);
        const double k1 = dfermi * (d - Y);
        return std::array<double, 4>{k1, (1.0 + sh * sh) * fermi, k1, (sh * sh + 2.0) * fermi - Y * dfermi};
    };
    auto weight = [](double u, double c, double D, double M) {
        return std::array<double, 4>{c * u * (1.0 - u) * (1.0 - u), c * u * D, c * u * M, c * u * D};
    };
    const auto r = detail::thermal_double_integral<4>(k, beta, s, spec, kernel, weight);
    detail::require_converged_k("gamma_thermal_part", k, beta, r);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    GammaThermalParts g;
    g.g11T = -3.0 * k2 / (2.0 * pi2) * r.value[0];
    g.g12T = 9.0 / (2.0 * pi2) * r.value[1];
    g.g2T = -3.0 / (2.0 * pi2) * r.value[2];
    g.g3T = -1.0 / (2.0 * pi2) * r.value[3];
    g.error_estimate = 4.5 / pi2 * (1.0 + k2) * r.error_estimate;
    return g;
}

enum Quantity : unsigned { quantity_m_zero = 1u, quantity_m_thermal = 2u, quantity_gamma = 4u, quantity_all = 7u };

struct MultiplierSample {
    double k = 0.0;
    double beta = 0.0;  // 0 when only zero-temperature quantities were requested
    unsigned quantities = 0;
    double m_zero = 0.0;
    double m_thermal = 0.0;
    GammaZeroParts gamma_zero;
    GammaThermalParts gamma_thermal;
    double gamma_total = 0.0;
    double error_estimate = 0.0;
};

/// Evaluates the requested multipliers at (k, beta).
inline MultiplierSample multiplier_sample(double k, double beta, const PauliVillarsScheme& s,
                                          const QuadratureSpec& spec = {}, unsigned quantities = quantity_all) {
    MultiplierSample out;
    out.k = k;
    out.beta = (quantities & (quantity_m_thermal | quantity_gamma)) ? beta : 0.0;
    out.quantities = quantities;
    if (quantities & quantity_m_zero) out.m_zero = m_zero(k, s, spec);
    if (quantities & quantity_m_thermal) {
        const auto r = m_thermal_result(k, beta, s, spec);
        detail::require_converged("m_thermal", k, beta, r.value, r.error_estimate, r.converged);
        out.m_thermal = r.value;
        out.error_estimate += r.error_estimate;
    }
    if (quantities & quantity_gamma) {
        out.gamma_zero = gamma_zero_part(k, s, spec);
        out.gamma_thermal = gamma_thermal_part(k, beta, s, spec);
        const auto& z = out.gamma_zero;
        const auto& t = out.gamma_thermal;
        out.gamma_total = ((z.g11 + z.g12) + (z.g2 + z.g3)) + ((t.g11T + t.g12T) + (t.g2T + t.g3T));
        out.error_estimate += z.error_estimate + t.error_estimate;
    }
    return out;
}

/// Gamma(k, beta) as the sum of its eight components.
inline MultiplierSample gamma(double k, double beta, const PauliVillarsScheme& s, const QuadratureSpec& spec = {}) {
    return multiplier_sample(k, beta, s, spec, quantity_gamma);
}

/// (1/beta) int_0^beta Gamma(k, b) db; the zero-temperature part is b-independent.
inline QuadratureResult gamma_beta_averaged_result(double k, double beta, const PauliVillarsScheme& s,
                                                   const QuadratureSpec& spec = {}) {
    if (!(k >= 0.0)) throw domain_error("gamma_beta_averaged requires k >= 0");
    if (!(beta > 0.0)) throw domain_error("gamma_beta_averaged requires beta > 0");
    const GammaZeroParts z = gamma_zero_part(k, s, spec);
    auto g = [&](double b) { return gamma_thermal_part(k, b, s, spec).sum(); };
    QuadratureResult r = beta_average(g, beta, spec);
    r.value += z.sum();
    r.error_estimate += z.error_estimate;
    return r;
}

inline double gamma_beta_averaged(double k, double beta, const PauliVillarsScheme& s, const QuadratureSpec& spec = {}) {
    const auto r = gamma_beta_averaged_result(k, beta, s, spec);
    detail::require_converged("gamma_beta_averaged", k, beta, r.value, r.error_estimate, r.converged);
    return r.value;
}

enum class KSpacing { linear, log };

struct MultiplierTable {
    PauliVillarsScheme scheme;
    double beta = 0.0;
    std::vector<MultiplierSample> samples;
    KSpacing k_spacing = KSpacing::linear;
};

/// Sample grid of `count` points on [k_min, k_max].
inline std::vector<double> k_grid(double k_min, double k_max, std::size_t count, KSpacing spacing) {
    if (count < 1) throw domain_error("at least one sample is required");
    if (!(k_min >= 0.0) || !(k_max >= k_min)) throw domain_error("require 0 <= k_min <= k_max");
    if (count > 1 && !(k_max > k_min)) throw domain_error("k_max must exceed k_min for more than one sample");
    if (spacing == KSpacing::log && !(k_min > 0.0)) throw domain_error("log spacing requires k_min > 0");
    std::vector<double> ks(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        ks[i] = spacing == KSpacing::log ? k_min * std::pow(k_max / k_min, f) : k_min + f * (k_max - k_min);
    }
    ks.back() = k_max;
    return ks;
}

inline MultiplierTable build_table(const PauliVillarsScheme& s, double beta, const std::vector<double>& ks,
                                   KSpacing spacing, const QuadratureSpec& spec = {},
                                   unsigned quantities = quantity_all, unsigned workers = worker_count()) {
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (!(ks[i] > ks[i - 1])) throw domain_error("table k grid must be strictly increasing");
    MultiplierTable t;
    t.scheme = s;
    t.beta = beta;
    t.k_spacing = spacing;
    t.samples.resize(ks.size());
    parallel_for(
        ks.size(), [&](std::size_t i) { t.samples[i] = multiplier_sample(ks[i], beta, s, spec, quantities); },
        workers);
    return t;
}

}  // namespace pvfree
