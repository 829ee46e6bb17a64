#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <mpfr.h>

#include "pvfree/errors.hpp"
#include "pvfree/quadrature.hpp"

namespace pvfree {

/// Fermionic Matsubara frequency (2l - 1) pi / beta.
inline double matsubara_frequency(std::int64_t l, double beta) {
    if (!(beta > 0.0)) throw domain_error("beta must be positive");
    return static_cast<double>(2 * l - 1) * std::numbers::pi / beta;
}

/// Symmetric partial sum over l = -terms+1 .. terms of 4x^2 / ((2l-1)^2 pi^2 + 4x^2).
inline double x_tanh_x_partial(double x, std::int64_t terms) {
    if (terms < 1) throw domain_error("terms must be at least 1");
    const double x2 = 4.0 * x * x;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (std::int64_t l = terms; l >= 1; --l) {
        const double o = static_cast<double>(2 * l - 1);
        s += x2 / (o * o * pi2 + x2);
    }
    return 2.0 * s;
}

enum class ThetaRepresentation { direct, poisson };

namespace detail {

inline double theta2_direct(double s, double beta) {
    const double a = s * std::numbers::pi * std::numbers::pi / (beta * beta);
    double sum = 0.0;
    for (std::int64_t l = 1;; ++l) {
        const double o = static_cast<double>(2 * l - 1);
        const double term = std::exp(-a * o * o);
        sum += term;
        if (term < 1e-18 * sum || term == 0.0) break;
        if (l > 100000000) throw convergence_error("theta2 direct series did not converge");
    }
    return 2.0 * sum;
}

class mpfr_value {
public:
    explicit mpfr_value(mpfr_prec_t bits) { mpfr_init2(v_, bits); }
    ~mpfr_value() { mpfr_clear(v_); }
    mpfr_value(const mpfr_value&) = delete;
    mpfr_value& operator=(const mpfr_value&) = delete;
    mpfr_ptr get() { return v_; }

private:
    mpfr_t v_;
};

// Bracket 1 + 2 sum_{n>=1} (-1)^n exp(-eps n^2) at the given binary precision.
inline double poisson_bracket_mp(double eps, mpfr_prec_t bits) {
    mpfr_value sum(bits), term(bits), e(bits);
    mpfr_set_ui(sum.get(), 1, MPFR_RNDN);
    mpfr_set_d(e.get(), eps, MPFR_RNDN);
    const double cutoff_log = -static_cast<double>(bits) * std::log(2.0) - 10.0;
    for (std::uint64_t n = 1;; ++n) {
        if (-eps * static_cast<double>(n) * static_cast<double>(n) < cutoff_log) break;
        mpfr_mul_ui(term.get(), e.get(), n, MPFR_RNDN);
        mpfr_mul_ui(term.get(), term.get(), n, MPFR_RNDN);
        mpfr_neg(term.get(), term.get(), MPFR_RNDN);
        mpfr_exp(term.get(), term.get(), MPFR_RNDN);
        mpfr_mul_ui(term.get(), term.get(), 2, MPFR_RNDN);
        if (n % 2 == 1)
            mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
        else
            mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    }
    return mpfr_get_d(sum.get(), MPFR_RNDN);
}

inline double theta2_poisson(double s, double beta) {
    const double eps = beta * beta / (4.0 * s);
    const double pref = beta / (2.0 * std::sqrt(std::numbers::pi * s));
    if (eps >= 1.0) {
        double sum = 1.0;
        for (std::int64_t n = 1;; ++n) {
            const double nn = static_cast<double>(n);
            const double term = 2.0 * std::exp(-eps * nn * nn);
            sum += (n % 2 == 1) ? -term : term;
            if (term < 1e-18 * std::abs(sum) || term == 0.0) break;
        }
        return pref * sum;
    }
    // The alternating series cancels to far below its leading terms; raise the
    // working precision until two successive evaluations agree.
    double prev = poisson_bracket_mp(eps, 128);
    for (mpfr_prec_t bits = 256; bits <= (1 << 20); bits *= 2) {
        const double cur = poisson_bracket_mp(eps, bits);
        if (std::abs(cur - prev) <= 1e-15 * std::abs(cur)) return pref * cur;
        prev = cur;
    }
    throw convergence_error("theta2 Poisson series needs more than 2^20 bits");
}

}  // namespace detail

/// Sum over l in Z of exp(-s omega(l, beta)^2) in the chosen representation.
inline double theta2(double s, double beta, ThetaRepresentation rep) {
    if (!(s > 0.0) || !(beta > 0.0)) throw domain_error("theta2 requires s > 0 and beta > 0");
    return rep == ThetaRepresentation::direct ? detail::theta2_direct(s, beta) : detail::theta2_poisson(s, beta);
}

/// Representation chosen by convergence regime.
inline double theta2(double s, double beta) {
    if (!(s > 0.0) || !(beta > 0.0)) throw domain_error("theta2 requires s > 0 and beta > 0");
    const double r = 4.0 * std::numbers::pi * std::numbers::pi * s / (beta * beta);
    return theta2(s, beta, r >= 1.0 ? ThetaRepresentation::direct : ThetaRepresentation::poisson);
}

/// Underflow threshold used to truncate cosh-suppressed t-integrals.
inline constexpr double exp_underflow = 745.0;

/// K_nu(x) from the Sommerfeld integral, truncated where x cosh t - nu t >= 745.
inline double bessel_k(double nu, double x, double tol = 1e-10) {
    if (!(x > 0.0)) throw domain_error("bessel_k requires x > 0");
    if (!(nu >= 0.0)) throw domain_error("bessel_k requires nu >= 0");
    if (!(tol > 0.0)) throw domain_error("bessel_k requires tol > 0");
    // Upper cut by bisection on the monotone tail of x cosh t - nu t.
    double lo = std::asinh(nu / x), hi = lo + 1.0;
    auto h = [&](double t) { return x * std::cosh(t) - nu * t - exp_underflow; };
    while (h(hi) < 0.0) hi = lo + 2.0 * (hi - lo);
    if (h(lo) < 0.0) {
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            (h(mid) < 0.0 ? lo : hi) = mid;
        }
    } else {
        hi = lo;
    }
    if (hi <= 0.0) return 0.0;
    auto f = [&](double t) {
        return 0.5 * (std::exp(-x * std::cosh(t) + nu * t) + std::exp(-x * std::cosh(t) - nu * t));
    };
    QuadratureSpec spec;
    spec.rel_tol = tol;
    spec.abs_tol = 1e-300;
    spec.max_subdivisions = 4000;
    const QuadratureResult r = integrate_interval(f, 0.0, hi, spec);
    if (!r.converged) throw accuracy_error("bessel_k quadrature did not converge", r.value, r.error_estimate);
    return r.value;
}

struct ThermoPoint {
    double lambda;
    double beta;
    double occupation;
    double entropy;
    double free_energy_density;
};

/// Fermi occupation, entropy and free-energy density in overflow-safe form.
inline ThermoPoint fermi_thermo(double lambda, double beta) {
    if (!(beta > 0.0)) throw domain_error("beta must be positive");
    const double z = beta * lambda;
    const double az = std::abs(z);
    const double e = std::exp(-az);
    const double soft = std::log1p(e);
    const double small = e / (1.0 + e);
    ThermoPoint p;
    p.lambda = lambda;
    p.beta = beta;
    p.occupation = z > 0.0 ? small : 1.0 - small;
    p.entropy = soft + az * small;
    p.free_energy_density = -(0.5 * az + soft) / beta;
    return p;
}

}  // namespace pvfree
