#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "pvfree/errors.hpp"
#include "pvfree/parallel.hpp"
#include "pvfree/pv_scheme.hpp"
#include "pvfree/quadrature.hpp"
#include "pvfree/special_functions.hpp"

namespace pvfree {

struct OracleSpec {
    int l_max = 400;
    QuadratureSpec p_quadrature{1e-7, 1e-300, 2000, HalfLineTransform::double_exponential};
    bool tail_extrapolation = true;
    double target_rel_tol = 1e-4;
    unsigned workers = worker_count();

    void validate() const {
        if (l_max < 8) throw domain_error("oracle l_max must be at least 8");
        if (!(target_rel_tol > 0.0)) throw domain_error("oracle target tolerance must be positive");
        p_quadrature.validate();
    }
};

enum class OracleKind { gamma = 0, vector = 1, scalar = 2 };

/// Per-frequency contributions for l = 1..l_max, each already doubled for the
/// mirror frequency 1 - l and multiplied by 1/(2 beta pi^3).
struct OracleTerms {
    double beta = 0.0;
    std::array<std::vector<double>, 3> terms;
    std::vector<double> quadrature_error;
};

struct OracleResult {
    double value = 0.0;
    double partial_sum = 0.0;
    double tail = 0.0;
    double tail_estimate = 0.0;
    double error_estimate = 0.0;
    int l_max = 0;
};

namespace detail {

// Divided-difference table of a function on the three squared masses:
// f[0], f[1], f[2], f[0,1], f[1,2], f[0,1,2].
struct Divided3 {
    double f0, f1, f2, f01, f12, f012;
};

inline Divided3 dd_reciprocal(double A, const std::array<double, 3>& M) {
    const double h0 = 1.0 / (A + M[0]), h1 = 1.0 / (A + M[1]), h2 = 1.0 / (A + M[2]);
    return {h0, h1, h2, -h0 * h1, -h1 * h2, h0 * h1 * h2};
}

inline Divided3 dd_linear(double alpha, double slope, const std::array<double, 3>& M) {
    return {alpha + slope * M[0], alpha + slope * M[1], alpha + slope * M[2], slope, slope, 0.0};
}

// Leibniz rule for divided differences of a product.
inline Divided3 dd_product(const Divided3& f, const Divided3& g) {
    return {f.f0 * g.f0,
            f.f1 * g.f1,
            f.f2 * g.f2,
            f.f0 * g.f01 + f.f01 * g.f1,
            f.f1 * g.f12 + f.f12 * g.f2,
            f.f0 * g.f012 + f.f01 * g.f12 + f.f012 * g.f2};
}

inline Divided3 dd_axpy(double a, const Divided3& x, const Divided3& y) {
    return {a * x.f0 + y.f0, a * x.f1 + y.f1, a * x.f2 + y.f2,
            a * x.f01 + y.f01, a * x.f12 + y.f12, a * x.f012 + y.f012};
}

// Newton-form weights: sum_j c_j f(M_j) = w0 f[0] + w1 f[0,1] + w2 f[0,1,2].
// For a Pauli-Villars scheme w0 = w1 = 0 exactly; residues at rounding level
// are removed so that only the second divided difference survives.
struct SpeciesWeights {
    std::array<double, 3> M;
    double w0, w1, w2;
};

inline SpeciesWeights species_weights(const PauliVillarsScheme& s) {
    SpeciesWeights r;
    for (int j = 0; j < 3; ++j) r.M[j] = s.mass_squared(j);
    double w0 = 0.0, w1 = 0.0, n0 = 0.0, n1 = 0.0;
    for (int j = 0; j < 3; ++j) {
        w0 += s.c[j];
        n0 += std::abs(s.c[j]);
        w1 += s.c[j] * (r.M[j] - r.M[0]);
        n1 += std::abs(s.c[j] * (r.M[j] - r.M[0]));
    }
    const double tol = 64.0 * std::numeric_limits<double>::epsilon();
    r.w0 = std::abs(w0) <= tol * n0 ? 0.0 : w0;
    r.w1 = std::abs(w1) <= tol * n1 ? 0.0 : w1;
    r.w2 = s.c[2] * (r.M[2] - r.M[0]) * (r.M[2] - r.M[1]);
    return r;
}

// p-integral of the species-combined integrands at frequency omega, in axial
// coordinates around the k axis: 2 pi int rho d rho int dz, with z measured
// from k/2 and both half-lines mapped rationally at the scale
// sqrt(m0^2 + omega^2 + k^2/4).
inline BasicQuadratureResult<std::array<double, 4>> oracle_p_integral(double k, double omega,
                                                                      const PauliVillarsScheme& s,
                                                                      const QuadratureSpec& spec) {
    using Vec = std::array<double, 4>;
    const SpeciesWeights sw = species_weights(s);
    const double w2 = omega * omega;
    const double k2 = k * k;
    const double S = std::sqrt(sw.M[0] + w2 + 0.25 * k2);
    const double hk = 0.5 * k;
    const double floor_scale = 64.0 * std::numeric_limits<double>::epsilon() / spec.rel_tol;
    std::size_t evals = 0;
    double inner_err = 0.0;
    bool inner_ok = true;
    auto combine = [&](const Divided3& f, double& mag) {
        const double t0 = sw.w0 * f.f0, t1 = sw.w1 * f.f01, t2 = sw.w2 * f.f012;
        mag += std::abs(t0) + std::abs(t1) + std::abs(t2);
        return t0 + t1 + t2;
    };
    auto outer = [&](double r) -> Vec {
        const double om = 1.0 - r;
        const double rho = S * r / om;
        const double jr = 2.0 * std::numbers::pi * rho * S / (om * om);
        const double rho2 = rho * rho;
        auto inner = [&](double q) -> Vec {
            const double d = 1.0 - q * q;
            const double zs = S * q / d;
            const double jz = S * (1.0 + q * q) / (d * d);
            const double z = zs + hk;
            const double p2 = rho2 + z * z;
            const double pk2 = rho2 + (z - k) * (z - k);
            // Integrands as functions of the species mass squared M, with
            // a = p^2 + M + omega^2 and b = (p - k)^2 + M + omega^2.
            const Divided3 ha = dd_reciprocal(p2 + w2, sw.M);
            const Divided3 hb = dd_reciprocal(pk2 + w2, sw.M);
            const Divided3 ha2 = dd_product(ha, ha);
            const Divided3 hab = dd_product(ha, hb);
            const Divided3 ha2b = dd_product(ha2, hb);
            const Divided3 num = dd_linear(w2 * (3.0 * p2 - w2), 3.0 * w2, sw.M);
            const Divided3 g = dd_product(num, ha2b);
            const Divided3 va = dd_axpy(-1.0, ha2, dd_axpy(k2, ha2b, hab));
            const Divided3 vs =
                dd_axpy(-1.0, ha2, dd_axpy(4.0, hab, dd_axpy(k2 - 4.0 * z * k - 4.0 * w2, ha2b, Divided3{})));
            double mag_g = 0.0, mag_v = 0.0;
            Vec v{};
            v[0] = combine(g, mag_g);
            v[1] = w2 * combine(va, mag_v);
            v[2] = w2 * combine(vs, mag_v);
            v[3] = floor_scale * (mag_g + w2 * mag_v);
            for (double& x : v) x *= jz;
            return v;
        };
        const auto res = integrate_interval(inner, -1.0, 1.0, spec);
        evals += res.evaluations;
        inner_err = std::max(inner_err, res.error_estimate);
        inner_ok = inner_ok && res.converged;
        Vec out = res.value;
        for (double& x : out) x *= jr;
        return out;
    };
    auto res = integrate_interval(outer, 0.0, 1.0, spec);
    res.evaluations += evals;
    res.error_estimate += inner_err;
    res.converged = res.converged && inner_ok;
    return res;
}

// Hurwitz zeta(3, a) by Euler-Maclaurin after ten explicit terms.
inline double hurwitz_zeta3(double a) {
    double s = 0.0;
    for (int n = 0; n < 10; ++n) s += 1.0 / std::pow(a + n, 3);
    const double x = a + 10.0;
    s += 1.0 / (2.0 * x * x) + 1.0 / (2.0 * x * x * x) + 3.0 / (12.0 * std::pow(x, 4)) -
         60.0 / (720.0 * std::pow(x, 6));
    return s;
}

}  // namespace detail

/// Contributions of the Matsubara frequencies l = 1..l_max to all three oracles.
inline OracleTerms matsubara_oracle_terms(double k, double beta, const PauliVillarsScheme& s, const OracleSpec& spec) {
    spec.validate();
    if (!(k >= 0.0)) throw domain_error("oracle requires k >= 0");
    if (!(beta > 0.0)) throw domain_error("oracle requires beta > 0");
    const std::size_t L = static_cast<std::size_t>(spec.l_max);
    OracleTerms out;
    out.beta = beta;
    for (auto& t : out.terms) t.assign(L, 0.0);
    out.quadrature_error.assign(L, 0.0);
    const double pref = 2.0 / (2.0 * beta * std::pow(std::numbers::pi, 3));
    parallel_for(
        L,
        [&](std::size_t i) {
            const double omega = matsubara_frequency(static_cast<std::int64_t>(i) + 1, beta);
            const auto r = detail::oracle_p_integral(k, omega, s, spec.p_quadrature);
            if (!r.converged) {
                std::ostringstream os;
                os.precision(17);
                os << "oracle p-integral did not converge at l = " << i + 1 << ", k = " << k << ", beta = " << beta;
                throw accuracy_error(os.str(), pref * r.value[0], pref * r.error_estimate);
            }
            for (int c = 0; c < 3; ++c) out.terms[c][i] = pref * r.value[c];
            out.quadrature_error[i] = pref * r.error_estimate;
        },
        spec.workers);
    return out;
}

/// Partial sums of one oracle after the first n frequencies, for each n in counts.
inline std::vector<double> oracle_partial_sums(const OracleTerms& t, OracleKind kind, const std::vector<int>& counts) {
    const auto& v = t.terms[static_cast<int>(kind)];
    std::vector<double> out;
    for (int n : counts) {
        if (n < 1 || static_cast<std::size_t>(n) > v.size()) throw domain_error("partial-sum count out of range");
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += v[i];
        out.push_back(s);
    }
    return out;
}

/// Sums the terms of one oracle, fits the remainder to c / |omega|^3 and checks convergence.
inline OracleResult reduce_oracle(const OracleTerms& t, OracleKind kind, const OracleSpec& spec) {
    const auto& v = t.terms[static_cast<int>(kind)];
    const int L = static_cast<int>(v.size());
    OracleResult r;
    r.l_max = L;
    double qerr = 0.0;
    for (int i = 0; i < L; ++i) {
        r.partial_sum += v[i];
        qerr += t.quadrature_error[i];
    }
    const int fit = std::min(8, L / 2);
    double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin, csum = 0.0;
    for (int i = L - fit; i < L; ++i) {
        const double w = matsubara_frequency(i + 1, t.beta);
        const double c = v[i] * w * w * w;
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
        csum += c;
    }
    const double C = csum / fit;
    const double scale = std::pow(t.beta / std::numbers::pi, 3) / 8.0 * detail::hurwitz_zeta3(L + 0.5);
    r.tail = C * scale;
    r.tail_estimate = std::abs(r.tail);
    const double tail_uncertainty = 0.5 * (cmax - cmin) * scale;

    const double half = v[L / 2 - 1];
    const bool decaying = std::abs(v[L - 1]) <= 0.5 * std::abs(half) || std::abs(v[L - 1]) <= 64.0 * qerr / L;
    if (!decaying || r.tail_estimate > 10.0 * spec.target_rel_tol * std::abs(r.partial_sum)) {
        std::ostringstream os;
        os.precision(6);
        os << "Matsubara sum not converged: partial sum " << r.partial_sum << " after " << L
           << " frequencies, tail estimate " << r.tail_estimate << ", last term " << v[L - 1];
        throw oracle_accuracy_error(os.str(), r.partial_sum, r.tail_estimate);
    }
    if (spec.tail_extrapolation) {
        r.value = r.partial_sum + r.tail;
        r.error_estimate = qerr + tail_uncertainty;
    } else {
        r.value = r.partial_sum;
        r.error_estimate = qerr + r.tail_estimate;
    }
    return r;
}

struct OracleBundle {
    OracleResult gamma;
    OracleResult vector;
    OracleResult scalar;
};

/// All three oracles from one pass over the frequencies.
inline OracleBundle matsubara_oracles(double k, double beta, const PauliVillarsScheme& s, const OracleSpec& spec = {}) {
    const OracleTerms t = matsubara_oracle_terms(k, beta, s, spec);
    return {reduce_oracle(t, OracleKind::gamma, spec), reduce_oracle(t, OracleKind::vector, spec),
            reduce_oracle(t, OracleKind::scalar, spec)};
}

inline OracleResult oracle_result(OracleKind kind, double k, double beta, const PauliVillarsScheme& s,
                                  const OracleSpec& spec = {}) {
    return reduce_oracle(matsubara_oracle_terms(k, beta, s, spec), kind, spec);
}

/// Gamma(k, beta) from the Matsubara sum of the momentum integral.
inline double gamma_matsubara_oracle(double k, double beta, const PauliVillarsScheme& s, const OracleSpec& spec = {}) {
    return oracle_result(OracleKind::gamma, k, beta, s, spec).value;
}

/// Coefficient of |A(k)|^2 at a single inverse temperature.
inline double vector_multiplier_oracle(double k, double beta, const PauliVillarsScheme& s,
                                       const OracleSpec& spec = {}) {
    if (!(k > 0.0)) throw domain_error("vector_multiplier_oracle requires k > 0");
    return oracle_result(OracleKind::vector, k, beta, s, spec).value;
}

/// Coefficient of |V(k)|^2 at a single inverse temperature.
inline double scalar_multiplier_oracle(double k, double beta, const PauliVillarsScheme& s,
                                       const OracleSpec& spec = {}) {
    if (!(k > 0.0)) throw domain_error("scalar_multiplier_oracle requires k > 0");
    return oracle_result(OracleKind::scalar, k, beta, s, spec).value;
}

struct BesselIdentityCheck {
    double lhs;
    double rhs_corrected;
    double rhs_as_printed;
};

/// int_0^inf x^(nu-1) exp(-alpha/x - gamma x) dx against 2 (alpha/gamma)^(nu/2) K_nu(arg)
/// with arg = 2 sqrt(alpha gamma) and with the printed arg = 2 sqrt(alpha nu).
inline BesselIdentityCheck bessel_integral_identity_check(double nu, double alpha, double gamma_param,
                                                          const QuadratureSpec& spec = {}) {
    if (!(alpha > 0.0) || !(gamma_param > 0.0)) throw domain_error("alpha and gamma must be positive");
    if (!(nu >= 0.0)) throw domain_error("nu must be non-negative");
    // With x = sqrt(alpha/gamma) e^s the left side is x0^nu int exp(nu s - z cosh s) ds.
    const double x0 = std::sqrt(alpha / gamma_param);
    const double z = 2.0 * std::sqrt(alpha * gamma_param);
    const double shift = nu * std::log(x0);
    auto g = [&](double s) { return std::exp(shift + nu * s - z * std::cosh(s)); };
    double hi = 1.0;
    while (z * std::cosh(hi) - nu * hi - shift < exp_underflow) hi *= 1.5;
    const auto r = integrate_interval(g, -hi, hi, spec);
    if (!r.converged) throw accuracy_error("Bessel identity quadrature did not converge", r.value, r.error_estimate);
    BesselIdentityCheck out;
    out.lhs = r.value;
    const double pref = 2.0 * std::pow(alpha / gamma_param, 0.5 * nu);
    out.rhs_corrected = pref * bessel_k(nu, z, spec.rel_tol);
    const double zp = 2.0 * std::sqrt(alpha * nu);
    out.rhs_as_printed = zp > 0.0 ? pref * bessel_k(nu, zp, spec.rel_tol) : std::numeric_limits<double>::infinity();
    return out;
}

/// beta^-2 Sum_{|l| <= l_max} omega^2 / (m^2 + omega^2)^2, bounded by 1/4 (1/8 from each sign of l).
inline double matsubara_boundedness_sum(double m, double beta, int l_max) {
    double s = 0.0;
    for (int l = -l_max + 1; l <= l_max; ++l) {
        const double w = matsubara_frequency(l, beta);
        const double d = m * m + w * w;
        s += w * w / (d * d);
    }
    return s / (beta * beta);
}

}  // namespace pvfree
