#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "pvfree/errors.hpp"

namespace pvfree {

/// Pauli-Villars masses m_j, coefficients c_j and averaged cutoff.
/// c0 = 1; sum c_j = sum c_j m_j^2 = 0; log(cutoff^2) = -sum c_j log m_j^2.
struct PauliVillarsScheme {
    std::array<double, 3> m{};
    std::array<double, 3> c{};
    double cutoff = 0.0;

    double mass_squared(int j) const { return m[j] * m[j]; }

    /// Sum |c_j| / m_j^p.
    double weighted_abs_sum(int p) const {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += std::abs(c[j]) / std::pow(m[j], p);
        return s;
    }
};

inline double cutoff_from_coefficients(const std::array<double, 3>& m, const std::array<double, 3>& c) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += c[j] * std::log(m[j] * m[j]);
    return std::exp(-0.5 * s);
}

inline PauliVillarsScheme scheme_from_masses(double m0, double m1, double m2) {
    if (!(m0 > 0.0 && m1 > 0.0 && m2 > 0.0)) throw domain_error("masses must be positive");
    if (m1 == m2) throw degenerate_scheme_error("m1 = m2 makes the coefficients singular");
    if (!(m0 < m1 && m1 < m2)) throw domain_error("masses must satisfy m0 < m1 < m2");
    const double M0 = m0 * m0, M1 = m1 * m1, M2 = m2 * m2;
    const double d = M2 - M1;
    if (d == 0.0) throw degenerate_scheme_error("m2^2 - m1^2 underflows");
    PauliVillarsScheme s;
    s.m = {m0, m1, m2};
    s.c = {1.0, (M0 - M2) / d, (M1 - M0) / d};
    s.cutoff = cutoff_from_coefficients(s.m, s.c);
    return s;
}

/// Scheme with arbitrary coefficients and no invariant checks. Used to
/// probe oracles without Pauli-Villars cancellation.
inline PauliVillarsScheme unchecked_scheme(const std::array<double, 3>& m, const std::array<double, 3>& c) {
    PauliVillarsScheme s;
    s.m = m;
    s.c = c;
    s.cutoff = cutoff_from_coefficients(m, c);
    return s;
}

/// Residuals of the two Pauli-Villars conditions, relative to the largest term.
struct SchemeResiduals {
    double sum_c;
    double sum_c_m2;
};

inline SchemeResiduals scheme_residuals(const PauliVillarsScheme& s) {
    double sc = 0.0, scm = 0.0, maxc = 0.0, maxcm = 0.0;
    for (int j = 0; j < 3; ++j) {
        const double cm = s.c[j] * s.mass_squared(j);
        sc += s.c[j];
        scm += cm;
        maxc = std::max(maxc, std::abs(s.c[j]));
        maxcm = std::max(maxcm, std::abs(cm));
    }
    return {std::abs(sc) / maxc, std::abs(scm) / maxcm};
}

/// Scheme with m2 = mass_ratio * m1 whose averaged cutoff equals target_cutoff.
/// The cutoff is invariant under common rescaling of the masses, and tends to 1
/// as m1 -> m0 at any ratio; it grows monotonically with m1.
inline PauliVillarsScheme scheme_from_cutoff(double m0, double target_cutoff, double mass_ratio = 2.0) {
    if (!(m0 > 0.0) || !(target_cutoff > 0.0)) throw domain_error("m0 and cutoff must be positive");
    if (!(mass_ratio > 1.0)) throw domain_error("mass_ratio must exceed 1");

    auto cutoff_at = [&](double m1) { return scheme_from_masses(m0, m1, mass_ratio * m1).cutoff; };
    double lo = m0 * (1.0 + 1e-9);
    double hi = m0 * 1e12;
    if (!(target_cutoff > cutoff_at(lo)) || !(target_cutoff < cutoff_at(hi)))
        throw infeasible_cutoff_error("no auxiliary mass reproduces the requested cutoff at this ratio");

    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (cutoff_at(mid) < target_cutoff)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * hi) {
            const double m1 = 0.5 * (lo + hi);
            PauliVillarsScheme s = scheme_from_masses(m0, m1, mass_ratio * m1);
            if (std::abs(s.cutoff - target_cutoff) > 1e-10 * target_cutoff)
                throw convergence_error("bisection bracket collapsed without matching the cutoff");
            return s;
        }
    }
    throw convergence_error("cutoff bisection did not converge in 200 iterations");
}

}  // namespace pvfree
