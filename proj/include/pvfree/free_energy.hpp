#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "pvfree/errors.hpp"
#include "pvfree/fields.hpp"
#include "pvfree/multipliers.hpp"
#include "pvfree/parallel.hpp"
#include "pvfree/pv_scheme.hpp"
#include "pvfree/quadrature.hpp"

namespace pvfree {

struct RemainderFactors {
    double factor4 = 0.0;
    double factor6 = 0.0;
    double bound = 0.0;
};

/// factor4 = (sum |c_j|/m_j) ||F||^4, factor6 = (sum |c_j|/m_j^2) ||F||^6, bound = kappa (factor4 + factor6).
inline RemainderFactors remainder_factors(double l2_F_squared, const PauliVillarsScheme& s, double kappa = 1.0) {
    if (!(l2_F_squared >= 0.0)) throw domain_error("l2_F_squared must be non-negative");
    if (!(kappa > 0.0)) throw domain_error("kappa must be positive");
    RemainderFactors r;
    r.factor4 = s.weighted_abs_sum(1) * l2_F_squared * l2_F_squared;
    r.factor6 = s.weighted_abs_sum(2) * l2_F_squared * l2_F_squared * l2_F_squared;
    r.bound = kappa * (r.factor4 + r.factor6);
    return r;
}

struct FreeEnergyDiagnostics {
    std::size_t distinct_magnitudes = 0;
    std::size_t multiplier_nodes = 0;
    bool interpolated = false;
    int gauss_points = 16;
    std::vector<double> sentinel_k;
    double richardson_max_abs = 0.0;
    double richardson_max_rel = 0.0;
    double max_error_estimate = 0.0;
    double k_max = 0.0;
};

struct FreeEnergyReport {
    double f2_total = 0.0;
    double magnetic_electric_part = 0.0;
    double gamma_part = 0.0;
    double remainder_factor_4 = 0.0;
    double remainder_factor_6 = 0.0;
    double remainder_bound = 0.0;
    double kappa = 1.0;
    double l2_F_squared = 0.0;
    double l1_E = 0.0;
    double beta = 0.0;
    FreeEnergyDiagnostics quadrature_diagnostics;
};

struct FreeEnergyOptions {
    double kappa = 1.0;
    std::size_t max_exact_nodes = 512;
    int gauss_points = 16;
    int richardson_points = 32;
    std::size_t sentinels = 5;
    double richardson_rel_tol = 1e-6;
    unsigned workers = worker_count();
};

/// Multipliers at one |k|: M0 + MT and the b-averaged Gamma.
struct RadialMultipliers {
    double m_sum = 0.0;
    double gamma_bar = 0.0;
    double error_estimate = 0.0;
};

/// Gamma b-averaged with a fixed Gauss-Legendre rule on (0, beta].
inline double gamma_beta_averaged_gauss(double k, double beta, const PauliVillarsScheme& s, const QuadratureSpec& spec,
                                        int points) {
    const GammaZeroParts z = gamma_zero_part(k, s, spec);
    double err = 0.0;
    auto g = [&](double b) {
        const auto t = gamma_thermal_part(k, b, s, spec);
        err = std::max(err, t.error_estimate);
        return t.sum();
    };
    const double v = gauss_beta_average(g, beta, points) + z.sum();
    if (!std::isfinite(v)) throw evaluation_error("gamma_beta_averaged_gauss", k);
    return v;
}

inline RadialMultipliers radial_multipliers(double k, double beta, const PauliVillarsScheme& s,
                                            const QuadratureSpec& spec, int gauss_points) {
    RadialMultipliers r;
    const auto mt = m_thermal_result(k, beta, s, spec);
    detail::require_converged("m_thermal", k, beta, mt.value, mt.error_estimate, mt.converged);
    r.m_sum = m_zero(k, s, spec) + mt.value;
    r.gamma_bar = gamma_beta_averaged_gauss(k, beta, s, spec, gauss_points);
    r.error_estimate = mt.error_estimate;
    return r;
}

namespace detail {

struct LatticeMode {
    double k2;
    std::array<double, 3> k;
    std::size_t index;
};

inline bool mode_order(const LatticeMode& a, const LatticeMode& b) {
    if (a.k2 != b.k2) return a.k2 < b.k2;
    return a.k < b.k;
}

}  // namespace detail

/// Quadratic free energy of a Coulomb-gauge field at inverse temperature beta.
inline FreeEnergyReport quadratic_free_energy(const SpectralField& spectral, double beta, const PauliVillarsScheme& s,
                                              const QuadratureSpec& spec = {}, const FreeEnergyOptions& opt = {}) {
    if (!(beta > 0.0)) throw domain_error("quadratic_free_energy requires beta > 0");
    if (!(opt.kappa > 0.0)) throw domain_error("kappa must be positive");
    spec.validate();
    const FieldSpectra fs = field_spectra_and_norms(spectral);

    const std::size_t N = spectral.size();
    std::vector<detail::LatticeMode> modes(N);
    for (std::size_t i = 0; i < N; ++i) {
        const auto k = spectral.wavevector(i);
        modes[i] = {k[0] * k[0] + k[1] * k[1] + k[2] * k[2], k, i};
    }
    std::sort(modes.begin(), modes.end(), detail::mode_order);

    std::vector<double> mags;
    for (const auto& m : modes) {
        const double k = std::sqrt(m.k2);
        if (mags.empty() || k != mags.back()) mags.push_back(k);
    }

    FreeEnergyReport rep;
    rep.beta = beta;
    rep.kappa = opt.kappa;
    rep.l2_F_squared = fs.l2_F_squared;
    rep.l1_E = fs.l1_E;
    auto& diag = rep.quadrature_diagnostics;
    diag.distinct_magnitudes = mags.size();
    diag.gauss_points = opt.gauss_points;
    diag.k_max = mags.back();
    diag.interpolated = mags.size() > opt.max_exact_nodes;

    std::vector<double> nodes;
    double t0 = 0.0, h = 1.0;
    if (!diag.interpolated) {
        nodes = mags;
    } else {
        const std::size_t n = opt.max_exact_nodes;
        h = std::log1p(diag.k_max) / static_cast<double>(n - 1);
        nodes.resize(n);
        for (std::size_t i = 0; i < n; ++i) nodes[i] = std::expm1(t0 + h * static_cast<double>(i));
        nodes.front() = 0.0;
        nodes.back() = diag.k_max;
    }
    diag.multiplier_nodes = nodes.size();

    std::vector<RadialMultipliers> values(nodes.size());
    parallel_for(
        nodes.size(), [&](std::size_t i) { values[i] = radial_multipliers(nodes[i], beta, s, spec, opt.gauss_points); },
        opt.workers);
    for (const auto& v : values) diag.max_error_estimate = std::max(diag.max_error_estimate, v.error_estimate);

    // Richardson check of the fixed Gauss rule on sentinel magnitudes.
    const std::size_t ns = std::min(opt.sentinels, nodes.size());
    diag.sentinel_k.resize(ns);
    std::vector<double> fine(ns);
    std::vector<std::size_t> sentinel_index(ns);
    for (std::size_t j = 0; j < ns; ++j) {
        sentinel_index[j] = ns == 1 ? 0 : j * (nodes.size() - 1) / (ns - 1);
        diag.sentinel_k[j] = nodes[sentinel_index[j]];
    }
    parallel_for(
        ns,
        [&](std::size_t j) {
            fine[j] = gamma_beta_averaged_gauss(diag.sentinel_k[j], beta, s, spec, opt.richardson_points);
        },
        opt.workers);
    for (std::size_t j = 0; j < ns; ++j) {
        const double coarse = values[sentinel_index[j]].gamma_bar;
        const double d = std::abs(fine[j] - coarse);
        const double rel = d / std::max(std::abs(fine[j]), spec.abs_tol);
        diag.richardson_max_abs = std::max(diag.richardson_max_abs, d);
        diag.richardson_max_rel = std::max(diag.richardson_max_rel, rel);
        if (rel > opt.richardson_rel_tol) {
            std::ostringstream os;
            os.precision(17);
            os << "fixed Gauss b-average failed its refinement check at k = " << diag.sentinel_k[j]
               << ", beta = " << beta << " (" << coarse << " vs " << fine[j] << ")";
            throw accuracy_error(os.str(), fine[j], d);
        }
    }

    // Multipliers at every lattice magnitude.
    std::vector<double> m_sum(mags.size()), g_bar(mags.size());
    if (!diag.interpolated) {
        for (std::size_t i = 0; i < mags.size(); ++i) {
            m_sum[i] = values[i].m_sum;
            g_bar[i] = values[i].gamma_bar;
        }
    } else {
        std::vector<double> ym(nodes.size()), yg(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            ym[i] = values[i].m_sum;
            yg[i] = values[i].gamma_bar;
        }
        using boost::math::interpolators::cardinal_cubic_b_spline;
        cardinal_cubic_b_spline<double> sm(ym.begin(), ym.end(), t0, h);
        cardinal_cubic_b_spline<double> sg(yg.begin(), yg.end(), t0, h);
        for (std::size_t i = 0; i < mags.size(); ++i) {
            const double t = std::min(std::log1p(mags[i]), t0 + h * static_cast<double>(nodes.size() - 1));
            m_sum[i] = sm(t);
            g_bar[i] = sg(t);
        }
    }

    // Serial reduction in (|k|, k) order.
    const double dk3 = spectral.k_cell_volume();
    double me = 0.0, gp = 0.0;
    std::size_t mi = 0;
    double current = std::sqrt(modes.front().k2);
    for (const auto& m : modes) {
        const double k = std::sqrt(m.k2);
        if (k != current) {
            ++mi;
            current = k;
        }
        const double e2 = fs.e_spectrum[m.index];
        const double b2 = fs.b_spectrum[m.index];
        me += m_sum[mi] * (b2 - e2);
        if (m.k2 > 0.0) gp += g_bar[mi] / m.k2 * e2;
    }
    rep.magnetic_electric_part = me * dk3 / (8.0 * std::numbers::pi);
    rep.gamma_part = gp * dk3;
    rep.f2_total = rep.magnetic_electric_part + rep.gamma_part;

    const auto rf = remainder_factors(fs.l2_F_squared, s, opt.kappa);
    rep.remainder_factor_4 = rf.factor4;
    rep.remainder_factor_6 = rf.factor6;
    rep.remainder_bound = rf.bound;
    return rep;
}

struct RadialReference {
    double magnetic_electric_part = 0.0;
    double gamma_part = 0.0;
    double f2_total = 0.0;
    double error_estimate = 0.0;
};

/// F2 of the Gaussian electric test field on R^3 by one-dimensional quadrature in |k|,
/// with |E_hat(k)|^2 = amplitude^2 width^6 k^2 exp(-width^2 k^2) and adaptive b-averaging.
inline RadialReference gaussian_radial_reference(double amplitude, double width, double beta,
                                                 const PauliVillarsScheme& s, const QuadratureSpec& spec = {}) {
    if (!(width > 0.0) || !(beta > 0.0)) throw domain_error("width and beta must be positive");
    const double pi = std::numbers::pi;
    const double a2w6 = amplitude * amplitude * std::pow(width, 6);
    // Substituting r = w k makes the Gaussian weight unit-scale.
    auto e2 = [&](double k) { return a2w6 * k * k * std::exp(-width * width * k * k); };
    QuadratureSpec inner = spec;
    auto fm = [&](double r) {
        const double k = r / width;
        return k * k * (m_zero(k, s, inner) + m_thermal(k, beta, s, inner)) * e2(k) / width;
    };
    auto fg = [&](double r) {
        const double k = r / width;
        return gamma_beta_averaged(k, beta, s, inner) * e2(k) / width;
    };
    const auto rm = integrate_half_line(fm, spec);
    detail::require_converged("radial reference (M)", 0.0, beta, rm.value, rm.error_estimate, rm.converged);
    const auto rg = integrate_half_line(fg, spec);
    detail::require_converged("radial reference (Gamma)", 0.0, beta, rg.value, rg.error_estimate, rg.converged);
    RadialReference out;
    out.magnetic_electric_part = -(1.0 / (8.0 * pi)) * 4.0 * pi * rm.value;
    out.gamma_part = 4.0 * pi * rg.value;
    out.f2_total = out.magnetic_electric_part + out.gamma_part;
    out.error_estimate = 0.5 * rm.error_estimate + 4.0 * pi * rg.error_estimate;
    return out;
}

}  // namespace pvfree
