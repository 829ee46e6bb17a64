#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "pvfree/errors.hpp"

namespace pvfree {

enum class HalfLineTransform { exp_decay, double_exponential };

struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    int max_subdivisions = 2000;
    HalfLineTransform half_line_transform = HalfLineTransform::double_exponential;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw domain_error("quadrature tolerances must be positive");
        if (max_subdivisions < 1)
            throw domain_error("max_subdivisions must be at least 1");
    }
};

template <class V>
struct BasicQuadratureResult {
    V value{};
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

using QuadratureResult = BasicQuadratureResult<double>;

namespace detail {

// Value-type arithmetic for scalar and fixed-size vector integrands.
inline double vnorm(double v) { return std::abs(v); }
inline bool vfinite(double v) { return std::isfinite(v); }
inline double vzero(double) { return 0.0; }

template <std::size_t N>
double vnorm(const std::array<double, N>& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}
template <std::size_t N>
bool vfinite(const std::array<double, N>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}
template <std::size_t N>
std::array<double, N> vzero(const std::array<double, N>&) {
    return {};
}

inline void vaxpy(double& y, double a, double x) { y += a * x; }
template <std::size_t N>
void vaxpy(std::array<double, N>& y, double a, const std::array<double, N>& x) {
    for (std::size_t i = 0; i < N; ++i) y[i] += a * x[i];
}

inline void vscale(double& y, double a) { y *= a; }
template <std::size_t N>
void vscale(std::array<double, N>& y, double a) {
    for (double& x : y) x *= a;
}

inline double vabs(double v) { return std::abs(v); }
template <std::size_t N>
std::array<double, N> vabs(std::array<double, N> v) {
    for (double& x : v) x = std::abs(x);
    return v;
}

// Componentwise QUADPACK error heuristic, reduced with the max norm.
inline double gk_error(double diff, double resabs, double resasc) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double err = std::abs(diff);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return err;
}
template <std::size_t N>
double gk_error(const std::array<double, N>& diff, const std::array<double, N>& resabs,
                const std::array<double, N>& resasc) {
    double e = 0.0;
    for (std::size_t i = 0; i < N; ++i) e = std::max(e, gk_error(diff[i], resabs[i], resasc[i]));
    return e;
}

inline constexpr std::array<double, 8> gk15_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> gk15_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk15_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
    double a;
    double b;
    V value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class V, class F>
V checked_call(F& f, double x) {
    V y = f(x);
    if (!vfinite(y)) {
        std::ostringstream os;
        os.precision(17);
        os << "integrand returned a non-finite value at x = " << x;
        throw evaluation_error(os.str(), x);
    }
    return y;
}

template <class V, class F>
Panel<V> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::array<V, 15> fv;
    fv[7] = checked_call<V>(f, c);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk15_x[i];
        fv[i] = checked_call<V>(f, c - dx);
        fv[14 - i] = checked_call<V>(f, c + dx);
    }
    V zero = vzero(fv[7]);
    V rk = zero, rg = zero, rabs = zero;
    vaxpy(rk, gk15_wk[7], fv[7]);
    vaxpy(rg, gk15_wg[3], fv[7]);
    vaxpy(rabs, gk15_wk[7], vabs(fv[7]));
    for (int i = 0; i < 7; ++i) {
        vaxpy(rk, gk15_wk[i], fv[i]);
        vaxpy(rk, gk15_wk[i], fv[14 - i]);
        vaxpy(rabs, gk15_wk[i], vabs(fv[i]));
        vaxpy(rabs, gk15_wk[i], vabs(fv[14 - i]));
        if (i % 2 == 1) {
            vaxpy(rg, gk15_wg[i / 2], fv[i]);
            vaxpy(rg, gk15_wg[i / 2], fv[14 - i]);
        }
    }
    V mean = rk;
    vscale(mean, 0.5);
    V rasc = zero;
    for (int i = 0; i < 15; ++i) {
        V d = fv[i];
        vaxpy(d, -1.0, mean);
        vaxpy(rasc, i == 7 ? gk15_wk[7] : gk15_wk[i < 7 ? i : 14 - i], vabs(d));
    }
    V diff = rk;
    vaxpy(diff, -1.0, rg);
    vscale(rk, h);
    vscale(diff, h);
    vscale(rabs, std::abs(h));
    vscale(rasc, std::abs(h));
    return {a, b, rk, gk_error(diff, rabs, rasc)};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integration over [a, b] with global error control.
/// Works for double and std::array<double, N> integrands (max-norm error).
template <class F>
auto integrate_interval(F&& f, double a, double b, const QuadratureSpec& spec) {
    using V = std::decay_t<decltype(f(a))>;
    spec.validate();
    if (!(a < b)) throw domain_error("integrate_interval requires a < b");

    using detail::Panel;
    std::priority_queue<Panel<V>> heap;
    Panel<V> first = detail::gk15<V>(f, a, b);
    BasicQuadratureResult<V> res;
    res.evaluations = 15;
    V total = first.value;
    double total_err = first.error;
    heap.push(first);
    int panels = 1;

    auto tolerance = [&](const V& v) { return std::max(spec.abs_tol, spec.rel_tol * detail::vnorm(v)); };

    while (total_err > tolerance(total)) {
        if (panels >= spec.max_subdivisions) break;
        Panel<V> worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;
        heap.pop();
        Panel<V> left = detail::gk15<V>(f, worst.a, mid);
        Panel<V> right = detail::gk15<V>(f, mid, worst.b);
        res.evaluations += 30;
        detail::vaxpy(total, -1.0, worst.value);
        detail::vaxpy(total, 1.0, left.value);
        detail::vaxpy(total, 1.0, right.value);
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }

    // Re-sum in left-to-right order so the result does not depend on update history.
    std::vector<Panel<V>> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel<V>& x, const Panel<V>& y) { return x.a < y.a; });
    res.value = detail::vzero(total);
    res.error_estimate = 0.0;
    for (const auto& p : all) {
        detail::vaxpy(res.value, 1.0, p.value);
        res.error_estimate += p.error;
    }
    res.converged = res.error_estimate <= tolerance(res.value);
    return res;
}

namespace detail {

// Upper end of the double-exponential parameter range: first point past the
// integrand's maximum where the transformed integrand is negligible.
template <class G>
double de_upper_limit(G& g, std::size_t& evaluations) {
    double peak = 0.0;
    int quiet = 0;
    for (double tau = -1.0; tau < 40.0; tau += 0.5) {
        const double v = vnorm(g(tau));
        ++evaluations;
        peak = std::max(peak, v);
        if (v <= 1e-20 * peak || (peak == 0.0 && tau > 3.0)) {
            if (++quiet == 2) return tau;
        } else {
            quiet = 0;
        }
    }
    return 40.0;
}

}  // namespace detail

/// Integral of f over [0, inf) after the variable transform selected by spec.
template <class F>
auto integrate_half_line(F&& f, const QuadratureSpec& spec) {
    using V = std::decay_t<decltype(f(1.0))>;
    spec.validate();
    if (spec.half_line_transform == HalfLineTransform::exp_decay) {
        // x = -log(1 - v) maps unit-rate exponential decay to a constant.
        auto g = [&](double v) -> V {
            const double w = 1.0 - v;
            V y = f(-std::log(w));
            detail::vscale(y, 1.0 / w);
            return y;
        };
        return integrate_interval(g, 0.0, 1.0, spec);
    }
    // x = exp(tau - exp(-tau)): double-exponential decay at the origin,
    // single-exponential growth of x toward infinity.
    auto g = [&](double tau) -> V {
        const double e = std::exp(-tau);
        const double x = std::exp(tau - e);
        if (x == 0.0 || !std::isfinite(x)) return detail::vzero(f(1.0));
        V y = f(x);
        detail::vscale(y, x * (1.0 + e));
        return y;
    };
    std::size_t scan = 0;
    const double upper = detail::de_upper_limit(g, scan);
    auto res = integrate_interval(g, -5.0, upper, spec);
    res.evaluations += scan;
    return res;
}

/// (1/beta) * integral of g over (0, beta]; Gauss-Kronrod nodes never touch b = 0.
template <class G>
auto beta_average(G&& g, double beta, const QuadratureSpec& spec) {
    if (!(beta > 0.0)) throw domain_error("beta_average requires beta > 0");
    auto res = integrate_interval(g, 0.0, beta, spec);
    detail::vscale(res.value, 1.0 / beta);
    res.error_estimate /= beta;
    return res;
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

/// Fixed n-point Gauss-Legendre average (1/beta) * integral of g over (0, beta].
template <class G>
double gauss_beta_average(G&& g, double beta, int points) {
    std::vector<double> x, w;
    gauss_legendre(points, x, w);
    double acc = 0.0;
    for (int i = 0; i < points; ++i) acc += w[i] * g(0.5 * beta * (x[i] + 1.0));
    return 0.5 * acc;
}

}  // namespace pvfree
