#pragma once
// Scalar/bivariate normal functions, truncated-normal moments, adaptive
// quadrature and bracketed root finding. Everything here is a pure function.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace hybrid {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    int max_subdivisions = 60;  // recursion depth per panel
};

// Thrown when the adaptive rule runs out of subdivisions; carries the best
// estimate so callers can decide whether to accept it.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, double best)
        : std::runtime_error(msg), best_estimate(best) {}
    double best_estimate;
};

struct PdfCdf {
    double pdf;
    double cdf;
};

inline double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double norm_cdf(double x) {
    static const double inv_sqrt2 = 0.7071067811865475244;
    return 0.5 * std::erfc(-x * inv_sqrt2);
}

PdfCdf normal_basics(double x);
double normal_quantile(double p);

// P(Z1 <= h, Z2 <= k) for standard bivariate normal, |rho| < 1, via the
// single-integral reduction (see two_step.cpp for where the same integrand
// family drives the analytic type-I-error results).
double bvn_cdf(double h, double k, double rho);

struct TruncatedMoments {
    double m1;  // E[Y 1{|Y| < theta}],   Y ~ N(delta, sigma^2)
    double m2;  // E[Y^2 1{|Y| < theta}]
};
TruncatedMoments truncated_moments(double delta, double sigma, double theta);

namespace detail {

template <typename F>
double simpson(const F& f, double a, double m, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_step(const F& f, double a, double m, double b, double fa, double fm,
                     double fb, double whole, double tol, int depth, bool& converged) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, lm, m, fa, flm, fm);
    const double right = simpson(f, m, rm, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    if (depth <= 0) {
        converged = false;
        return left + right + delta / 15.0;
    }
    return adaptive_step(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1, converged) +
           adaptive_step(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1, converged);
}

}  // namespace detail

// Adaptive Simpson on [lo, hi]. Throws ConvergenceError (carrying the best
// estimate) if the subdivision budget is exhausted.
template <typename F>
double integrate_adaptive(const F& f, double lo, double hi, QuadratureSpec spec = {}) {
    if (!(lo <= hi)) throw std::invalid_argument("integrate_adaptive: lo > hi");
    if (lo == hi) return 0.0;
    const double m = 0.5 * (lo + hi);
    const double fa = f(lo), fm = f(m), fb = f(hi);
    const double whole = detail::simpson(f, lo, m, hi, fa, fm, fb);
    bool converged = true;
    const double result = detail::adaptive_step(f, lo, m, hi, fa, fm, fb, whole,
                                                spec.abs_tol, spec.max_subdivisions, converged);
    if (!converged)
        throw ConvergenceError("integrate_adaptive: subdivision budget exhausted", result);
    return result;
}

// Bracketed hybrid root finder (bisection-safe secant); the bracket must
// change sign. Converges to bracket width <= tol on the argument.
template <typename F>
double find_root(const F& f, double lo, double hi, double tol = 1e-10) {
    if (!(tol > 0.0)) throw std::invalid_argument("find_root: tol must be positive");
    double fa = f(lo), fb = f(hi);
    if (fa == 0.0) return lo;
    if (fb == 0.0) return hi;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("find_root: no sign change on bracket");
    double a = lo, b = hi;
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        // secant proposal, clipped into the middle of the bracket; every third
        // step bisects outright so the bracket provably collapses
        double x = b - fb * (b - a) / (fb - fa);
        const double lo_clip = a + 0.05 * (b - a), hi_clip = b - 0.05 * (b - a);
        if (it % 3 == 2 || !(x > lo_clip) || !(x < hi_clip)) x = 0.5 * (a + b);
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (fa > 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace hybrid
