#include "hybrid/numerics.hpp"

#include <algorithm>

namespace hybrid {

PdfCdf normal_basics(double x) {
    if (!std::isfinite(x)) throw std::domain_error("normal_basics: x must be finite");
    return {norm_pdf(x), norm_cdf(x)};
}

namespace {

// Rational initial guess (Acklam), then one Halley step against the cdf.
double quantile_guess(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::domain_error("normal_quantile: p must lie in (0, 1)");
    double x = quantile_guess(p);
    const double e = norm_cdf(x) - p;
    const double u = e / norm_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);  // Halley refinement
    return x;
}

double bvn_cdf(double h, double k, double rho) {
    if (!std::isfinite(h) || !std::isfinite(k))
        throw std::domain_error("bvn_cdf: h and k must be finite");
    if (!(std::fabs(rho) < 1.0))
        throw std::domain_error("bvn_cdf: |rho| must be < 1");
    if (rho == 0.0) return norm_cdf(h) * norm_cdf(k);
    // Substituting z = sin(t) in the single-integral form removes the
    // (1-z^2)^(-1/2) factor, so the integrand stays bounded as |rho| -> 1.
    const double upper = std::asin(rho);
    const auto f = [h, k](double t) {
        const double s = std::sin(t), c2 = std::cos(t) * std::cos(t);
        return std::exp(-(h * h - 2.0 * h * k * s + k * k) / (2.0 * c2));
    };
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    const double sign = upper >= 0.0 ? 1.0 : -1.0;
    const double integral = integrate_adaptive(f, std::min(0.0, upper), std::max(0.0, upper), spec);
    static const double inv_2pi = 0.15915494309189533577;
    return norm_cdf(h) * norm_cdf(k) + sign * inv_2pi * integral;
}

TruncatedMoments truncated_moments(double delta, double sigma, double theta) {
    if (!(sigma > 0.0)) throw std::domain_error("truncated_moments: sigma must be positive");
    if (!(theta > 0.0)) throw std::domain_error("truncated_moments: theta must be positive");
    // Clip the window to +-8.5 sd around delta; the remainder is < 1e-17.
    const double lo = std::max(-theta, delta - 8.5 * sigma);
    const double hi = std::min(theta, delta + 8.5 * sigma);
    if (!(lo < hi)) return {0.0, 0.0};
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    const double inv_sigma = 1.0 / sigma;
    const auto f1 = [=](double y) { return y * inv_sigma * norm_pdf((y - delta) * inv_sigma); };
    const auto f2 = [=](double y) { return y * y * inv_sigma * norm_pdf((y - delta) * inv_sigma); };
    return {integrate_adaptive(f1, lo, hi, spec), integrate_adaptive(f2, lo, hi, spec)};
}

}  // namespace hybrid
