#include "hybrid/power_prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hybrid/numerics.hpp"

namespace hybrid {

void PriorSpec::validate() const {
    if (!(var0 > 0.0))
        throw std::invalid_argument("PriorSpec: var0 must be positive");
    if (!std::isfinite(mu0))
        throw std::invalid_argument("PriorSpec: mu0 must be finite");
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Quadratic-form coefficients of a product of (possibly powered) Gaussian
// kernels: exp(-(A mu^2 - 2 B mu + C)/2) integrates to sqrt(2 pi / A)
// exp(-(C - B^2/A)/2).
struct Quad {
    double a = 0.0, b = 0.0, c = 0.0;
    void add(double mu, double var, double weight) {
        a += weight / var;
        b += weight * mu / var;
        c += weight * mu * mu / var;
    }
    double log_integral() const { return 0.5 * (std::log(kTwoPi / a) - (c - b * b / a)); }
};

double clamped_cov(const SummaryStats& stats) {
    return std::max(stats.rho * stats.se_y1 * stats.se_y2, 1e-12);
}

double pooled_se(const SummaryStats& stats, double alpha0) {
    if (alpha0 == 0.0) return stats.se_y1;
    const double cov = clamped_cov(stats);
    const double var_rwd = std::max(stats.se_y2 * stats.se_y2 - cov, 1e-12);
    const double control_var = 1.0 / (1.0 / cov + alpha0 / var_rwd);
    return std::sqrt(stats.se_y1 * stats.se_y1 - cov + control_var);
}

}  // namespace

double marginal_likelihood(double alpha0, const SummaryStats& stats, const PriorSpec& prior) {
    stats.validate();
    prior.validate();
    if (!(alpha0 >= 0.0 && alpha0 <= 1.0))
        throw std::domain_error("marginal_likelihood: alpha0 must lie in [0, 1]");

    const double var_contrast = stats.se_y2 * stats.se_y2;
    Quad num;
    num.add(0.0, var_contrast, 1.0);           // control-side location at the null point
    num.add(stats.y2, var_contrast, alpha0);   // discounted RWD-side location
    num.add(prior.mu0, prior.var0, 1.0);
    Quad den;
    den.add(stats.y2, var_contrast, alpha0);
    den.add(prior.mu0, prior.var0, 1.0);

    const double n_kernels_num = 2.0 + alpha0;  // powers of (2 pi)^{-1/2} in front
    const double n_kernels_den = 1.0 + alpha0;
    return std::exp(num.log_integral() - den.log_integral() -
                    0.5 * (n_kernels_num - n_kernels_den) * std::log(kTwoPi));
}

PowerPriorFit fit_alpha0(const SummaryStats& stats, const PriorSpec& prior) {
    stats.validate();
    prior.validate();

    PowerPriorFit fit;
    fit.marginal_curve.resize(101);
    double best_a = 0.0;
    double best_m = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double a = i / 100.0;
        const double m = marginal_likelihood(a, stats, prior);
        fit.marginal_curve[i] = m;
        if (m > best_m) {  // strict: ties resolve toward smaller alpha0
            best_m = m;
            best_a = a;
        }
    }

    // Golden-section refinement around the best grid point.
    double lo = std::max(0.0, best_a - 0.01);
    double hi = std::min(1.0, best_a + 0.01);
    const double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = marginal_likelihood(x1, stats, prior);
    double f2 = marginal_likelihood(x2, stats, prior);
    while (hi - lo > 1e-7) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = marginal_likelihood(x1, stats, prior);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = marginal_likelihood(x2, stats, prior);
        }
    }
    const double refined = 0.5 * (lo + hi);
    const double m_refined = marginal_likelihood(refined, stats, prior);
    if (m_refined > best_m) {
        best_m = m_refined;
        best_a = refined;
    }
    // Endpoints win ties so degenerate fits are exact.
    for (double endpoint : {1.0, 0.0}) {
        const double m = marginal_likelihood(endpoint, stats, prior);
        if (m >= best_m) {
            best_m = m;
            best_a = endpoint;
        }
    }

    fit.alpha0 = best_a;
    const double w_star = clamped_cov(stats) / (stats.se_y2 * stats.se_y2);
    fit.estimate = best_a == 0.0 ? stats.y1 : stats.y1 - best_a * w_star * stats.y2;
    fit.se = pooled_se(stats, best_a);
    return fit;
}

TestOutcome pp_test(const SummaryStats& stats, const DesignParams& params,
                    const PriorSpec& prior) {
    const PowerPriorFit fit = fit_alpha0(stats, prior);
    TestOutcome out;
    out.method = Method::PowerPrior;
    out.statistic = fit.estimate / fit.se;
    out.critical_value = normal_quantile(1.0 - params.alpha / 2.0);
    out.borrowed = fit.alpha0 > 0.01;
    out.estimate = fit.estimate;
    out.reject = std::fabs(out.statistic) > out.critical_value;
    out.extras["alpha0"] = fit.alpha0;
    out.extras["se"] = fit.se;
    return out;
}

}  // namespace hybrid
