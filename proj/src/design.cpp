#include "hybrid/design.hpp"

#include <cmath>

#include "hybrid/numerics.hpp"

namespace hybrid {

void DesignParams::validate() const {
    if (n_t < 2 || n_c < 2 || n_r < 2)
        throw std::invalid_argument("DesignParams: all sample sizes must be >= 2");
    if (!(var_t > 0.0) || !(var_c > 0.0) || !(var_r > 0.0))
        throw std::invalid_argument("DesignParams: all variances must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("DesignParams: alpha must lie in (0, 1)");
    if (!(alpha_eq > 0.0) || !(alpha_eq < 0.5))
        throw std::invalid_argument("DesignParams: alpha_eq must lie in (0, 0.5)");
    if (!(delta_eq > 0.0))
        throw std::invalid_argument("DesignParams: delta_eq must be positive");
}

void SummaryStats::validate() const {
    if (!(se_y1 > 0.0) || !(se_y2 > 0.0))
        throw std::invalid_argument("SummaryStats: standard errors must be positive");
    if (!(std::fabs(rho) < 1.0))
        throw std::invalid_argument("SummaryStats: |rho| must be < 1");
    if (!std::isfinite(y1) || !std::isfinite(y2))
        throw std::invalid_argument("SummaryStats: y1 and y2 must be finite");
}

namespace {

DerivedDesign derive_impl(double var_y1, double var_y2, double cov,
                          double alpha, double alpha_eq, double delta_eq) {
    DerivedDesign d;
    d.se_y1 = std::sqrt(var_y1);
    d.se_y2 = std::sqrt(var_y2);
    d.w_star = cov / var_y2;
    d.rho = cov / (d.se_y1 * d.se_y2);
    d.se_y3 = d.se_y1 * std::sqrt(1.0 - d.rho * d.rho);
    d.theta = delta_eq - normal_quantile(1.0 - alpha_eq) * d.se_y2;
    d.no_borrow_possible = !(d.theta > 0.0);
    d.beta_eq = d.no_borrow_possible
                    ? 1.0
                    : 1.0 - (norm_cdf(d.theta / d.se_y2) - norm_cdf(-d.theta / d.se_y2));
    d.alpha = alpha;
    d.alpha_eq = alpha_eq;
    d.delta_eq = delta_eq;
    return d;
}

}  // namespace

DerivedDesign derive(const DesignParams& params) {
    params.validate();
    const double ct = params.var_t / params.n_t;
    const double cc = params.var_c / params.n_c;
    const double cr = params.var_r / params.n_r;
    return derive_impl(ct + cc, cr + cc, cc, params.alpha, params.alpha_eq, params.delta_eq);
}

DerivedDesign derived_from_stats(const SummaryStats& stats, const DesignParams& params) {
    stats.validate();
    const double cov = stats.rho * stats.se_y1 * stats.se_y2;
    return derive_impl(stats.se_y1 * stats.se_y1, stats.se_y2 * stats.se_y2, cov,
                       params.alpha, params.alpha_eq, params.delta_eq);
}

bool tost_borrow_decision(const SummaryStats& stats, const DesignParams& params) {
    stats.validate();
    const double theta_hat = params.delta_eq - normal_quantile(1.0 - params.alpha_eq) * stats.se_y2;
    return theta_hat > 0.0 && std::fabs(stats.y2) < theta_hat;
}

double borrowing_probability(const DerivedDesign& design, double delta) {
    if (design.no_borrow_possible) return 0.0;
    return norm_cdf((design.theta - delta) / design.se_y2) -
           norm_cdf((-design.theta - delta) / design.se_y2);
}

}  // namespace hybrid
