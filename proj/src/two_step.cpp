#include "hybrid/two_step.hpp"

#include <algorithm>
#include <cmath>

#include "hybrid/numerics.hpp"

namespace hybrid {

std::string method_name(Method m) {
    switch (m) {
        case Method::NoBorrow: return "NoBorrow";
        case Method::Yuan: return "Yuan";
        case Method::A1: return "A1";
        case Method::A2: return "A2";
        case Method::A3: return "A3";
        case Method::A4: return "A4";
        case Method::PowerPrior: return "PowerPrior";
    }
    throw std::logic_error("method_name: unknown method");
}

void SplitSpec::validate() const {
    if (!(v > 0.0) || !(v < 1.0))
        throw std::invalid_argument("SplitSpec: v must lie in (0, 1)");
}

namespace {

TestOutcome make_outcome(Method method, double statistic, double critical, bool borrowed,
                         double estimate) {
    TestOutcome out;
    out.method = method;
    out.statistic = statistic;
    out.critical_value = critical;
    out.borrowed = borrowed;
    out.estimate = estimate;
    out.reject = std::fabs(statistic) > critical;
    return out;
}

// Per-side excess null rejection of the unadjusted test over alpha/2:
// (1/pi) * integral_0^{asin rho} sinh(c1 c2 sin t / cos^2 t)
//                                * exp(-(c1^2 + c2^2)/(2 cos^2 t)) dt,
// written as a difference of exponentials so it never overflows.
double inflation_per_side(double rho, double c1, double c2) {
    if (rho == 0.0 || c2 <= 0.0) return 0.0;
    auto f = [c1, c2](double t) {
        const double s = std::sin(t);
        const double cc = std::cos(t) * std::cos(t);
        const double e_minus = -(c1 * c1 - 2.0 * c1 * c2 * s + c2 * c2) / (2.0 * cc);
        const double e_plus = -(c1 * c1 + 2.0 * c1 * c2 * s + c2 * c2) / (2.0 * cc);
        return 0.5 * (std::exp(e_minus) - std::exp(e_plus));
    };
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    return integrate_adaptive(f, 0.0, std::asin(rho), spec) / std::acos(-1.0);
}

}  // namespace

double joint_tail(double z, double c2, double rho) {
    const double p_inside = 2.0 * norm_cdf(c2) - 1.0;
    const double rect = bvn_cdf(z, c2, rho) - bvn_cdf(z, -c2, rho);
    return 1.0 - norm_cdf(z) - p_inside + rect;
}

TestOutcome test_no_borrow(const SummaryStats& stats, double alpha) {
    stats.validate();
    const double zc = normal_quantile(1.0 - alpha / 2.0);
    return make_outcome(Method::NoBorrow, stats.y1 / stats.se_y1, zc, false, stats.y1);
}

TestOutcome test_yuan(const SummaryStats& stats, const DesignParams& params) {
    if (!tost_borrow_decision(stats, params)) {
        TestOutcome out = test_no_borrow(stats, params.alpha);
        out.method = Method::Yuan;
        return out;
    }
    const DerivedDesign d = derived_from_stats(stats, params);
    const double y3 = stats.y1 - d.w_star * stats.y2;
    const double zc = normal_quantile(1.0 - params.alpha / 2.0);
    return make_outcome(Method::Yuan, y3 / d.se_y3, zc, true, y3);
}

double yuan_type1_error(const DerivedDesign& design, double alpha) {
    if (design.no_borrow_possible) return alpha;
    const double c1 = normal_quantile(1.0 - alpha / 2.0);
    const double c2 = design.theta / design.se_y2;
    return alpha + 2.0 * inflation_per_side(design.rho, c1, c2);
}

double approach1_variance(const DerivedDesign& design, double delta) {
    const double var_y1 = design.se_y1 * design.se_y1;
    if (design.no_borrow_possible) return var_y1;
    const auto [m1, m2] = truncated_moments(delta, design.se_y2, design.theta);
    const double w2 = design.w_star * design.w_star;
    const double v = var_y1 - w2 * (m2 + m1 * m1) + 2.0 * w2 * delta * m1;
    if (!(v > 0.0))
        throw std::runtime_error("approach1_variance: non-positive variance (internal inconsistency)");
    return v;
}

TestOutcome approach1_test(const SummaryStats& stats, const DesignParams& params) {
    const DerivedDesign d = derived_from_stats(stats, params);
    const bool borrow = tost_borrow_decision(stats, params);
    const double y = borrow ? stats.y1 - d.w_star * stats.y2 : stats.y1;
    const double sigma_hat = std::sqrt(approach1_variance(d, stats.y2));
    const double zc = normal_quantile(1.0 - params.alpha / 2.0);
    TestOutcome out = make_outcome(Method::A1, y / sigma_hat, zc, borrow, y);
    const Theorem2Bounds bounds = theorem2_bounds(d, params.alpha);
    out.extras["bias_bound"] = bounds.bias_bound;
    out.extras["type1_bound"] = bounds.type1_bound;
    out.extras["type1_bound_loose"] = bounds.type1_bound_loose;
    out.extras["sigma_hat_y"] = sigma_hat;
    return out;
}

double approach2_critical(const DerivedDesign& design, double alpha) {
    const double zc = normal_quantile(1.0 - alpha / 2.0);
    if (design.no_borrow_possible) return zc;
    const double c2 = design.theta / design.se_y2;
    const double rho = design.rho;
    const double p_inside = 2.0 * norm_cdf(c2) - 1.0;
    auto total_tail = [c2, rho, p_inside](double z) {
        return joint_tail(z, c2, rho) + (1.0 - norm_cdf(z)) * p_inside;
    };
    auto f = [&](double z) { return total_tail(z) - alpha / 2.0; };
    return find_root(f, 1e-3, zc + 8.0, 1e-8);
}

TestOutcome approach2_test(const SummaryStats& stats, const DesignParams& params) {
    const DerivedDesign d = derived_from_stats(stats, params);
    const double z_star = approach2_critical(d, params.alpha);
    const bool borrow = tost_borrow_decision(stats, params);
    TestOutcome out =
        borrow ? make_outcome(Method::A2, (stats.y1 - d.w_star * stats.y2) / d.se_y3, z_star,
                              true, stats.y1 - d.w_star * stats.y2)
               : make_outcome(Method::A2, stats.y1 / stats.se_y1, z_star, false, stats.y1);
    out.extras["z_star"] = z_star;
    return out;
}

std::pair<double, double> approach3_criticals(const DerivedDesign& design, double alpha,
                                              const SplitSpec& split) {
    split.validate();
    const double zc = normal_quantile(1.0 - alpha / 2.0);
    if (design.no_borrow_possible) return {zc, zc};

    const double level1 = split.v * alpha / (2.0 * design.beta_eq);
    const double level2 = (1.0 - split.v) * alpha / (2.0 * (1.0 - design.beta_eq));
    if (level1 >= 1.0)
        throw InfeasibleSplitError("approach3_criticals: non-borrow branch conditional tail level >= 1");
    if (level2 >= 1.0)
        throw InfeasibleSplitError("approach3_criticals: borrow branch conditional tail level >= 1");

    const double c2 = design.theta / design.se_y2;
    const double rho = design.rho;
    const double target = split.v * alpha / 2.0;
    auto f = [c2, rho, target](double z) { return joint_tail(z, c2, rho) - target; };
    const double z1 = find_root(f, -8.0, 9.0, 1e-8);
    const double z2 = normal_quantile(1.0 - level2);
    return {z1, z2};
}

TestOutcome approach3_test(const SummaryStats& stats, const DesignParams& params,
                           const SplitSpec& split) {
    const DerivedDesign d = derived_from_stats(stats, params);
    const auto [z1, z2] = approach3_criticals(d, params.alpha, split);
    const bool borrow = tost_borrow_decision(stats, params);
    TestOutcome out =
        borrow ? make_outcome(Method::A3, (stats.y1 - d.w_star * stats.y2) / d.se_y3, z2, true,
                              stats.y1 - d.w_star * stats.y2)
               : make_outcome(Method::A3, stats.y1 / stats.se_y1, z1, false, stats.y1);
    out.extras["z1_star"] = z1;
    out.extras["z2_star"] = z2;
    return out;
}

double approach4_critical(const DerivedDesign& design, double alpha) {
    const double zc = normal_quantile(1.0 - alpha / 2.0);
    if (design.no_borrow_possible) return zc;
    const double c1 = zc;
    const double c2 = design.theta / design.se_y2;
    const double inflation = inflation_per_side(design.rho, c1, c2);
    if (inflation <= 0.0) return zc;
    const double p_inside = 2.0 * norm_cdf(c2) - 1.0;
    if (norm_cdf(zc) + inflation / p_inside >= 1.0)
        throw std::runtime_error("approach4_critical: inflation exceeds borrow-branch tail mass");
    auto f = [zc, p_inside, inflation](double z) {
        return (norm_cdf(z) - norm_cdf(zc)) * p_inside - inflation;
    };
    return find_root(f, zc, 40.0, 1e-8);
}

TestOutcome approach4_test(const SummaryStats& stats, const DesignParams& params) {
    if (!tost_borrow_decision(stats, params)) {
        TestOutcome out = test_no_borrow(stats, params.alpha);
        out.method = Method::A4;
        return out;
    }
    const DerivedDesign d = derived_from_stats(stats, params);
    const double z_star = approach4_critical(d, params.alpha);
    const double y3 = stats.y1 - d.w_star * stats.y2;
    TestOutcome out = make_outcome(Method::A4, y3 / d.se_y3, z_star, true, y3);
    out.extras["z_star"] = z_star;
    return out;
}

Theorem2Bounds theorem2_bounds(const DerivedDesign& design, double alpha) {
    Theorem2Bounds b;
    b.bias_bound = design.w_star * std::max(design.theta, 0.0) * design.alpha_eq;
    const double sigma_y = std::sqrt(approach1_variance(design, design.delta_eq));
    const double z_half = normal_quantile(alpha / 2.0);
    b.type1_bound = norm_cdf(z_half - b.bias_bound / sigma_y) +
                    norm_cdf(z_half + b.bias_bound / sigma_y);
    b.type1_bound_loose = alpha / 2.0 + norm_cdf(z_half + b.bias_bound / sigma_y);
    return b;
}

}  // namespace hybrid
