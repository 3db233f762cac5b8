#pragma once
// The five frequentist decision procedures -- the unadjusted two-step test
// (yuan) and calibrated approaches 1-4 -- plus the analytic type-I-error,
// bias-bound, and inflation calculators behind them.

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "hybrid/design.hpp"

namespace hybrid {

enum class Method { NoBorrow, Yuan, A1, A2, A3, A4, PowerPrior };

std::string method_name(Method m);

struct TestOutcome {
    Method method;
    bool reject;             // |statistic| > critical_value
    double statistic;        // standardized test statistic
    double critical_value;   // threshold applied
    bool borrowed;           // TOST gate outcome
    double estimate;         // point estimate of Delta used by the method
    std::map<std::string, double> extras;  // method-specific diagnostics
};

// Fraction of the type I error allotted to the non-borrowing branch.
struct SplitSpec {
    double v = 0.5;
    void validate() const;
};

// Thrown when a split requests a conditional tail level >= 1 on either branch.
class InfeasibleSplitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// P(Z1 > z, |Z2| >= c2) for a standard bivariate normal pair with
// correlation rho; the building block of the calibrated criticals.
double joint_tail(double z, double c2, double rho);

// Plain Z-test on y1; ignores the external data entirely.
TestOutcome test_no_borrow(const SummaryStats& stats, double alpha);

// Unadjusted two-step test: pool via y3 = y1 - w*y2 when the TOST gate passes,
// otherwise fall back to the plain Z-test; z_{1-alpha/2} on both branches.
TestOutcome test_yuan(const SummaryStats& stats, const DesignParams& params);

// Exact null rejection rate of the unadjusted test (> alpha whenever
// theta > 0 and rho > 0); returns exactly alpha when theta <= 0.
double yuan_type1_error(const DerivedDesign& design, double alpha);

// Variance of Y = Y1 - w*Y2*1{|Y2| < theta} when Y2 ~ N(delta, se_y2^2):
// se_y1^2 - w*^2(m2 + m1^2) + 2 w*^2 delta m1 with (m1, m2) the truncated
// moments of Y2 on (-theta, theta).
double approach1_variance(const DerivedDesign& design, double delta);

// Approach 1: same decision rule on both branches, |Y| > z_{1-alpha/2} *
// sigma-hat_Y, with sigma-hat_Y^2 = approach1_variance at the plug-in
// delta-hat = y2. Extras carry the bias bound w*theta-hat*alpha_eq and the
// type-I bounds evaluated at the observed design.
TestOutcome approach1_test(const SummaryStats& stats, const DesignParams& params);

// Approach 2: single calibrated critical z* applied on both branches, solving
// P(Z1 > z, |Z2| >= c2) + P(Z3 > z) P(|Z2| < c2) = alpha/2 at the null.
double approach2_critical(const DerivedDesign& design, double alpha);
TestOutcome approach2_test(const SummaryStats& stats, const DesignParams& params);

// Approach 3: split the type I error across branches -- z1* calibrates the
// non-borrow branch to joint tail v*alpha/2, z2* is the closed-form borrow-
// branch critical z_{1-(1-v)alpha/(2(1-beta_eq))}.
std::pair<double, double> approach3_criticals(const DerivedDesign& design, double alpha,
                                              const SplitSpec& split);
TestOutcome approach3_test(const SummaryStats& stats, const DesignParams& params,
                           const SplitSpec& split);

// Approach 4: keep z_{1-alpha/2} on the non-borrow branch and raise the
// borrow-branch critical to z* cancelling the per-side inflation:
// (Phi(z*) - Phi(z_{1-alpha/2})) P(|Z2| < c2) = per-side inflation.
double approach4_critical(const DerivedDesign& design, double alpha);
TestOutcome approach4_test(const SummaryStats& stats, const DesignParams& params);

struct Theorem2Bounds {
    double bias_bound;         // w* theta alpha_eq (0 when theta <= 0)
    double type1_bound;        // Phi(z_{a/2} - b/sigma_Y) + Phi(z_{a/2} + b/sigma_Y)
    double type1_bound_loose;  // alpha/2 + Phi(z_{a/2} + b/sigma_Y)
};

// Bias and type-I bounds for approach 1, with sigma_Y evaluated at the
// boundary delta = delta_eq where the bias bound binds.
Theorem2Bounds theorem2_bounds(const DerivedDesign& design, double alpha);

}  // namespace hybrid
