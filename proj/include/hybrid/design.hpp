#pragma once
// Design parameters and everything derivable from them alone: pooling weight,
// correlation, pooled variance, equivalence threshold, borrowing probability.

#include <stdexcept>

namespace hybrid {

struct DesignParams {
    int n_t = 100, n_c = 100, n_r = 200;            // sample sizes
    double var_t = 1.0, var_c = 1.0, var_r = 1.0;   // outcome variances
    double alpha = 0.05;      // two-sided level of the primary test
    double alpha_eq = 0.05;   // one-sided level of the equivalence test
    double delta_eq = 0.25;   // equivalence margin (> 0)

    void validate() const;
};

struct DerivedDesign {
    double se_y1;    // sd of Y1 = Xbar_t - Xbar_c
    double se_y2;    // sd of Y2 = Xbar_r - Xbar_c
    double w_star;   // variance-optimal pooling weight
    double rho;      // corr(Y1, Y2)
    double se_y3;    // sd of Y3 = Y1 - w* Y2  (= se_y1 sqrt(1 - rho^2))
    double theta;    // TOST half-width; may be <= 0 (borrowing impossible)
    double beta_eq;  // type II error of the equivalence test at delta = 0
    bool no_borrow_possible;  // true iff theta <= 0
    double alpha;    // carried over from the inputs for downstream tests
    double alpha_eq;
    double delta_eq;
};

// Observed per-dataset sufficient statistics.
struct SummaryStats {
    double y1;
    double y2;
    double se_y1;
    double se_y2;
    double rho;

    void validate() const;
};

DerivedDesign derive(const DesignParams& params);

// Derived quantities recomputed from *observed* SEs; used by the tests, which
// plug data-time estimates into the design-time formulas.
DerivedDesign derived_from_stats(const SummaryStats& stats, const DesignParams& params);

// TOST decision on observed data: borrow iff |y2| < theta-hat and theta-hat > 0,
// where theta-hat = delta_eq - z_{1-alpha_eq} * se_y2.
bool tost_borrow_decision(const SummaryStats& stats, const DesignParams& params);

// P(|Y2| < theta) when Y2 ~ N(delta, se_y2^2); at delta = 0 equals 1 - beta_eq.
double borrowing_probability(const DerivedDesign& design, double delta);

}  // namespace hybrid
