#pragma once
// Bayesian power-prior comparator: choose the discounting exponent alpha0 by
// maximizing the marginal likelihood of the control-side data, then run a
// Z-test on the discounted pooled contrast.

#include <vector>

#include "hybrid/design.hpp"
#include "hybrid/two_step.hpp"

namespace hybrid {

struct PriorSpec {
    double mu0 = 0.0;    // prior mean
    double var0 = 1e6;   // prior variance; default is vague
    void validate() const;
};

struct PowerPriorFit {
    double alpha0;    // discounting exponent in [0, 1]
    double estimate;  // pooled contrast y1 - alpha0 * w* * y2
    double se;        // posterior SE of the pooled contrast
    std::vector<double> marginal_curve;  // m(alpha0) on the 101-point scan grid
};

// Marginal likelihood m(alpha0) of the control-side location given the
// discounted RWD likelihood and the prior, in closed form via Gaussian
// product identities. The control-side location is the null point 0 of the
// Y2 contrast and the RWD-side location is y2, both with SE se_y2.
double marginal_likelihood(double alpha0, const SummaryStats& stats, const PriorSpec& prior);

// Maximize m(alpha0) on [0,1] (101-point scan + golden-section refinement to
// 1e-6, ties toward smaller alpha0); se is the discounted-precision
// combination: var(Y1) - cov + 1/(1/cov + alpha0/(var(Y2) - cov)).
PowerPriorFit fit_alpha0(const SummaryStats& stats, const PriorSpec& prior);

// Z-test of the discounted pooled contrast; borrowed = (alpha0 > 0.01).
TestOutcome pp_test(const SummaryStats& stats, const DesignParams& params,
                    const PriorSpec& prior);

}  // namespace hybrid
