#pragma once
// Individual-level survival simulation: synthetic registry generation,
// propensity-based enrollment and matching, survival-time generation,
// event-driven censoring, Cox partial-likelihood fitting, and extraction of
// SummaryStats feeding the test modules.

#include <cstdint>
#include <string>
#include <vector>

#include "hybrid/design.hpp"
#include "hybrid/oc.hpp"
#include "hybrid/rng.hpp"

namespace hybrid {

enum class Group { treatment, control, rwd };

std::string group_name(Group g);

struct Subject {
    long id = 0;
    std::vector<double> covariates;
    Group group = Group::control;
    double time = 0.0;  // unset (0) until simulate_outcomes
    bool event = false;
};

struct CovariateSpec {
    enum class Kind { bernoulli, normal };
    Kind kind = Kind::normal;
    double p = 0.5;     // bernoulli success probability
    double mean = 0.0;  // normal location
    double sd = 1.0;    // normal scale

    static CovariateSpec bernoulli(double p);
    static CovariateSpec normal(double mean, double sd);
    double draw(Substream& rng) const;
};

struct BaselineSpec {
    enum class Family { exponential, weibull };
    Family family = Family::exponential;
    double lambda = 0.028881132523331052;  // log(2)/24: median 24 months
    double shape = 1.0;                    // weibull shape
};

struct SurvivalScenario {
    double theta_T = 1.0;  // hazard ratio treatment vs control
    double theta_R = 1.0;  // hazard ratio RWD vs control
    BaselineSpec baseline{};
    std::vector<double> cox_coeffs{0.5, 0.3, -0.2};  // applied to covariates
    std::vector<CovariateSpec> covariate_model{
        CovariateSpec::bernoulli(0.4), CovariateSpec::normal(0.0, 1.0),
        CovariateSpec::normal(0.0, 1.0)};
    int n_registry = 2000;
    int n_trial = 200;  // randomized 1:1
    int n_external = 200;
    int target_events = 196;          // Schoenfeld count for 80% power at HR 0.67
    double registry_followup = 120.0;  // months
    double enroll_intercept = -1.7346010553881064;  // logit(0.15)
    std::vector<double> enroll_coeffs{0.3, -0.2, 0.1};

    void validate() const;
};

struct CoxFit {
    std::vector<double> coef;  // treatment indicator, RWD indicator, adjusters
    std::vector<std::vector<double>> covariance;
    int iterations = 0;
    bool converged = false;
};

// Registry subjects with covariates drawn from the covariate model; no
// outcomes yet.
std::vector<Subject> generate_registry(int n, const SurvivalScenario& scenario, Substream& rng);

struct EnrollResult {
    std::vector<Subject> treatment;
    std::vector<Subject> control;
    std::vector<Subject> externals;
    bool propensity_fallback = false;  // logistic fit failed; Euclidean matching used
};

// Logistic enrollment, 1:1 randomization, propensity fit (trial vs pool) and
// greedy nearest-neighbor matching without replacement.
EnrollResult enroll_and_match(const std::vector<Subject>& registry,
                              const SurvivalScenario& scenario, Substream& rng);

// Inverse-transform survival times under the group hazard ratios; marks every
// subject as an event (censoring is applied separately).
void simulate_outcomes(std::vector<Subject>& subjects, const SurvivalScenario& scenario,
                       Substream& rng);

struct CensorResult {
    std::vector<Subject> subjects;
    double cutoff = 0.0;         // calendar time of the target_events-th trial event
    bool under_powered = false;  // fewer trial events than requested
};

// Event-driven administrative censoring: trial subjects censored at the
// cutoff, RWD subjects at min(cutoff, registry_followup); ties broken by id.
CensorResult administrative_censor(std::vector<Subject> subjects, int target_events,
                                   double registry_followup);

// Cox partial likelihood with Breslow ties via Newton-Raphson; covariance is
// the inverse observed information.
CoxFit cox_fit(const std::vector<Subject>& subjects, bool adjust_covariates);

// y1 = treatment coefficient, y2 = RWD coefficient, SEs and correlation from
// the coefficient covariance.
SummaryStats to_summary(const CoxFit& fit);

struct SurvivalSweepRow {
    double log_theta_T;
    double log_theta_R;
    OCResult result;
};

// Full pipeline per replicate over the (log theta_T, log theta_R) grid; every
// method applied to the per-replicate SummaryStats. A cell fails only if more
// than 1% of its replicates fail.
std::vector<SurvivalSweepRow> survival_oc(const SurvivalScenario& base,
                                          const DesignParams& analysis,
                                          const std::vector<double>& log_theta_T_values,
                                          const std::vector<double>& log_theta_R_values,
                                          const std::vector<MethodSpec>& methods, long n_reps,
                                          const RngPolicy& policy);

// Subject-level CSV (columns: id, group, time, event, cov_1..cov_k).
std::vector<Subject> read_subjects_csv(const std::string& path);
void write_subjects_csv(const std::string& path, const std::vector<Subject>& subjects);

}  // namespace hybrid
