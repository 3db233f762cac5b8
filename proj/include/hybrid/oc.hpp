#pragma once
// Monte Carlo and analytic operating-characteristics engine over the
// summary-statistic model: type I error, power, bias, borrowing rate, and
// mean alpha0 across scenario grids, plus the calibration report.

#include <cstdint>
#include <string>
#include <vector>

#include "hybrid/design.hpp"
#include "hybrid/power_prior.hpp"
#include "hybrid/rng.hpp"
#include "hybrid/two_step.hpp"

namespace hybrid {

struct Scenario {
    double Delta = 0.0;  // true treatment effect (mean of Y1)
    double delta = 0.0;  // true control-vs-RWD shift (mean of Y2)
    DesignParams params;
};

struct OCResult {
    Method method;
    double reject_rate;
    double borrow_rate;
    double bias;          // mean(estimate) - Delta
    double mean_alpha0;   // power prior only; NaN otherwise
    double mc_se_reject;  // sqrt(p(1-p)/n_reps)
    double mc_se_bias;
    long n_reps;
    std::uint64_t seed;
    std::string error;  // non-empty: method-level failure, metrics are NaN
};

enum class StreamScheme { counter_per_replicate };

// Replicate r of scenario s draws from Substream(master_seed, s, r), so
// results are bit-identical for any worker count.
struct RngPolicy {
    std::uint64_t master_seed = 20190101;
    StreamScheme stream_scheme = StreamScheme::counter_per_replicate;
    int threads = 1;
    std::uint64_t scenario_index = 0;
};

// A method plus the knobs some methods need.
struct MethodSpec {
    Method method = Method::NoBorrow;
    SplitSpec split{};  // A3 only
    PriorSpec prior{};  // power prior only
};

// One draw of (Y1, Y2) from the bivariate model with the design (true) SEs.
SummaryStats sample_summary(const Scenario& scenario, Substream& rng);

// Dispatch one method's test on observed statistics.
TestOutcome apply_method(const MethodSpec& spec, const SummaryStats& stats,
                         const DesignParams& params);

// Apply every method to n_reps common draws and aggregate. An infeasible A3
// split yields an error entry for that method, not a run failure.
std::vector<OCResult> run_scenario(const Scenario& scenario,
                                   const std::vector<MethodSpec>& methods, long n_reps,
                                   const RngPolicy& policy);

struct SweepRow {
    double Delta;
    double delta;
    OCResult result;
};

// Cartesian product of Delta_values x delta_grid, each cell via run_scenario
// with scenario_index enumerated row-major over (Delta, delta).
std::vector<SweepRow> sweep(const Scenario& base, const std::vector<double>& delta_grid,
                            const std::vector<double>& Delta_values,
                            const std::vector<MethodSpec>& methods, long n_reps,
                            const RngPolicy& policy);

struct Table1Row {
    double delta_eq;
    double alpha_eq;
    double v;
    double yuan_type1;   // analytic null rejection of the unadjusted test
    double alpha1;       // 2(1 - Phi(z1*)), non-borrow branch level
    double alpha2;       // 2(1 - Phi(z2*)), borrow branch level
    double alpha_star;   // beta_eq * alpha1 + (1 - beta_eq) * alpha2
    double beta_eq;
    double borrow_prob;  // borrowing probability at delta = 0
    double power_a3;     // analytic A3 power at Delta = power_delta, delta = 0
};

// Calibration report rows, one per (design, v).
std::vector<Table1Row> table1_report(const std::vector<DesignParams>& designs,
                                     const std::vector<double>& split_values,
                                     double power_delta = 0.4);

}  // namespace hybrid
