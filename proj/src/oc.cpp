#include "hybrid/oc.hpp"

#include <cmath>
#include <stdexcept>

#include "hybrid/numerics.hpp"
#include "oc_detail.hpp"

namespace hybrid {

SummaryStats sample_summary(const Scenario& scenario, Substream& rng) {
    const DerivedDesign d = derive(scenario.params);
    const double a = rng.next_normal();
    const double b = rng.next_normal();
    SummaryStats s;
    s.y1 = scenario.Delta + d.se_y1 * a;
    s.y2 = scenario.delta + d.se_y2 * (d.rho * a + std::sqrt(1.0 - d.rho * d.rho) * b);
    s.se_y1 = d.se_y1;
    s.se_y2 = d.se_y2;
    s.rho = d.rho;
    return s;
}

namespace {

// Criticals precomputed once per scenario (the design SEs are fixed across
// replicates, so every data-time critical is replicate-invariant).
struct MethodPlan {
    MethodSpec spec;
    double crit_no_borrow = 0.0;
    double crit_borrow = 0.0;
    std::string error;
};

std::vector<MethodPlan> plan_methods(const DerivedDesign& d, double alpha,
                                     const std::vector<MethodSpec>& methods) {
    const double zc = normal_quantile(1.0 - alpha / 2.0);
    std::vector<MethodPlan> plans;
    plans.reserve(methods.size());
    for (const MethodSpec& spec : methods) {
        MethodPlan p;
        p.spec = spec;
        p.crit_no_borrow = zc;
        p.crit_borrow = zc;
        switch (spec.method) {
            case Method::A2:
                p.crit_no_borrow = p.crit_borrow = approach2_critical(d, alpha);
                break;
            case Method::A3:
                try {
                    const auto [z1, z2] = approach3_criticals(d, alpha, spec.split);
                    p.crit_no_borrow = z1;
                    p.crit_borrow = z2;
                } catch (const InfeasibleSplitError& e) {
                    p.error = e.what();
                }
                break;
            case Method::A4:
                p.crit_borrow = approach4_critical(d, alpha);
                break;
            default:
                break;
        }
        plans.push_back(std::move(p));
    }
    return plans;
}

void apply_methods(const SummaryStats& stats, const DerivedDesign& d,
                   const std::vector<MethodPlan>& plans, std::vector<detail::Accum>& acc) {
    const bool borrow = !d.no_borrow_possible && std::fabs(stats.y2) < d.theta;
    const double z1 = stats.y1 / d.se_y1;
    const double y3 = stats.y1 - d.w_star * stats.y2;
    const double z3 = y3 / d.se_y3;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const MethodPlan& p = plans[i];
        if (!p.error.empty()) continue;
        bool rej;
        bool bor = borrow;
        double est = borrow ? y3 : stats.y1;
        double alpha0 = 0.0;
        switch (p.spec.method) {
            case Method::NoBorrow:
                bor = false;
                est = stats.y1;
                rej = std::fabs(z1) > p.crit_no_borrow;
                break;
            case Method::A1: {
                const double sigma = std::sqrt(approach1_variance(d, stats.y2));
                rej = std::fabs(est / sigma) > p.crit_no_borrow;
                break;
            }
            case Method::PowerPrior: {
                const PowerPriorFit fit = fit_alpha0(stats, p.spec.prior);
                est = fit.estimate;
                rej = std::fabs(fit.estimate / fit.se) > p.crit_no_borrow;
                bor = fit.alpha0 > 0.01;
                alpha0 = fit.alpha0;
                break;
            }
            default:  // Yuan, A2, A3, A4 share the branch structure
                rej = borrow ? std::fabs(z3) > p.crit_borrow : std::fabs(z1) > p.crit_no_borrow;
                break;
        }
        acc[i].add(rej, bor, est, alpha0);
    }
}

}  // namespace

TestOutcome apply_method(const MethodSpec& spec, const SummaryStats& stats,
                         const DesignParams& params) {
    switch (spec.method) {
        case Method::NoBorrow:
            return test_no_borrow(stats, params.alpha);
        case Method::Yuan:
            return test_yuan(stats, params);
        case Method::A1:
            return approach1_test(stats, params);
        case Method::A2:
            return approach2_test(stats, params);
        case Method::A3:
            return approach3_test(stats, params, spec.split);
        case Method::A4:
            return approach4_test(stats, params);
        case Method::PowerPrior:
            return pp_test(stats, params, spec.prior);
    }
    throw std::logic_error("apply_method: unknown method");
}

std::vector<OCResult> run_scenario(const Scenario& scenario,
                                   const std::vector<MethodSpec>& methods, long n_reps,
                                   const RngPolicy& policy) {
    if (n_reps < 100)
        throw std::invalid_argument("run_scenario: n_reps must be at least 100");
    const DerivedDesign d = derive(scenario.params);
    const std::vector<MethodPlan> plans = plan_methods(d, scenario.params.alpha, methods);

    const auto totals = detail::run_chunked(
        n_reps, static_cast<int>(plans.size()), policy.threads,
        [&](long lo, long hi, std::vector<detail::Accum>& acc) {
            for (long rep = lo; rep < hi; ++rep) {
                Substream rng(policy.master_seed, policy.scenario_index,
                              static_cast<std::uint64_t>(rep));
                const SummaryStats stats = sample_summary(scenario, rng);
                apply_methods(stats, d, plans, acc);
            }
        });

    std::vector<OCResult> results;
    results.reserve(plans.size());
    for (std::size_t i = 0; i < plans.size(); ++i) {
        OCResult r = detail::make_result(plans[i].spec.method, totals[i], n_reps,
                                         scenario.Delta, policy.master_seed);
        if (!plans[i].error.empty()) {
            r.error = plans[i].error;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            r.reject_rate = r.borrow_rate = r.bias = r.mean_alpha0 = nan;
            r.mc_se_reject = r.mc_se_bias = nan;
            r.n_reps = 0;
        }
        results.push_back(std::move(r));
    }
    return results;
}

std::vector<SweepRow> sweep(const Scenario& base, const std::vector<double>& delta_grid,
                            const std::vector<double>& Delta_values,
                            const std::vector<MethodSpec>& methods, long n_reps,
                            const RngPolicy& policy) {
    if (delta_grid.empty() || Delta_values.empty())
        throw std::invalid_argument("sweep: grids must be non-empty");
    std::vector<SweepRow> rows;
    rows.reserve(delta_grid.size() * Delta_values.size() * methods.size());
    for (std::size_t i = 0; i < Delta_values.size(); ++i) {
        for (std::size_t j = 0; j < delta_grid.size(); ++j) {
            Scenario cell = base;
            cell.Delta = Delta_values[i];
            cell.delta = delta_grid[j];
            RngPolicy cell_policy = policy;
            cell_policy.scenario_index = i * delta_grid.size() + j;
            for (OCResult& r : run_scenario(cell, methods, n_reps, cell_policy))
                rows.push_back({cell.Delta, cell.delta, std::move(r)});
        }
    }
    return rows;
}

namespace {

// Analytic power of the split-calibrated test at (Delta, delta = 0): shifted
// joint tails on the non-borrow branch, independent shifted Z on the borrow
// branch.
double a3_power(const DerivedDesign& d, double z1, double z2, double Delta) {
    const double m1 = Delta / d.se_y1;
    if (d.no_borrow_possible)
        return norm_cdf(-z1 + m1) + norm_cdf(-z1 - m1);
    const double c2 = d.theta / d.se_y2;
    const double m3 = Delta / d.se_y3;
    const double non_borrow = joint_tail(z1 - m1, c2, d.rho) + joint_tail(z1 + m1, c2, -d.rho);
    const double borrow =
        (norm_cdf(-z2 + m3) + norm_cdf(-z2 - m3)) * (2.0 * norm_cdf(c2) - 1.0);
    return non_borrow + borrow;
}

}  // namespace

std::vector<Table1Row> table1_report(const std::vector<DesignParams>& designs,
                                     const std::vector<double>& split_values,
                                     double power_delta) {
    std::vector<Table1Row> rows;
    rows.reserve(designs.size() * split_values.size());
    for (const DesignParams& params : designs) {
        const DerivedDesign d = derive(params);
        const double yuan_t1 = yuan_type1_error(d, params.alpha);
        const double borrow_prob = borrowing_probability(d, 0.0);
        for (double v : split_values) {
            const auto [z1, z2] = approach3_criticals(d, params.alpha, SplitSpec{v});
            Table1Row row;
            row.delta_eq = params.delta_eq;
            row.alpha_eq = params.alpha_eq;
            row.v = v;
            row.yuan_type1 = yuan_t1;
            row.alpha1 = 2.0 * (1.0 - norm_cdf(z1));
            row.alpha2 = 2.0 * (1.0 - norm_cdf(z2));
            row.alpha_star = d.beta_eq * row.alpha1 + (1.0 - d.beta_eq) * row.alpha2;
            row.beta_eq = d.beta_eq;
            row.borrow_prob = borrow_prob;
            row.power_a3 = a3_power(d, z1, z2, power_delta);
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace hybrid
