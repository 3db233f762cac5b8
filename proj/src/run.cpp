#include "hybrid/run.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "hybrid/csv.hpp"

namespace hybrid {
namespace {

std::string metadata_line(const RunConfig& c) {
    return "config_hash=" + c.config_hash + " seed=" + std::to_string(c.seed);
}

RngPolicy policy_of(const RunConfig& c) {
    RngPolicy p;
    p.master_seed = c.seed;
    p.threads = c.threads;
    return p;
}

void print_outcome(std::ostream& os, const TestOutcome& o) {
    os << std::left << std::setw(11) << method_name(o.method) << std::right
       << " reject=" << (o.reject ? 1 : 0) << "  statistic=" << std::setw(10)
       << o.statistic << "  critical=" << std::setw(10) << o.critical_value
       << "  borrowed=" << (o.borrowed ? 1 : 0) << "  estimate=" << std::setw(10)
       << o.estimate;
    const auto a0 = o.extras.find("alpha0");
    if (a0 != o.extras.end()) os << "  alpha0=" << a0->second;
    os << '\n';
}

int run_calibrate(const RunConfig& c, std::ostream& os) {
    const DerivedDesign d = derive(c.design);
    os << "# " << metadata_line(c) << '\n';
    os << "design: se_y1=" << d.se_y1 << " se_y2=" << d.se_y2 << " w_star=" << d.w_star
       << " rho=" << d.rho << " se_y3=" << d.se_y3 << '\n';
    os << "tost: theta=" << d.theta << " beta_eq=" << d.beta_eq
       << " borrow_prob=" << borrowing_probability(d, 0.0) << '\n';
    os << "yuan: type1=" << yuan_type1_error(d, c.design.alpha) << '\n';
    os << "no_borrow: z=" << normal_quantile(1.0 - c.design.alpha / 2.0) << '\n';
    os << "approach2: z_star=" << approach2_critical(d, c.design.alpha) << '\n';
    try {
        const auto [z1, z2] = approach3_criticals(d, c.design.alpha, SplitSpec{c.a3_v});
        os << "approach3 (v=" << c.a3_v << "): z1=" << z1 << " z2=" << z2 << '\n';
    } catch (const InfeasibleSplitError& e) {
        os << "approach3 (v=" << c.a3_v << "): infeasible (" << e.what() << ")\n";
    }
    os << "approach4: z_star=" << approach4_critical(d, c.design.alpha) << '\n';
    return 0;
}

int run_table1(const RunConfig& c, std::ostream& os) {
    const std::vector<Table1Row> rows =
        table1_report(c.table1.designs, c.table1.split_values, c.table1.power_delta);
    CsvTable t = table1_table(rows);
    t.comments.push_back(metadata_line(c));
    write_csv(c.out, t);
    os << "wrote " << c.out << " (" << t.rows.size() << " rows)\n";
    return 0;
}

int run_oc_normal(const RunConfig& c, std::ostream& os) {
    Scenario base;
    base.params = c.design;
    const std::vector<SweepRow> rows =
        sweep(base, c.delta_grid, c.Delta_values, c.methods, c.n_reps, policy_of(c));
    CsvTable t = oc_table(rows);
    t.comments.push_back(metadata_line(c));
    write_csv(c.out, t);
    os << "wrote " << c.out << " (" << t.rows.size() << " rows)\n";
    return 0;
}

int run_oc_survival(const RunConfig& c, std::ostream& os) {
    const std::vector<SurvivalSweepRow> rows = survival_oc(
        c.survival.scenario, c.survival.analysis, c.survival.log_theta_T_values,
        c.survival.log_theta_R_values, c.methods, c.n_reps, policy_of(c));
    CsvTable t = survival_oc_table(rows);
    t.comments.push_back(metadata_line(c));
    write_csv(c.out, t);
    os << "wrote " << c.out << " (" << t.rows.size() << " rows)\n";
    return 0;
}

int run_fit(const RunConfig& c, std::ostream& os) {
    SummaryStats stats;
    if (c.fit.has_stats) {
        stats = c.fit.stats;
    } else if (!c.fit.subjects_csv.empty()) {
        const std::vector<Subject> subjects = read_subjects_csv(c.fit.subjects_csv);
        stats = to_summary(cox_fit(subjects, c.fit.adjust));
    } else {
        throw ConfigError("fit requires inline stats (y1..rho) or subjects_csv");
    }
    os << "# " << metadata_line(c) << '\n';
    os << "stats: y1=" << stats.y1 << " y2=" << stats.y2 << " se_y1=" << stats.se_y1
       << " se_y2=" << stats.se_y2 << " rho=" << stats.rho << '\n';
    for (const MethodSpec& m : c.methods) print_outcome(os, apply_method(m, stats, c.design));
    return 0;
}

}  // namespace

int run(const RunConfig& c, std::ostream& os) {
    os << std::setprecision(10);
    if (c.command == "calibrate") return run_calibrate(c, os);
    if (c.command == "table1") return run_table1(c, os);
    if (c.command == "oc-normal") return run_oc_normal(c, os);
    if (c.command == "oc-survival") return run_oc_survival(c, os);
    if (c.command == "fit") return run_fit(c, os);
    throw ConfigError("unknown command: " + c.command);
}

}  // namespace hybrid
