#include "hybrid/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hybrid {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
    for (const auto& el : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (el.key() == a) {
                ok = true;
                break;
            }
        if (!ok) bad("unknown config key: " + prefix + el.key());
    }
}

const json* find(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_num(const json& obj, const std::string& prefix, const char* key, double fb) {
    const json* v = find(obj, key);
    if (!v) return fb;
    if (!v->is_number()) bad("config key " + prefix + key + " must be a number");
    return v->get<double>();
}

long get_int(const json& obj, const std::string& prefix, const char* key, long fb) {
    const json* v = find(obj, key);
    if (!v) return fb;
    if (!v->is_number_integer()) bad("config key " + prefix + key + " must be an integer");
    return v->get<long>();
}

bool get_bool(const json& obj, const std::string& prefix, const char* key, bool fb) {
    const json* v = find(obj, key);
    if (!v) return fb;
    if (!v->is_boolean()) bad("config key " + prefix + key + " must be a boolean");
    return v->get<bool>();
}

std::string get_str(const json& obj, const std::string& prefix, const char* key,
                    const std::string& fb) {
    const json* v = find(obj, key);
    if (!v) return fb;
    if (!v->is_string()) bad("config key " + prefix + key + " must be a string");
    return v->get<std::string>();
}

std::vector<double> get_vec(const json& obj, const std::string& prefix, const char* key,
                            std::vector<double> fb) {
    const json* v = find(obj, key);
    if (!v) return fb;
    if (!v->is_array()) bad("config key " + prefix + key + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v->size());
    for (const auto& e : *v) {
        if (!e.is_number()) bad("config key " + prefix + key + " must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

DesignParams parse_design(const json& obj, const std::string& prefix, DesignParams base) {
    check_keys(obj, prefix,
               {"n_t", "n_c", "n_r", "var_t", "var_c", "var_r", "alpha", "alpha_eq",
                "delta_eq"});
    base.n_t = static_cast<int>(get_int(obj, prefix, "n_t", base.n_t));
    base.n_c = static_cast<int>(get_int(obj, prefix, "n_c", base.n_c));
    base.n_r = static_cast<int>(get_int(obj, prefix, "n_r", base.n_r));
    base.var_t = get_num(obj, prefix, "var_t", base.var_t);
    base.var_c = get_num(obj, prefix, "var_c", base.var_c);
    base.var_r = get_num(obj, prefix, "var_r", base.var_r);
    base.alpha = get_num(obj, prefix, "alpha", base.alpha);
    base.alpha_eq = get_num(obj, prefix, "alpha_eq", base.alpha_eq);
    base.delta_eq = get_num(obj, prefix, "delta_eq", base.delta_eq);
    return base;
}

Method parse_method(const std::string& name) {
    for (Method m : {Method::NoBorrow, Method::Yuan, Method::A1, Method::A2, Method::A3,
                     Method::A4, Method::PowerPrior})
        if (method_name(m) == name) return m;
    bad("unknown method name: " + name);
}

CovariateSpec parse_covariate(const json& obj, const std::string& prefix) {
    check_keys(obj, prefix, {"kind", "p", "mean", "sd"});
    const std::string kind = get_str(obj, prefix, "kind", "");
    if (kind == "bernoulli") {
        if (find(obj, "mean") || find(obj, "sd"))
            bad("config key " + prefix + "kind=bernoulli takes only p");
        return CovariateSpec::bernoulli(get_num(obj, prefix, "p", 0.5));
    }
    if (kind == "normal") {
        if (find(obj, "p")) bad("config key " + prefix + "kind=normal takes mean/sd, not p");
        return CovariateSpec::normal(get_num(obj, prefix, "mean", 0.0),
                                     get_num(obj, prefix, "sd", 1.0));
    }
    bad("config key " + prefix + "kind must be \"bernoulli\" or \"normal\"");
}

std::vector<double> default_grid() {
    std::vector<double> g;
    for (int i = -7; i <= 7; ++i) g.push_back(i / 10.0);
    return g;
}

std::vector<DesignParams> default_table1_designs(const DesignParams& base) {
    std::vector<DesignParams> out;
    for (double de : {0.25, 0.30})
        for (double ae : {0.05, 0.10, 0.15, 0.20}) {
            DesignParams d = base;
            d.delta_eq = de;
            d.alpha_eq = ae;
            out.push_back(d);
        }
    return out;
}

void parse_survival(const json& obj, const std::string& prefix, SurvivalConfig& sv) {
    check_keys(obj, prefix,
               {"theta_T", "theta_R", "baseline", "cox_coeffs", "covariate_model",
                "n_registry", "n_trial", "n_external", "target_events", "registry_followup",
                "enroll_intercept", "enroll_coeffs", "analysis", "log_theta_T_values",
                "log_theta_R_values"});
    SurvivalScenario& sc = sv.scenario;
    sc.theta_T = get_num(obj, prefix, "theta_T", sc.theta_T);
    sc.theta_R = get_num(obj, prefix, "theta_R", sc.theta_R);
    if (const json* b = find(obj, "baseline")) {
        if (!b->is_object()) bad("config key " + prefix + "baseline must be an object");
        const std::string bp = prefix + "baseline.";
        check_keys(*b, bp, {"family", "lambda", "shape"});
        const std::string fam = get_str(*b, bp, "family", "exponential");
        if (fam == "exponential")
            sc.baseline.family = BaselineSpec::Family::exponential;
        else if (fam == "weibull")
            sc.baseline.family = BaselineSpec::Family::weibull;
        else
            bad("config key " + bp + "family must be \"exponential\" or \"weibull\"");
        sc.baseline.lambda = get_num(*b, bp, "lambda", sc.baseline.lambda);
        sc.baseline.shape = get_num(*b, bp, "shape", sc.baseline.shape);
    }
    sc.cox_coeffs = get_vec(obj, prefix, "cox_coeffs", sc.cox_coeffs);
    if (const json* cm = find(obj, "covariate_model")) {
        if (!cm->is_array())
            bad("config key " + prefix + "covariate_model must be an array");
        sc.covariate_model.clear();
        for (std::size_t i = 0; i < cm->size(); ++i) {
            const json& e = (*cm)[i];
            const std::string cp =
                prefix + "covariate_model[" + std::to_string(i) + "].";
            if (!e.is_object()) bad("config key " + cp + " must be an object");
            sc.covariate_model.push_back(parse_covariate(e, cp));
        }
    }
    sc.n_registry = static_cast<int>(get_int(obj, prefix, "n_registry", sc.n_registry));
    sc.n_trial = static_cast<int>(get_int(obj, prefix, "n_trial", sc.n_trial));
    sc.n_external = static_cast<int>(get_int(obj, prefix, "n_external", sc.n_external));
    sc.target_events =
        static_cast<int>(get_int(obj, prefix, "target_events", sc.target_events));
    sc.registry_followup = get_num(obj, prefix, "registry_followup", sc.registry_followup);
    sc.enroll_intercept = get_num(obj, prefix, "enroll_intercept", sc.enroll_intercept);
    sc.enroll_coeffs = get_vec(obj, prefix, "enroll_coeffs", sc.enroll_coeffs);
    if (const json* a = find(obj, "analysis")) {
        if (!a->is_object()) bad("config key " + prefix + "analysis must be an object");
        sv.analysis = parse_design(*a, prefix + "analysis.", sv.analysis);
    }
    sv.log_theta_T_values =
        get_vec(obj, prefix, "log_theta_T_values", sv.log_theta_T_values);
    sv.log_theta_R_values =
        get_vec(obj, prefix, "log_theta_R_values", sv.log_theta_R_values);
}

void parse_fit(const json& obj, const std::string& prefix, FitConfig& fc) {
    check_keys(obj, prefix, {"y1", "y2", "se_y1", "se_y2", "rho", "subjects_csv", "adjust"});
    const bool any = find(obj, "y1") || find(obj, "y2") || find(obj, "se_y1") ||
                     find(obj, "se_y2") || find(obj, "rho");
    if (any) {
        const bool all = find(obj, "y1") && find(obj, "y2") && find(obj, "se_y1") &&
                         find(obj, "se_y2") && find(obj, "rho");
        if (!all) bad("fit stats require all of y1, y2, se_y1, se_y2, rho");
        fc.has_stats = true;
        fc.stats.y1 = get_num(obj, prefix, "y1", 0.0);
        fc.stats.y2 = get_num(obj, prefix, "y2", 0.0);
        fc.stats.se_y1 = get_num(obj, prefix, "se_y1", 0.0);
        fc.stats.se_y2 = get_num(obj, prefix, "se_y2", 0.0);
        fc.stats.rho = get_num(obj, prefix, "rho", 0.0);
    }
    fc.subjects_csv = get_str(obj, prefix, "subjects_csv", fc.subjects_csv);
    fc.adjust = get_bool(obj, prefix, "adjust", fc.adjust);
}

void revalidate(const RunConfig& c) {
    static const char* commands[] = {"calibrate", "table1", "oc-normal", "oc-survival",
                                     "fit"};
    if (std::find_if(std::begin(commands), std::end(commands), [&](const char* s) {
            return c.command == s;
        }) == std::end(commands))
        bad(c.command.empty() ? std::string("missing command (set \"command\" in the "
                                            "config or pass it on the command line)")
                              : "unknown command: " + c.command);
    try {
        c.design.validate();
        c.prior.validate();
        SplitSpec{c.a3_v}.validate();
        for (const DesignParams& d : c.table1.designs) d.validate();
        c.survival.scenario.validate();
        c.survival.analysis.validate();
        if (c.fit.has_stats) c.fit.stats.validate();
    } catch (const std::exception& e) {
        bad(e.what());
    }
    if (c.methods.empty()) bad("methods must be non-empty");
    if (c.delta_grid.empty()) bad("delta_grid must be non-empty");
    if (c.Delta_values.empty()) bad("Delta_values must be non-empty");
    if (c.table1.designs.empty()) bad("table1.designs must be non-empty");
    if (c.table1.split_values.empty()) bad("table1.split_values must be non-empty");
    if (c.survival.log_theta_T_values.empty())
        bad("survival.log_theta_T_values must be non-empty");
    if (c.survival.log_theta_R_values.empty())
        bad("survival.log_theta_R_values must be non-empty");
    if (c.n_reps < 1) bad("n_reps must be positive");
    if (c.threads < 1 || c.threads > 1024) bad("threads must lie in [1, 1024]");
    if (c.out.empty()) bad("out must be non-empty");
}

json design_json(const DesignParams& d) {
    return json{{"n_t", d.n_t},         {"n_c", d.n_c},        {"n_r", d.n_r},
                {"var_t", d.var_t},     {"var_c", d.var_c},    {"var_r", d.var_r},
                {"alpha", d.alpha},     {"alpha_eq", d.alpha_eq},
                {"delta_eq", d.delta_eq}};
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

std::string canonical_config_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["design"] = design_json(c.design);
    json methods = json::array();
    for (const MethodSpec& m : c.methods) methods.push_back(method_name(m.method));
    j["methods"] = methods;
    j["a3_v"] = c.a3_v;
    j["prior"] = {{"mu0", c.prior.mu0}, {"var0", c.prior.var0}};
    j["delta_grid"] = c.delta_grid;
    j["Delta_values"] = c.Delta_values;
    j["n_reps"] = c.n_reps;
    j["seed"] = c.seed;
    json designs = json::array();
    for (const DesignParams& d : c.table1.designs) designs.push_back(design_json(d));
    j["table1"] = {{"designs", designs},
                   {"split_values", c.table1.split_values},
                   {"power_delta", c.table1.power_delta}};
    const SurvivalScenario& sc = c.survival.scenario;
    json cov = json::array();
    for (const CovariateSpec& s : sc.covariate_model) {
        if (s.kind == CovariateSpec::Kind::bernoulli)
            cov.push_back({{"kind", "bernoulli"}, {"p", s.p}});
        else
            cov.push_back({{"kind", "normal"}, {"mean", s.mean}, {"sd", s.sd}});
    }
    j["survival"] = {
        {"theta_T", sc.theta_T},
        {"theta_R", sc.theta_R},
        {"baseline",
         {{"family", sc.baseline.family == BaselineSpec::Family::exponential
                         ? "exponential"
                         : "weibull"},
          {"lambda", sc.baseline.lambda},
          {"shape", sc.baseline.shape}}},
        {"cox_coeffs", sc.cox_coeffs},
        {"covariate_model", cov},
        {"n_registry", sc.n_registry},
        {"n_trial", sc.n_trial},
        {"n_external", sc.n_external},
        {"target_events", sc.target_events},
        {"registry_followup", sc.registry_followup},
        {"enroll_intercept", sc.enroll_intercept},
        {"enroll_coeffs", sc.enroll_coeffs},
        {"analysis", design_json(c.survival.analysis)},
        {"log_theta_T_values", c.survival.log_theta_T_values},
        {"log_theta_R_values", c.survival.log_theta_R_values}};
    j["fit"] = {{"has_stats", c.fit.has_stats},
                {"y1", c.fit.has_stats ? c.fit.stats.y1 : 0.0},
                {"y2", c.fit.has_stats ? c.fit.stats.y2 : 0.0},
                {"se_y1", c.fit.has_stats ? c.fit.stats.se_y1 : 0.0},
                {"se_y2", c.fit.has_stats ? c.fit.stats.se_y2 : 0.0},
                {"rho", c.fit.has_stats ? c.fit.stats.rho : 0.0},
                {"subjects_csv", c.fit.subjects_csv},
                {"adjust", c.fit.adjust}};
    return j.dump();
}

RunConfig parse_config_text(const std::string& text, const CliOverrides& overrides) {
    json root;
    try {
        root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        bad(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) bad("config root must be an object");
    check_keys(root, "",
               {"command", "design", "methods", "a3_v", "prior", "delta_grid",
                "Delta_values", "n_reps", "seed", "threads", "out", "table1", "survival",
                "fit"});

    RunConfig c;
    c.command = get_str(root, "", "command", "");
    if (const json* d = find(root, "design")) {
        if (!d->is_object()) bad("config key design must be an object");
        c.design = parse_design(*d, "design.", c.design);
    }
    c.a3_v = get_num(root, "", "a3_v", c.a3_v);
    if (const json* p = find(root, "prior")) {
        if (!p->is_object()) bad("config key prior must be an object");
        check_keys(*p, "prior.", {"mu0", "var0"});
        c.prior.mu0 = get_num(*p, "prior.", "mu0", c.prior.mu0);
        c.prior.var0 = get_num(*p, "prior.", "var0", c.prior.var0);
    }
    c.delta_grid = get_vec(root, "", "delta_grid", default_grid());
    c.Delta_values = get_vec(root, "", "Delta_values", c.Delta_values);
    c.n_reps = get_int(root, "", "n_reps", c.n_reps);
    if (const json* s = find(root, "seed")) {
        if (!s->is_number_integer() && !s->is_number_unsigned())
            bad("config key seed must be an integer");
        if (s->is_number_integer() && s->get<long long>() < 0)
            bad("config key seed must be non-negative");
        c.seed = s->get<std::uint64_t>();
    }
    c.threads = static_cast<int>(get_int(root, "", "threads", c.threads));
    c.out = get_str(root, "", "out", "");

    // survival defaults that differ from the summary-level design
    c.survival.analysis.alpha_eq = 0.10;
    c.survival.analysis.delta_eq = 0.3;
    c.survival.log_theta_R_values = default_grid();
    if (const json* sv = find(root, "survival")) {
        if (!sv->is_object()) bad("config key survival must be an object");
        parse_survival(*sv, "survival.", c.survival);
    }

    c.table1.designs = default_table1_designs(c.design);
    if (const json* t1 = find(root, "table1")) {
        if (!t1->is_object()) bad("config key table1 must be an object");
        check_keys(*t1, "table1.", {"designs", "split_values", "power_delta"});
        if (const json* ds = find(*t1, "designs")) {
            if (!ds->is_array()) bad("config key table1.designs must be an array");
            c.table1.designs.clear();
            for (std::size_t i = 0; i < ds->size(); ++i) {
                const json& e = (*ds)[i];
                const std::string dp = "table1.designs[" + std::to_string(i) + "].";
                if (!e.is_object()) bad("config key " + dp + " must be an object");
                c.table1.designs.push_back(parse_design(e, dp, c.design));
            }
        }
        c.table1.split_values =
            get_vec(*t1, "table1.", "split_values", c.table1.split_values);
        c.table1.power_delta = get_num(*t1, "table1.", "power_delta", c.table1.power_delta);
    }

    if (const json* f = find(root, "fit")) {
        if (!f->is_object()) bad("config key fit must be an object");
        parse_fit(*f, "fit.", c.fit);
    }

    std::vector<std::string> method_names;
    if (const json* ms = find(root, "methods")) {
        if (!ms->is_array()) bad("config key methods must be an array of strings");
        for (const auto& e : *ms) {
            if (!e.is_string()) bad("config key methods must be an array of strings");
            method_names.push_back(e.get<std::string>());
        }
    } else {
        for (Method m : {Method::NoBorrow, Method::Yuan, Method::A1, Method::A2,
                         Method::A3, Method::A4, Method::PowerPrior})
            method_names.push_back(method_name(m));
    }
    for (const std::string& name : method_names) {
        MethodSpec spec;
        spec.method = parse_method(name);
        spec.split.v = c.a3_v;
        spec.prior = c.prior;
        c.methods.push_back(spec);
    }

    if (overrides.command) c.command = *overrides.command;
    if (overrides.seed) c.seed = *overrides.seed;
    if (overrides.n_reps) c.n_reps = *overrides.n_reps;
    if (overrides.out) c.out = *overrides.out;
    if (overrides.threads) c.threads = *overrides.threads;
    if (c.out.empty() && !c.command.empty()) c.out = c.command + ".csv";

    revalidate(c);
    c.config_hash = fnv1a_hex(canonical_config_json(c));
    return c;
}

RunConfig parse_config(const std::string& path, const CliOverrides& overrides) {
    if (path.empty()) return parse_config_text("{}", overrides);
    std::ifstream in(path);
    if (!in) bad("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

}  // namespace hybrid
