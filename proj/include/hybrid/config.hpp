// Run configuration: one JSON schema shared by every command, parsed and
// validated into a RunConfig; CLI flags override file values.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybrid/design.hpp"
#include "hybrid/oc.hpp"
#include "hybrid/power_prior.hpp"
#include "hybrid/survival.hpp"
#include "hybrid/two_step.hpp"

namespace hybrid {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Table1Config {
    std::vector<DesignParams> designs;  // default: the eight canonical designs
    std::vector<double> split_values{0.25, 0.5, 0.75};
    double power_delta = 0.4;
};

struct SurvivalConfig {
    SurvivalScenario scenario{};
    DesignParams analysis{};  // defaults set in parse_config (alpha_eq=0.10, delta_eq=0.3)
    std::vector<double> log_theta_T_values{0.0};
    std::vector<double> log_theta_R_values;  // default -0.7..0.7 step 0.1
};

struct FitConfig {
    bool has_stats = false;
    SummaryStats stats{};
    std::string subjects_csv;  // alternative input: subject-level CSV
    bool adjust = false;       // adjust for covariates in the Cox fit
};

struct RunConfig {
    std::string command;  // calibrate | table1 | oc-normal | oc-survival | fit
    DesignParams design{};
    std::vector<MethodSpec> methods;  // default: all seven methods
    double a3_v = 0.5;
    PriorSpec prior{};
    std::vector<double> delta_grid;  // default -0.7..0.7 step 0.1
    std::vector<double> Delta_values{0.0};
    long n_reps = 10000;
    std::uint64_t seed = 20190101;
    int threads = 1;
    std::string out;  // default: "<command>.csv"
    Table1Config table1{};
    SurvivalConfig survival{};
    FitConfig fit{};
    std::string config_hash;  // over semantically meaningful fields only
};

struct CliOverrides {
    std::optional<std::string> command;
    std::optional<std::uint64_t> seed;
    std::optional<long> n_reps;
    std::optional<std::string> out;
    std::optional<int> threads;
};

// Empty path: defaults plus overrides only (the command must come from a flag).
RunConfig parse_config(const std::string& path, const CliOverrides& overrides);

// Same, from config text already in memory.
RunConfig parse_config_text(const std::string& text, const CliOverrides& overrides);

// Canonical serialization of the semantically meaningful fields (everything
// except out/threads); its FNV-1a hash is RunConfig::config_hash.
std::string canonical_config_json(const RunConfig& config);

}  // namespace hybrid
