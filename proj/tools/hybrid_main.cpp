// hybrid: calibration and simulation for two-step hybrid-control designs.
// Exit codes: 0 success, 2 config error, 3 engine error.
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hybrid/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Calibration and simulation toolkit for two-step hybrid-control designs"};
    app.name("hybrid");

    std::string command, config_path, out;
    std::uint64_t seed = 0;
    long reps = 0;
    int threads = 0;
    app.add_option("command", command,
                   "One of: calibrate, table1, oc-normal, oc-survival, fit");
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "Master RNG seed (overrides config)");
    app.add_option("--reps", reps, "Replicates per scenario (overrides config)");
    app.add_option("--out", out, "Output CSV path (overrides config)");
    app.add_option("--threads", threads, "Worker threads (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    hybrid::CliOverrides ov;
    if (!command.empty()) ov.command = command;
    if (app.count("--seed")) ov.seed = seed;
    if (app.count("--reps")) ov.n_reps = reps;
    if (app.count("--out")) ov.out = out;
    if (app.count("--threads")) ov.threads = threads;

    try {
        const hybrid::RunConfig config = hybrid::parse_config(config_path, ov);
        return hybrid::run(config, std::cout);
    } catch (const hybrid::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
