// hecke-spectra: run trace-formula experiments and emit JSON lines.
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hecke/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Hecke trace-formula experiments"};
    std::string experiment, config_path, out_path, csv_path;
    unsigned threads = 0;
    std::string names;
    for (const auto& n : hecke::experiment_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("experiment", experiment, "one of: " + names)->required();
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--out", out_path, "JSON-lines output file");
    app.add_option("--csv", csv_path, "CSV output file");
    app.add_option("--threads", threads, "worker threads (default: config or 1)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        hecke::Config cfg = config_path.empty() ? hecke::Config{} : hecke::Config::load(config_path);
        if (cfg.has("experiment") && cfg.get("experiment") != experiment)
            throw hecke::ConfigError("config names experiment '" + cfg.get("experiment") + "' but '" + experiment +
                                     "' was requested");
        hecke::RunOptions opts;
        opts.stream = &std::cout;
        opts.out_path = !out_path.empty() ? out_path : cfg.get("output");
        opts.csv_path = !csv_path.empty() ? csv_path : cfg.get("csv");
        if (threads > 0) {
            opts.threads = threads;
        } else if (cfg.has("threads")) {
            const auto t = cfg.integers("threads");
            if (t.size() != 1 || t[0] < 1) throw hecke::ConfigError("threads must be a single positive integer");
            opts.threads = static_cast<unsigned>(t[0]);
        }
        std::error_code ec;
        opts.executable = std::filesystem::read_symlink("/proc/self/exe", ec).string();
        const auto outcome = hecke::run_experiment(experiment, cfg, opts);
        return outcome.verification_failed ? 1 : 0;
    } catch (const hecke::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
