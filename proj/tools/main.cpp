#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace eme::app;
    CliOptions opts;
    CLI::App app{"Effective master equations for weakly anharmonic oscillators"};
    app.set_version_flag("--version", EME_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--config", opts.config, "Config file (YAML)")->envname("EME_CONFIG");
    app.add_option("--out", opts.out, "Output directory")->envname("EME_OUT")->capture_default_str();
    app.add_option("--flavor", opts.flavor, "linear, kerr, effective or all")
        ->envname("EME_FLAVOR")
        ->check(CLI::IsMember({"linear", "kerr", "effective", "all"}))
        ->capture_default_str();
    app.add_option("--order", opts.order, "Generator order")
        ->envname("EME_ORDER")
        ->check(CLI::IsMember({1u, 2u}))
        ->capture_default_str();
    app.add_option("--seed", opts.seed, "Seed for randomized verification")->envname("EME_SEED")->capture_default_str();

    auto* derive = app.add_subcommand("derive", "Build effective models and write them as JSON");
    auto* simulate = app.add_subcommand("simulate", "Integrate the master equations and write a CSV");
    auto* verify = app.add_subcommand("verify", "Re-derive the symbolic tables and check them");
    auto* sweep = app.add_subcommand("sweep", "Hybridization and correction signs over a g grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (derive->parsed()) return run_derive(opts, std::cout);
        if (simulate->parsed()) return run_simulate(opts, std::cout);
        if (verify->parsed()) return run_verify(opts, std::cout);
        if (sweep->parsed()) return run_sweep(opts, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
