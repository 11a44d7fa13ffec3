#include "critdecay/config.hpp"
#include "critdecay/driver.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"critdecay: numerical checks for dispersive estimates with critically decaying potentials"};
    std::string command, config_path;
    critdecay::RunOptions options;
    std::string out;
    std::uint64_t seed = 0;
    double tol = 0.0;

    app.add_option("command", command, "check | resolvent | evolve | strichartz | oplab | dipole | all")
        ->required()
        ->check(CLI::IsMember({"check", "resolvent", "evolve", "strichartz", "oplab", "dipole", "all"}));
    app.add_option("--config", config_path, "TOML run configuration")->required();
    auto* out_opt = app.add_option("--out", out, "output directory (overrides output.dir)");
    auto* seed_opt = app.add_option("--seed", seed, "seed for random probes (default 0x5EED)");
    auto* tol_opt = app.add_option("--tol", tol, "bisection tolerance for dipole");
    app.add_option("--threads", options.threads, "worker threads (falls back to CRITDECAY_THREADS)")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : critdecay::exit_operational;
    }

    if (*out_opt)
        options.out = out;
    if (*seed_opt)
        options.seed = seed;
    if (*tol_opt)
        options.tol = tol;

    critdecay::RunConfig config;
    try {
        config = critdecay::parse_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "critdecay: " << e.what() << '\n';
        return critdecay::exit_operational;
    }
    return critdecay::run(command, config, options);
}
