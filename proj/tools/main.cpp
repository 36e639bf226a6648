#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "pbmem/config.hpp"

// pbmem_cli: solve / energy / force / verify / sweep over a JSON run
// configuration.  Exit codes: 0 success, 1 bad usage or configuration,
// 2 solver failure, 3 verification failure.

int main(int argc, char** argv) {
    CLI::App app{"membrane electrostatics toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    pbmem::CliOptions opt;
    if (const char* env = std::getenv("PBMEM_OUT")) opt.out_dir = env;
    if (const char* env = std::getenv("PBMEM_WORKERS")) opt.workers = std::atoi(env);

    app.add_option("-c,--config", config_path, "JSON run configuration")
        ->required();
    app.add_option("-o,--out", opt.out_dir, "output directory");
    app.add_option("--seed", opt.seed, "seed for randomized checks");
    app.add_option("-j,--workers", opt.workers, "sweep worker threads");
    app.add_flag("-q,--quiet", opt.quiet, "suppress progress output");

    auto* solve = app.add_subcommand("solve", "solve for the potential");
    auto* energy = app.add_subcommand("energy", "free-energy breakdown");
    auto* force = app.add_subcommand("force", "interface traces and forces");
    auto* verify = app.add_subcommand("verify", "consistency check battery");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors all map to 1
    }

    try {
        const auto cfg = pbmem::load_config(config_path);
        if (solve->parsed()) return pbmem::run_solve(cfg, opt);
        if (energy->parsed()) return pbmem::run_energy(cfg, opt);
        if (force->parsed()) return pbmem::run_force(cfg, opt);
        if (verify->parsed()) return pbmem::run_verify(cfg, opt);
        if (sweep->parsed()) return pbmem::run_sweep(cfg, opt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
