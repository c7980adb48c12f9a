#include "monofollow/commands.hpp"
#include "monofollow/errors.hpp"

#include <cstdio>
#include <string>

#include "CLI11.hpp"

int main(int argc, char** argv) {
    using namespace monofollow;

    CLI::App app{"Optimal reflection barriers for singular control of one-dimensional diffusions"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> paths;
    std::optional<double> dt;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
        cmd->add_option("--out", out_dir, "Output directory")->required();
        cmd->add_option("--seed", seed, "Master seed for simulation");
        cmd->add_option("--paths", paths, "Number of simulated paths");
        cmd->add_option("--dt", dt, "Simulation time step");
    };
    CLI::App* solve = app.add_subcommand("solve", "Solve for b* and write solution.json");
    CLI::App* curves = app.add_subcommand("curves", "Write beta, value and transform curves");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo checks, writes sim_report.json");
    CLI::App* verify = app.add_subcommand("verify", "Re-solve and compare with solution.json");
    for (CLI::App* cmd : {solve, curves, simulate, verify}) {
        add_common(cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_code::bad_config;
    }

    try {
        RunConfig cfg = load_run_config(config_path);
        if (seed) cfg.simulation.sim.master_seed = *seed;
        if (paths) cfg.simulation.sim.n_paths = *paths;
        if (dt) cfg.simulation.sim.dt = *dt;
        validate(cfg.simulation.sim);

        if (solve->parsed()) return cmd_solve(cfg, out_dir);
        if (curves->parsed()) return cmd_curves(cfg, out_dir);
        if (simulate->parsed()) return cmd_simulate(cfg, out_dir);
        return cmd_verify(cfg, out_dir);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "monofollow: %s\n", e.what());
        return exit_code::bad_config;
    } catch (const Error& e) {
        std::fprintf(stderr, "monofollow: %s\n", e.what());
        return exit_code::solver_failure;
    }
}
