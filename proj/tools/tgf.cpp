// Command-line driver for the third-grade fluid laboratory.
//
//   tgf verify        [--config FILE] [--output DIR]
//   tgf simulate-det  [--config FILE] [--output DIR]
//   tgf find-attractor[--config FILE] [--output DIR]
//   tgf pullback      [--config FILE] [--output DIR]
//   tgf rate-study    [--config FILE] [--output DIR]
//
// Without --config the built-in defaults run (small grid, Taylor-Green
// forcing).  Artifacts land in --output (default: run.output_dir) together
// with a manifest.json carrying content hashes.

#include <CLI11.hpp>

#include <iostream>

#include "tgf/workflows.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for 2D third-grade fluids"};
    app.require_subcommand(1);
    app.fallthrough();  // accept --config/--output after the subcommand

    std::string config_path, output_override;
    app.add_option("--config", config_path, "configuration file (key=value or JSON)");
    app.add_option("--output", output_override, "artifact directory (overrides run.output_dir)");

    auto* verify = app.add_subcommand("verify", "run the operator/noise invariant suite");
    auto* simdet = app.add_subcommand("simulate-det", "integrate the deterministic system");
    auto* findat = app.add_subcommand("find-attractor", "locate the singleton attractor");
    auto* pullb = app.add_subcommand("pullback", "pullback solve along one noise path");
    auto* rate = app.add_subcommand("rate-study", "noise-vanishing convergence rate study");

    CLI11_PARSE(app, argc, argv);

    try {
        tgf::RunConfig cfg;
        if (!config_path.empty()) cfg = tgf::load_config(config_path);
        if (!output_override.empty()) cfg.output_dir = output_override;

        tgf::WorkflowOutput out;
        if (verify->parsed()) out = tgf::run_verify(cfg);
        else if (simdet->parsed()) out = tgf::run_simulate_det(cfg);
        else if (findat->parsed()) out = tgf::run_find_attractor(cfg);
        else if (pullb->parsed()) out = tgf::run_pullback(cfg);
        else if (rate->parsed()) out = tgf::run_rate_study(cfg);

        tgf::write_artifacts(cfg.output_dir, out.artifacts);
        std::cout << out.summary << "\n";
        std::cout << "artifacts written to " << cfg.output_dir << "\n";
        return out.exit_code;
    } catch (const tgf::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
