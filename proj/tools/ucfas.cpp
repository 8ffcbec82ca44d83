#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ucfas/config.hpp"
#include "ucfas/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"UC-FAS quadrotor control experiments"};
    app.require_subcommand(1);

    std::string config_arg;
    std::string out_dir;
    const std::pair<const char*, const char*> modes[] = {
        {"synthesize", "Synthesize controller gains from (Z, F)"},
        {"simulate", "Regulate to the configured setpoint"},
        {"track", "Track the spiral reference"},
        {"roea", "Estimate a region of exponential attraction by sampling"},
    };
    for (const auto& [name, help] : modes) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_arg, "Config file, or the name of a shipped config")->required();
        sub->add_option("--out", out_dir, "Output directory (overrides output.directory)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ucfas::kExitConfig;
    }

    const ucfas::Mode mode = *ucfas::parse_mode(app.get_subcommands().front()->get_name());
    ucfas::ExperimentConfig cfg;
    try {
        cfg = ucfas::load_config(ucfas::resolve_config_path(config_arg));
    } catch (const ucfas::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return ucfas::kExitConfig;
    }
    if (!out_dir.empty()) cfg.output.directory = out_dir;

    return ucfas::run_experiment(mode, cfg, std::cerr);
}
