#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "quotecross/errors.hpp"
#include "quotecross/pipeline.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    quotecross::CliOverrides overrides;
};

void add_common_flags(CLI::App* cmd, CliArgs& args) {
    cmd->add_option("--config", args.config_path, "Run configuration file (JSON)")
        ->required();
    cmd->add_option("--out-dir", args.overrides.out_dir,
                    "Output directory (overrides the config)");
    cmd->add_option("--window-start", args.overrides.window_start,
                    "Analysis window start, ISO date (overrides the config)");
    cmd->add_option("--window-end", args.overrides.window_end,
                    "Analysis window end, ISO date (overrides the config)");
    cmd->add_option("--gyration-mode", args.overrides.gyration_mode,
                    "Radius mode: planar or great_circle (overrides the config)");
    cmd->add_option("--top-k", args.overrides.top_k,
                    "Popularity table size (overrides the config)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quotecross: cross-media propaganda quote analysis"};
    app.require_subcommand(1);

    CliArgs args;
    CLI::App* cmd_ingest = app.add_subcommand("ingest", "Load, validate, and dedup the corpora");
    CLI::App* cmd_match = app.add_subcommand("match", "Cluster quotes and find online mentions");
    CLI::App* cmd_geo = app.add_subcommand("geo", "Geocode events and compute spatial spread");
    CLI::App* cmd_temporal =
        app.add_subcommand("temporal", "Compute lifespans and crossover statistics");
    CLI::App* cmd_report = app.add_subcommand("report", "Assemble summary tables and run report");
    CLI::App* cmd_run_all = app.add_subcommand("run-all", "Run every stage in order");
    for (CLI::App* cmd :
         {cmd_ingest, cmd_match, cmd_geo, cmd_temporal, cmd_report, cmd_run_all}) {
        add_common_flags(cmd, args);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        quotecross::RunConfig config = quotecross::load_config(args.config_path, args.overrides);
        quotecross::Pipeline pipeline(std::move(config));
        if (cmd_ingest->parsed()) return pipeline.ingest();
        if (cmd_match->parsed()) return pipeline.match();
        if (cmd_geo->parsed()) return pipeline.geo();
        if (cmd_temporal->parsed()) return pipeline.temporal();
        if (cmd_report->parsed()) return pipeline.report();
        return pipeline.run_all();
    } catch (const quotecross::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return quotecross::kExitConfig;
    } catch (const quotecross::MissingArtifactError& e) {
        std::cerr << "missing artifact: " << e.what() << '\n';
        return quotecross::kExitMissingArtifact;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
