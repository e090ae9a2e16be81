#include "lplh/errors.hpp"
#include "lplh/runner.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"LPLH interactive-fiction agent runner"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "Execute the epoch protocol");
    std::string config_path;
    run_cmd->add_option("--config", config_path, "Run configuration (JSON)")
        ->required();
    std::string env_arg, agent_arg, out_arg;
    int epochs_arg = -1, steps_arg = -1, stagnation_arg = -1;
    long long seed_arg = -1;
    bool no_kg = false, no_exp = false, no_as = false, fresh_as = false;
    run_cmd->add_option("--env", env_arg, "toy | adapter:<command>");
    run_cmd->add_option("--agent", agent_arg, "lplh | baseline | scripted:<file>");
    run_cmd->add_option("--epochs", epochs_arg, "Number of epochs");
    run_cmd->add_option("--steps", steps_arg, "Steps per epoch");
    run_cmd->add_option("--seed", seed_arg, "Environment seed");
    run_cmd->add_flag("--no-kg", no_kg, "Disable the knowledge graph");
    run_cmd->add_flag("--no-exp", no_exp, "Disable the experience library");
    run_cmd->add_flag("--no-as", no_as, "Disable the learned action space");
    run_cmd->add_flag("--fresh-as", fresh_as, "Reset the action space each epoch");
    run_cmd->add_option("--stagnation-summary", stagnation_arg,
                        "Force a summary after N scoreless steps");
    run_cmd->add_option("--out", out_arg, "Run output directory");

    // replay
    auto* replay_cmd = app.add_subcommand("replay", "Re-execute a logged run");
    std::string replay_path;
    replay_cmd->add_option("log", replay_path, "Episode log or run directory")
        ->required();

    // report
    auto* report_cmd = app.add_subcommand("report", "Recompute metrics from logs");
    std::string report_dir;
    report_cmd->add_option("run-dir", report_dir, "Run directory")->required();

    // curves
    auto* curves_cmd = app.add_subcommand("curves", "Print the learning-curve table");
    std::string curves_dir;
    curves_cmd->add_option("run-dir", curves_dir, "Run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            lplh::RunConfig config = lplh::RunConfig::from_file(config_path);
            if (!env_arg.empty()) config.env = env_arg;
            if (!agent_arg.empty()) config.agent = agent_arg;
            if (epochs_arg >= 0) config.epochs = epochs_arg;
            if (steps_arg >= 0) config.steps = steps_arg;
            if (seed_arg >= 0) config.seed = static_cast<uint64_t>(seed_arg);
            if (no_kg) config.no_kg = true;
            if (no_exp) config.no_exp = true;
            if (no_as) config.no_as = true;
            if (fresh_as) config.fresh_as = true;
            if (stagnation_arg >= 0) config.stagnation_summary = stagnation_arg;
            if (!out_arg.empty()) config.out_dir = out_arg;

            lplh::RunReport report = lplh::run(config);
            std::cout << report.to_json().dump(2) << '\n';
            return 0;
        }
        if (replay_cmd->parsed()) {
            lplh::ReplayResult r = lplh::replay(replay_path);
            if (r.ok) {
                std::cout << "replay ok\n";
                return 0;
            }
            std::cout << "replay FAILED: " << r.message << " at epoch " << r.epoch
                      << " episode " << r.episode << " step " << r.step << '\n';
            return 1;
        }
        if (report_cmd->parsed()) {
            std::cout << lplh::report_from_logs(report_dir).to_json().dump(2) << '\n';
            return 0;
        }
        if (curves_cmd->parsed()) {
            std::ifstream in(curves_dir + "/curves.csv");
            if (!in) throw lplh::Error("no curves.csv in " + curves_dir);
            std::cout << in.rdbuf();
            return 0;
        }
    } catch (const lplh::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
