#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdrl/experiment.hpp"

namespace {

void add_common(CLI::App* cmd, cdrl::ExperimentSpec& spec, std::string& config_path,
                std::vector<std::string>& sets, std::string& seeds, std::string& gate) {
    cmd->add_option("--config", config_path, "config file (key=value lines)");
    cmd->add_option("--set", sets, "override, e.g. --set train.gamma=0.95")->take_all();
    cmd->add_option("--out", spec.out_dir, "output directory");
    cmd->add_option("--seeds", seeds, "comma-separated seed list");
    cmd->add_option("--model", [&spec](const std::vector<std::string>& v) {
        spec.model.kind = cdrl::model_kind_from(v.back());
        return true;
    }, "baseline | cdrl | cdrl_no_dendrite");
    cmd->add_option("--gate", gate, "on | off (cdrl only)");
}

void resolve(cdrl::ExperimentSpec& spec, const std::string& config_path,
             const std::vector<std::string>& sets, const std::string& seeds,
             const std::string& gate) {
    if (!config_path.empty()) cdrl::apply_config_file(spec, config_path);
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw cdrl::ConfigError("--set expects key=value, got '" + s + "'");
        cdrl::apply_setting(spec, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!seeds.empty()) spec.seeds = cdrl::parse_seed_list(seeds);
    if (!gate.empty()) {
        if (gate == "off") {
            if (spec.model.kind == cdrl::ModelKind::Cdrl)
                spec.model.kind = cdrl::ModelKind::CdrlNoDendrite;
        } else if (gate == "on") {
            if (spec.model.kind == cdrl::ModelKind::CdrlNoDendrite)
                spec.model.kind = cdrl::ModelKind::Cdrl;
        } else {
            throw cdrl::ConfigError("--gate expects on or off, got '" + gate + "'");
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cerebellar DDQN on Pong: train, evaluate, and report"};
    app.require_subcommand(1);

    cdrl::ExperimentSpec spec;
    std::string config_path, seeds, gate;
    std::vector<std::string> sets;

    auto* train = app.add_subcommand("train", "train one model across seeds");
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint under one noise condition");
    auto* grid = app.add_subcommand("grid", "6x6 noise robustness grid for checkpoints");
    auto* generalize =
        app.add_subcommand("generalize", "physics generalization suite for checkpoints");
    auto* sweep = app.add_subcommand("sweep", "train/evaluate along one architecture axis");
    auto* report = app.add_subcommand("report", "merge per-run CSVs into summary tables");

    for (auto* cmd : {train, eval, grid, generalize, sweep, report})
        add_common(cmd, spec, config_path, sets, seeds, gate);
    for (auto* cmd : {eval, grid, generalize})
        cmd->add_option("--ckpt", spec.checkpoints, "checkpoint, optionally label=path")
            ->take_all();
    report->add_option("--runs", spec.report_dirs, "run directories to merge")->take_all();

    CLI11_PARSE(app, argc, argv);

    try {
        spec.command = app.get_subcommands().front()->get_name();
        resolve(spec, config_path, sets, seeds, gate);
        const std::string run_dir = cdrl::run_experiment(spec);
        std::cout << "run dir: " << run_dir << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
