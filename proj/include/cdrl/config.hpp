#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdrl/eval.hpp"
#include "cdrl/pong.hpp"
#include "cdrl/qnet.hpp"
#include "cdrl/trainer.hpp"

namespace cdrl {

// A fully resolved experiment: built-in defaults <- config file <- flag
// overrides. Every field has a default, so an empty config is runnable.
struct ExperimentSpec {
    std::string command = "train";  // train|eval|grid|generalize|sweep|report
    EnvConfig env;
    TrainConfig train;
    ModelConfig model;
    EvalOptions eval;
    NoiseSpec noise;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::string out_dir;  // empty -> runs/<timestamp>-<command>-<kind>
    std::vector<std::string> checkpoints;  // label=path entries
    std::vector<std::string> report_dirs;
    std::string sweep_axis;              // expansion|fan_in|topk
    std::vector<double> sweep_values;    // empty -> axis default set

    // Keeps the network's input geometry in lockstep with the environment.
    void finalize() {
        model.in_channels = env.stack_size;
        model.obs_side = env.obs_side;
        model.gate.grc_dim = model.grc_dim;
    }
};

// Applies "section.key=value". Unknown keys raise ConfigError with the
// closest known key; bad values raise ConfigError with the expected type.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);

// Lines of "key=value"; '#' starts a comment; blank lines ignored.
void apply_config_file(ExperimentSpec& spec, const std::string& path);

// Serializes every known key for provenance; re-parsing reproduces spec.
std::string render_config(const ExperimentSpec& spec);

std::vector<std::string> known_config_keys();

std::vector<double> default_sweep_values(const std::string& axis);

// Applies one sweep-axis value to a model config.
void apply_sweep_value(ModelConfig& model, const std::string& axis, double value);

std::vector<std::uint64_t> parse_seed_list(const std::string& csv);

}  // namespace cdrl
