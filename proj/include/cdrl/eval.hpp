#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cdrl/pong.hpp"
#include "cdrl/qnet.hpp"

namespace cdrl {

// Evaluation-time perturbations; the opponent never sees any of them.
// Random-replacement and sticky action noise are separate experimental
// conditions and never combine.
struct NoiseSpec {
    double obs_sigma = 0;
    double act_prob = 0;
    double sticky_prob = 0;
    std::uint64_t noise_seed = 0;

    void validate() const {
        auto fail = [](const char* field) {
            throw ConfigError(std::string("noise spec: invalid ") + field);
        };
        if (obs_sigma < 0) fail("obs_sigma");
        if (!(act_prob >= 0 && act_prob <= 1)) fail("act_prob");
        if (!(sticky_prob >= 0 && sticky_prob <= 1)) fail("sticky_prob");
        if (act_prob > 0 && sticky_prob > 0)
            throw ConfigError("noise spec: act_prob and sticky_prob are mutually exclusive");
    }
};

// Gaussian pixel noise, no re-clipping; the input is left unmodified.
Observation add_obs_noise(const Observation& obs, double sigma, std::mt19937_64& rng);

// With probability p, a uniform draw over all actions (may equal a).
Action perturb_action(Action a, double p, std::mt19937_64& rng);

// With probability p, repeat the previous action.
Action sticky_action(Action a, Action prev, double p, std::mt19937_64& rng);

struct EvalReport {
    std::string condition_id;
    std::string model_id;
    NoiseSpec noise;
    std::vector<std::uint64_t> seeds;
    std::vector<double> win_rates;     // per seed
    std::vector<double> mean_rewards;  // per seed
    int episodes_per_seed = 0;
    double win_rate_mean = 0, win_rate_std = 0;  // population std over seeds
    double reward_mean = 0, reward_std = 0;
};

struct EvalOptions {
    int episodes = 50;
    long max_episode_steps = 20000;  // rally cap; a capped episode counts as a loss
};

// Greedy rollouts of a loaded model under one (env, noise) condition.
// The gate EMA resets at the start of every seed.
EvalReport evaluate(QNet<float>& net, const EnvConfig& env_cfg, const NoiseSpec& noise,
                    const EvalOptions& opts, const std::vector<std::uint64_t>& seeds);

inline const std::vector<double>& robustness_obs_levels() {
    static const std::vector<double> v{0, 1, 2, 3, 5, 10};
    return v;
}
inline const std::vector<double>& robustness_act_levels() {
    static const std::vector<double> v{0, 0.05, 0.10, 0.15, 0.20, 0.30};
    return v;
}

struct GridCell {
    double obs_sigma = 0;
    double act_prob = 0;
    EvalReport report;
};

struct RobustnessGrid {
    std::string model_id;
    std::vector<GridCell> cells;  // row-major over obs x act levels

    const GridCell& at(std::size_t oi, std::size_t ai) const {
        return cells.at(oi * robustness_act_levels().size() + ai);
    }
};

RobustnessGrid robustness_grid(QNet<float>& net, const std::string& model_id,
                               const EnvConfig& env_cfg, const EvalOptions& opts,
                               const std::vector<std::uint64_t>& seeds);

// Per-cell mean win-rate difference, A - B.
std::vector<std::vector<double>> difference_grid(const RobustnessGrid& a,
                                                 const RobustnessGrid& b);

struct GeneralizationCase {
    std::string test_id;
    double ball_speed_x, ball_speed_y;
    int paddle_height;  // agent paddle only
    double paddle_speed;
};

// Train row + Tests 1-7; paddle changes apply to the evaluated agent only,
// the opponent keeps the training-row paddle.
const std::vector<GeneralizationCase>& generalization_cases();

std::vector<EvalReport> generalization_sweep(QNet<float>& net, const std::string& model_id,
                                             const EnvConfig& train_env,
                                             const EvalOptions& opts,
                                             const std::vector<std::uint64_t>& seeds);

}  // namespace cdrl
