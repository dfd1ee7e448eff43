#include "cdrl/eval.hpp"

#include <cmath>
#include <sstream>

namespace cdrl {

Observation add_obs_noise(const Observation& obs, double sigma, std::mt19937_64& rng) {
    if (sigma < 0) throw ConfigError("add_obs_noise: negative sigma");
    if (sigma == 0) return obs;
    Observation noisy = obs;
    std::normal_distribution<double> dist(0.0, sigma);
    for (auto& v : noisy.data) v += static_cast<float>(dist(rng));
    return noisy;
}

Action perturb_action(Action a, double p, std::mt19937_64& rng) {
    if (!(p >= 0 && p <= 1)) throw ConfigError("perturb_action: p outside [0,1]");
    if (p == 0) return a;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < p) {
        std::uniform_int_distribution<int> pick(0, kNumActions - 1);
        return static_cast<Action>(pick(rng));
    }
    return a;
}

Action sticky_action(Action a, Action prev, double p, std::mt19937_64& rng) {
    if (!(p >= 0 && p <= 1)) throw ConfigError("sticky_action: p outside [0,1]");
    if (p == 0) return a;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    return coin(rng) < p ? prev : a;
}

namespace {

int greedy_action(const Tensor<float>& q) {
    int best = 0;
    for (std::size_t i = 1; i < q.numel(); ++i)
        if (q[i] > q[best]) best = static_cast<int>(i);
    return best;
}

void aggregate(EvalReport& r) {
    auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
        mean = 0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0;
        for (double x : v) ss += (x - mean) * (x - mean);
        sd = std::sqrt(ss / static_cast<double>(v.size()));  // population formula
    };
    stats(r.win_rates, r.win_rate_mean, r.win_rate_std);
    stats(r.mean_rewards, r.reward_mean, r.reward_std);
}

}  // namespace

EvalReport evaluate(QNet<float>& net, const EnvConfig& env_cfg, const NoiseSpec& noise,
                    const EvalOptions& opts, const std::vector<std::uint64_t>& seeds) {
    env_cfg.validate();
    noise.validate();
    if (opts.episodes < 1) throw ConfigError("evaluate: episodes must be >= 1");
    if (seeds.empty()) throw ConfigError("evaluate: need at least one seed");

    EvalReport report;
    report.noise = noise;
    report.seeds = seeds;
    report.episodes_per_seed = opts.episodes;

    for (std::uint64_t seed : seeds) {
        if (net.gate()) net.gate()->reset_ema();
        std::mt19937_64 noise_rng(noise.noise_seed ^ (seed * 0x9e3779b97f4a7c15ULL + 1));
        PongEnv env(env_cfg, seed);
        int wins = 0;
        double total_reward = 0;
        for (int ep = 0; ep < opts.episodes; ++ep) {
            Observation obs = env.reset(seed * 1000003ULL + static_cast<std::uint64_t>(ep));
            Action prev = Action::NoOp;
            bool first_step = true;
            bool done = false;
            long steps = 0;
            double ep_reward = 0;
            while (!done && steps < opts.max_episode_steps) {
                Observation seen = add_obs_noise(obs, noise.obs_sigma, noise_rng);
                Tensor<float> q = net.forward(seen.as_batch1());
                Action a = static_cast<Action>(greedy_action(q));
                if (noise.act_prob > 0) a = perturb_action(a, noise.act_prob, noise_rng);
                if (noise.sticky_prob > 0)
                    a = sticky_action(a, first_step ? a : prev, noise.sticky_prob, noise_rng);
                prev = a;
                first_step = false;
                auto sr = env.step(a);
                ep_reward += sr.reward;
                done = sr.done;
                obs = std::move(sr.obs);
                ++steps;
            }
            if (done && env.state().score_left >= env_cfg.max_score) ++wins;
            total_reward += ep_reward;
        }
        report.win_rates.push_back(static_cast<double>(wins) / opts.episodes);
        report.mean_rewards.push_back(total_reward / opts.episodes);
    }
    aggregate(report);
    return report;
}

RobustnessGrid robustness_grid(QNet<float>& net, const std::string& model_id,
                               const EnvConfig& env_cfg, const EvalOptions& opts,
                               const std::vector<std::uint64_t>& seeds) {
    RobustnessGrid grid;
    grid.model_id = model_id;
    for (double sigma : robustness_obs_levels())
        for (double p : robustness_act_levels()) {
            NoiseSpec noise;
            noise.obs_sigma = sigma;
            noise.act_prob = p;
            GridCell cell;
            cell.obs_sigma = sigma;
            cell.act_prob = p;
            cell.report = evaluate(net, env_cfg, noise, opts, seeds);
            std::ostringstream id;
            id << "obs" << sigma << "_act" << p;
            cell.report.condition_id = id.str();
            cell.report.model_id = model_id;
            grid.cells.push_back(std::move(cell));
        }
    return grid;
}

std::vector<std::vector<double>> difference_grid(const RobustnessGrid& a,
                                                 const RobustnessGrid& b) {
    const std::size_t rows = robustness_obs_levels().size();
    const std::size_t cols = robustness_act_levels().size();
    if (a.cells.size() != rows * cols || b.cells.size() != rows * cols)
        throw UsageError("difference_grid: incomplete grids");
    std::vector<std::vector<double>> diff(rows, std::vector<double>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            diff[i][j] = a.at(i, j).report.win_rate_mean - b.at(i, j).report.win_rate_mean;
    return diff;
}

const std::vector<GeneralizationCase>& generalization_cases() {
    static const std::vector<GeneralizationCase> cases{
        {"train", 12, 8, 80, 5}, {"test1", 15, 10, 80, 5}, {"test2", 18, 12, 80, 5},
        {"test3", 12, 8, 60, 5}, {"test4", 12, 8, 20, 5},  {"test5", 12, 8, 80, 2},
        {"test6", 12, 8, 80, 3}, {"test7", 12, 8, 80, 4},
    };
    return cases;
}

std::vector<EvalReport> generalization_sweep(QNet<float>& net, const std::string& model_id,
                                             const EnvConfig& train_env,
                                             const EvalOptions& opts,
                                             const std::vector<std::uint64_t>& seeds) {
    std::vector<EvalReport> reports;
    const auto& cases = generalization_cases();
    // Table rows are ratios against the train row; scale them onto whatever
    // env the checkpoint was actually trained in.
    const GeneralizationCase& train_row = cases.front();
    for (const auto& c : cases) {
        EnvConfig env = train_env;
        env.ball_speed_x = train_env.ball_speed_x * (c.ball_speed_x / train_row.ball_speed_x);
        env.ball_speed_y = train_env.ball_speed_y * (c.ball_speed_y / train_row.ball_speed_y);
        env.paddle_height = std::max(
            1, static_cast<int>(std::lround(train_env.paddle_height *
                                            (static_cast<double>(c.paddle_height) /
                                             train_row.paddle_height))));
        env.paddle_speed = train_env.paddle_speed * (c.paddle_speed / train_row.paddle_speed);
        // opponent keeps the training-row paddle
        env.opp_paddle_height =
            train_env.opp_paddle_height > 0 ? train_env.opp_paddle_height : train_env.paddle_height;
        env.opp_paddle_speed =
            train_env.opp_paddle_speed > 0 ? train_env.opp_paddle_speed : train_env.paddle_speed;
        EvalReport r = evaluate(net, env, NoiseSpec{}, opts, seeds);
        r.condition_id = c.test_id;
        r.model_id = model_id;
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace cdrl
