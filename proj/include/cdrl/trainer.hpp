#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cdrl/optim.hpp"
#include "cdrl/pong.hpp"
#include "cdrl/qnet.hpp"
#include "cdrl/replay.hpp"

namespace cdrl {

struct TrainConfig {
    double gamma = 0.99;
    int batch_size = 64;
    int num_episodes = 1500;
    double eps_start = 1.0;
    double eps_end = 0.01;
    double eps_decay = 200000;
    int target_update_freq = 1000;  // gradient steps
    double learning_rate = 5e-7;
    std::size_t memory_size = 100000;
    int save_every = 500;  // episodes
    double grad_clip = 10.0;
    double ema_alpha = 0.05;  // episode-reward smoothing
    // desk-scale knobs
    int action_repeat = 1;
    int train_every = 1;
    long max_episode_steps = 0;  // 0 = unlimited
    int log_every = 1;

    void validate() const {
        auto fail = [](const char* field) {
            throw ConfigError(std::string("train config: invalid ") + field);
        };
        if (!(gamma > 0 && gamma < 1)) fail("gamma");
        if (batch_size < 1) fail("batch_size");
        if (num_episodes < 0) fail("num_episodes");
        if (!(eps_start >= 0 && eps_start <= 1)) fail("eps_start");
        if (!(eps_end >= 0 && eps_end <= eps_start)) fail("eps_end");
        if (!(eps_decay > 0)) fail("eps_decay");
        if (target_update_freq < 1) fail("target_update_freq");
        if (!(learning_rate > 0)) fail("learning_rate");
        if (memory_size < 1) fail("memory_size");
        if (!(ema_alpha > 0 && ema_alpha <= 1)) fail("ema_alpha");
        if (action_repeat < 1) fail("action_repeat");
        if (train_every < 1) fail("train_every");
        if (log_every < 1) fail("log_every");
    }
};

// eps(step) = end + (start - end) * exp(-step / decay)
inline double epsilon(long step, const TrainConfig& cfg) {
    if (step < 0) throw UsageError("epsilon: negative step");
    return cfg.eps_end +
           (cfg.eps_start - cfg.eps_end) * std::exp(-static_cast<double>(step) / cfg.eps_decay);
}

inline int argmax_row(const float* q, int n) {
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (q[i] > q[best]) best = i;  // ties -> lowest index
    return best;
}

inline Action select_action(const Tensor<float>& q_row, double eps, std::mt19937_64& rng) {
    if (!(eps >= 0 && eps <= 1)) throw UsageError("select_action: eps outside [0,1]");
    const int n = static_cast<int>(q_row.numel());
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < eps) {
        std::uniform_int_distribution<int> pick(0, n - 1);
        return static_cast<Action>(pick(rng));
    }
    return static_cast<Action>(argmax_row(q_row.ptr(), n));
}

// Double-Q target: action chosen by the online net, value read from the
// target net; terminal transitions bootstrap to r alone.
inline std::vector<float> td_target(const ReplayBuffer::Batch& batch, double gamma,
                                    QNet<float>& online, QNet<float>& target) {
    if (batch.size < 1) throw UsageError("td_target: empty batch");
    Tensor<float> q_on = online.forward(batch.s_next);
    Tensor<float> q_tg = target.forward(batch.s_next);
    const int A = online.num_actions();
    std::vector<float> y(batch.size);
    for (int i = 0; i < batch.size; ++i) {
        if (batch.done[i]) {
            y[i] = batch.r[i];
            continue;
        }
        const int a_star = argmax_row(q_on.ptr() + static_cast<std::size_t>(i) * A, A);
        y[i] = batch.r[i] +
               static_cast<float>(gamma) * q_tg[static_cast<std::size_t>(i) * A + a_star];
    }
    return y;
}

// Mean-squared TD error; y is a constant. Gradients accumulate into the
// online network's trainables.
inline double td_loss(const ReplayBuffer::Batch& batch, const std::vector<float>& y,
                      QNet<float>& online) {
    Tensor<float> q = online.forward(batch.s);
    const int A = online.num_actions();
    Tensor<float> dq(q.shape);
    double loss = 0;
    for (int i = 0; i < batch.size; ++i) {
        const std::size_t k = static_cast<std::size_t>(i) * A + batch.a[i];
        const double resid = static_cast<double>(q[k]) - y[i];
        loss += resid * resid;
        dq[k] = static_cast<float>(2.0 * resid / batch.size);
    }
    loss /= batch.size;
    if (!std::isfinite(loss)) throw NumericError("td_loss: non-finite loss");
    online.backward(dq);
    return loss;
}

inline void sync_target(QNet<float>& online, QNet<float>& target, long grad_step,
                        int target_update_freq) {
    if (grad_step % target_update_freq == 0) target.copy_from(online);
}

// EMA-smoothed episode reward; the first observation seeds the average.
struct RewardTracker {
    double alpha = 0.05;
    double ema = 0;
    bool initialized = false;
    std::vector<double> history;

    explicit RewardTracker(double a = 0.05) : alpha(a) {
        if (!(alpha > 0 && alpha <= 1)) throw ConfigError("reward tracker: alpha outside (0,1]");
    }

    void update(double r) {
        history.push_back(r);
        ema = initialized ? alpha * r + (1.0 - alpha) * ema : r;
        initialized = true;
    }
};

struct TrainLogRow {
    long step;
    int episode;
    double reward;      // running episode reward
    double ema_reward;  // per-episode EMA
    double loss;
    double eps;
    double global_gain;
};

struct TrainResult {
    std::vector<double> episode_rewards;
    std::vector<double> episode_ema;
    long total_steps = 0;
    long grad_steps = 0;
    std::string final_checkpoint;
};

inline void write_log_header(std::ostream& os) {
    os << "step,episode,reward,ema_reward,loss,epsilon,global_gain\n";
}

// DDQN training loop on the Pong environment. Writes the CSV log to `log`
// when non-null; checkpoints go under `ckpt_dir` when non-empty.
TrainResult train(const EnvConfig& env_cfg, const TrainConfig& train_cfg,
                  const ModelConfig& model_cfg, std::uint64_t seed, std::ostream* log,
                  const std::string& ckpt_dir);

}  // namespace cdrl
