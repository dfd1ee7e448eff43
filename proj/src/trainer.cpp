#include "cdrl/trainer.hpp"

#include <filesystem>
#include <fstream>

namespace cdrl {

namespace {

std::string checkpoint_name(const ModelConfig& cfg, std::uint64_t seed, int episode) {
    return to_string(cfg.kind) + "_seed" + std::to_string(seed) + "_ep" +
           std::to_string(episode) + ".ckpt";
}

std::string save_net(QNet<float>& net, const ModelConfig& cfg, const std::string& dir,
                     std::uint64_t seed, int episode) {
    if (dir.empty()) return {};
    std::filesystem::create_directories(dir);
    const std::string path =
        (std::filesystem::path(dir) / checkpoint_name(cfg, seed, episode)).string();
    save_checkpoint(path, net_to_arrays(net, cfg));
    return path;
}

}  // namespace

TrainResult train(const EnvConfig& env_cfg, const TrainConfig& train_cfg,
                  const ModelConfig& model_cfg, std::uint64_t seed, std::ostream* log,
                  const std::string& ckpt_dir) {
    env_cfg.validate();
    train_cfg.validate();
    model_cfg.validate();

    std::mt19937_64 master(seed);
    const std::uint64_t model_seed = master();
    const std::uint64_t env_seed = master();
    std::mt19937_64 action_rng(master());
    std::mt19937_64 sample_rng(master());

    auto online = build_qnet(model_cfg, model_seed);
    auto target = build_qnet(model_cfg, model_seed);
    target->copy_from(*online);
    Adam<float> opt(online->params(), train_cfg.learning_rate);
    ReplayBuffer replay(train_cfg.memory_size);
    PongEnv env(env_cfg, env_seed);
    RewardTracker tracker(train_cfg.ema_alpha);

    if (log) write_log_header(*log);

    TrainResult result;
    long global_step = 0;
    long grad_steps = 0;

    for (int episode = 0; episode < train_cfg.num_episodes; ++episode) {
        Observation obs = env.reset(master());
        double ep_reward = 0;
        long ep_steps = 0;
        double last_loss = 0;
        bool done = false;
        while (!done) {
            const double eps = epsilon(global_step, train_cfg);
            Tensor<float> q = online->forward(obs.as_batch1());
            const Action a = select_action(q, eps, action_rng);

            int r = 0;
            PongEnv::StepResult sr;
            for (int k = 0; k < train_cfg.action_repeat && !done; ++k) {
                sr = env.step(a);
                r += sr.reward;
                done = sr.done;
            }
            replay.push(obs.data, static_cast<int>(a), r, sr.obs.data, done);
            obs = std::move(sr.obs);
            ep_reward += r;

            if (replay.size() >= static_cast<std::size_t>(train_cfg.batch_size) &&
                global_step % train_cfg.train_every == 0) {
                auto batch = replay.sample(train_cfg.batch_size, sample_rng);
                const auto y = td_target(batch, train_cfg.gamma, *online, *target);
                opt.zero_grad();
                try {
                    last_loss = td_loss(batch, y, *online);
                    clip_grad_norm(online->params(), train_cfg.grad_clip);
                    opt.step();
                } catch (const NumericError& e) {
                    throw NumericError(std::string(e.what()) + " at step " +
                                       std::to_string(global_step));
                }
                ++grad_steps;
                sync_target(*online, *target, grad_steps, train_cfg.target_update_freq);
            }

            if (log && global_step % train_cfg.log_every == 0) {
                const double gain =
                    online->gate() ? static_cast<double>(online->gate()->global_gain()) : 1.0;
                (*log) << global_step << ',' << episode << ',' << ep_reward << ','
                       << (tracker.initialized ? tracker.ema : 0.0) << ',' << last_loss << ','
                       << eps << ',' << gain << '\n';
            }
            ++global_step;
            ++ep_steps;
            if (train_cfg.max_episode_steps > 0 && ep_steps >= train_cfg.max_episode_steps)
                break;  // truncation: episode ends, transition stays non-terminal
        }
        tracker.update(ep_reward);
        result.episode_rewards.push_back(ep_reward);
        result.episode_ema.push_back(tracker.ema);
        if (train_cfg.save_every > 0 && (episode + 1) % train_cfg.save_every == 0)
            save_net(*online, model_cfg, ckpt_dir, seed, episode + 1);
    }

    result.total_steps = global_step;
    result.grad_steps = grad_steps;
    result.final_checkpoint =
        save_net(*online, model_cfg, ckpt_dir, seed, train_cfg.num_episodes);
    return result;
}

}  // namespace cdrl
