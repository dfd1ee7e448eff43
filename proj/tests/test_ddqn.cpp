#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "cdrl/trainer.hpp"
#include "doctest.h"

using namespace cdrl;

namespace {

// scripted Q-net returning fixed rows, recording incoming gradients
class TableNet : public QNet<float> {
  public:
    TableNet(int actions, std::vector<float> row) : actions_(actions), row_(std::move(row)) {}

    Tensor<float> forward(const Tensor<float>& obs) override {
        const int B = obs.dim(0);
        Tensor<float> q({B, actions_});
        for (int b = 0; b < B; ++b)
            for (int a = 0; a < actions_; ++a) q[b * actions_ + a] = row_[a];
        return q;
    }

    void backward(const Tensor<float>& dq) override { last_dq = dq; }
    std::vector<Param<float>*> params() override { return {}; }
    int num_actions() const override { return actions_; }

    Tensor<float> last_dq;

  private:
    int actions_;
    std::vector<float> row_;
};

ReplayBuffer::Batch one_transition(int a, float r, bool done, int dim = 2) {
    ReplayBuffer::Batch b;
    b.size = 1;
    b.s = Tensor<float>({1, dim});
    b.s_next = Tensor<float>({1, dim});
    b.a = {a};
    b.r = {r};
    b.done = {static_cast<std::uint8_t>(done ? 1 : 0)};
    return b;
}

}  // namespace

TEST_CASE("epsilon schedule hits its anchor points") {
    TrainConfig cfg;
    CHECK(epsilon(0, cfg) == doctest::Approx(1.0));
    CHECK(epsilon(200000, cfg) == doctest::Approx(0.01 + 0.99 * std::exp(-1.0)));
    CHECK(epsilon(100000000, cfg) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK_THROWS_AS(epsilon(-1, cfg), UsageError);
}

TEST_CASE("greedy selection breaks ties toward the lowest index") {
    Tensor<float> q({1, 3}, {2, 2, 1});
    std::mt19937_64 rng(0);
    CHECK(select_action(q, 0.0, rng) == Action::Up);
    CHECK(argmax_row(q.ptr(), 3) == 0);
    CHECK_THROWS_AS(select_action(q, 1.5, rng), UsageError);
}

TEST_CASE("full exploration is uniform within 3 sigma") {
    Tensor<float> q({1, 3}, {9, 0, 0});
    std::mt19937_64 rng(1);
    int counts[3] = {0, 0, 0};
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<int>(select_action(q, 1.0, rng))];
    const double expect = n / 3.0;
    const double sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
    for (int a = 0; a < 3; ++a) CHECK(std::abs(counts[a] - expect) < 3 * sigma);
}

TEST_CASE("double-Q target selects online, evaluates target") {
    TableNet online(2, {1.0f, 2.0f});  // argmax = action 1
    TableNet target(2, {5.0f, 2.0f});  // target's own argmax would be action 0
    auto batch = one_transition(0, 0.0f, false);
    auto y = td_target(batch, 0.99, online, target);
    CHECK(y[0] == doctest::Approx(1.98));  // 0.99 * target[1], not 0.99 * 5
}

TEST_CASE("terminal transitions and gamma zero bootstrap to the reward") {
    TableNet online(2, {1.0f, 2.0f});
    TableNet target(2, {5.0f, 2.0f});
    auto done = one_transition(1, -1.0f, true);
    CHECK(td_target(done, 0.99, online, target)[0] == doctest::Approx(-1.0));
    auto live = one_transition(1, 0.5f, false);
    CHECK(td_target(live, 0.0, online, target)[0] == doctest::Approx(0.5));
    ReplayBuffer::Batch empty;
    CHECK_THROWS_AS(td_target(empty, 0.99, online, target), UsageError);
}

TEST_CASE("td loss is the mean squared error at the taken actions only") {
    TableNet online(2, {1.0f, 3.0f});
    auto batch = one_transition(0, 0.0f, false);
    const std::vector<float> y{1.98f};
    const double loss = td_loss(batch, y, online);
    CHECK(loss == doctest::Approx(0.98 * 0.98));  // 0.9604
    REQUIRE(online.last_dq.numel() == 2);
    CHECK(online.last_dq[0] == doctest::Approx(2.0 * (1.0 - 1.98)));
    CHECK(online.last_dq[1] == 0.0f);  // untaken action carries no gradient
}

TEST_CASE("td loss rejects a non-finite objective") {
    TableNet online(2, {std::numeric_limits<float>::infinity(), 0.0f});
    auto batch = one_transition(0, 0.0f, false);
    CHECK_THROWS_AS(td_loss(batch, {0.0f}, online), NumericError);
}

TEST_CASE("target sync copies a snapshot on schedule") {
    MlpQNet<float> online(2, 4, 2, 1), target(2, 4, 2, 2);
    target.copy_from(online);
    online.params()[0]->value[0] += 1.0f;
    sync_target(online, target, 5, 10);  // not due yet
    CHECK(target.params()[0]->value[0] != online.params()[0]->value[0]);
    sync_target(online, target, 10, 10);
    CHECK(target.params()[0]->value[0] == online.params()[0]->value[0]);
    online.params()[0]->value[0] += 1.0f;  // snapshot, not aliasing
    CHECK(target.params()[0]->value[0] != online.params()[0]->value[0]);
}

TEST_CASE("replay ring overwrites oldest and samples uniformly") {
    ReplayBuffer buf(4);
    for (int i = 0; i < 6; ++i)
        buf.push({static_cast<float>(i) / 255.0f}, i % 3, 0, {0.0f}, false);
    CHECK(buf.size() == 4);
    // slots 0,1 were overwritten by transitions 4,5
    CHECK(buf.at(0).a == 4 % 3);
    CHECK(buf.at(1).a == 5 % 3);
    CHECK(buf.at(2).a == 2);

    std::mt19937_64 rng(2);
    std::vector<int> counts(4, 0);
    const int draws = 12000;
    for (int d = 0; d < draws / 2; ++d)
        for (std::size_t idx : buf.sample_indices(2, rng)) ++counts[idx];
    const double expect = draws / 4.0;
    const double sigma = std::sqrt(draws * 0.25 * 0.75);
    for (int c : counts) CHECK(std::abs(c - expect) < 3 * sigma);
    CHECK_THROWS_AS(buf.sample_indices(5, rng), UsageError);
}

TEST_CASE("replay quantization is exact on the 8-bit grid") {
    ReplayBuffer buf(2);
    std::vector<float> s = {0.0f, 1.0f, 17.0f * (1.0f / 255.0f), 200.0f * (1.0f / 255.0f)};
    buf.push(s, 1, -1, s, true);
    std::mt19937_64 rng(0);
    auto b = buf.sample(1, rng);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(b.s[i] == s[i]);
    CHECK(b.r[0] == -1.0f);
    CHECK(b.done[0] == 1);
}

TEST_CASE("reward tracker seeds on first update then smooths") {
    RewardTracker t(0.5);
    t.update(10);
    CHECK(t.ema == doctest::Approx(10.0));
    t.update(0);
    CHECK(t.ema == doctest::Approx(5.0));
    t.update(1);
    CHECK(t.ema == doctest::Approx(3.0));
    CHECK(t.history.size() == 3);
    CHECK_THROWS_AS(RewardTracker(0.0), ConfigError);
    CHECK_THROWS_AS(RewardTracker(1.5), ConfigError);
}

TEST_CASE("train config validation") {
    TrainConfig cfg;
    cfg.validate();
    cfg.gamma = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.eps_end = 2.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.learning_rate = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

namespace {

EnvConfig tiny_env() {
    EnvConfig env;
    env.field_width = 120;
    env.field_height = 80;
    env.ball_speed_x = 10;
    env.ball_speed_y = 6;
    env.paddle_height = 24;
    env.paddle_width = 6;
    env.paddle_speed = 5;
    env.max_score = 1;
    env.obs_side = 20;
    env.ball_size = 6;
    env.stack_size = 2;
    return env;
}

ModelConfig tiny_model() {
    ModelConfig m;
    m.kind = ModelKind::Cdrl;
    m.in_channels = 2;
    m.obs_side = 20;
    m.convs = {{4, 6, 2}, {4, 3, 1}};
    m.mf_dim = 8;
    m.grc_dim = 32;
    m.fan_in = 4;
    m.pc_count = 2;
    m.pc_conn_fraction = 0.5;
    m.cn_dim = 8;
    m.baseline_hidden1 = 8;
    m.baseline_hidden2 = 8;
    m.gate.num_branches = 4;
    m.gate.grc_dim = 32;
    return m;
}

TrainConfig tiny_train(int episodes) {
    TrainConfig t;
    t.num_episodes = episodes;
    t.batch_size = 8;
    t.memory_size = 256;
    t.learning_rate = 1e-4;
    t.max_episode_steps = 40;
    t.save_every = 0;
    return t;
}

}  // namespace

TEST_CASE("zero episodes is a clean no-op") {
    auto result = train(tiny_env(), tiny_train(0), tiny_model(), 1, nullptr, "");
    CHECK(result.total_steps == 0);
    CHECK(result.episode_rewards.empty());
    CHECK(result.final_checkpoint.empty());
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
    std::ostringstream log_a, log_b;
    auto ra = train(tiny_env(), tiny_train(3), tiny_model(), 7, &log_a, "");
    auto rb = train(tiny_env(), tiny_train(3), tiny_model(), 7, &log_b, "");
    CHECK(log_a.str() == log_b.str());
    CHECK(ra.episode_rewards == rb.episode_rewards);
    CHECK(ra.grad_steps == rb.grad_steps);
    CHECK(ra.grad_steps > 0);

    std::ostringstream log_c;
    train(tiny_env(), tiny_train(3), tiny_model(), 8, &log_c, "");
    CHECK(log_a.str() != log_c.str());
}

TEST_CASE("train log has the documented schema") {
    std::ostringstream log;
    train(tiny_env(), tiny_train(1), tiny_model(), 2, &log, "");
    std::istringstream in(log.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "step,episode,reward,ema_reward,loss,epsilon,global_gain");
    std::string row;
    int rows = 0;
    while (std::getline(in, row)) {
        if (row.empty()) continue;
        CHECK(std::count(row.begin(), row.end(), ',') == 6);
        ++rows;
    }
    CHECK(rows > 0);
}
