// End-to-end acceptance gate. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any hard criterion fails. Criteria 1-8 are
// deterministic and fast; 9-11 train at desk scale and dominate the runtime.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cdrl/experiment.hpp"
#include "cdrl/trainer.hpp"

using namespace cdrl;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail,
            bool soft = false) {
    const char* tag = pass ? "PASS" : (soft ? "FLAG" : "FAIL");
    std::printf("%s %2d %s%s%s\n", tag, criterion, name, detail.empty() ? "" : ": ",
                detail.c_str());
    std::fflush(stdout);
    if (!pass && !soft) ++g_failures;
}

ModelConfig mini_model(ModelKind kind) {
    ModelConfig cfg;
    cfg.kind = kind;
    cfg.in_channels = 2;
    cfg.obs_side = 10;
    cfg.convs = {{3, 3, 2}, {4, 3, 1}};
    cfg.mf_dim = 8;
    cfg.grc_dim = 32;
    cfg.fan_in = 4;
    cfg.topk_fraction = 0.25;
    cfg.pc_count = 2;
    cfg.pc_conn_fraction = 0.5;
    cfg.cn_dim = 6;
    cfg.baseline_hidden1 = 12;
    cfg.baseline_hidden2 = 10;
    cfg.gate.num_branches = 4;
    cfg.gate.select_fraction = 0.5;
    cfg.gate.grc_dim = cfg.grc_dim;
    return cfg;
}

// ---- criterion 1: gate identity in the degenerate cases -------------------

void criterion_gate_identity() {
    std::mt19937_64 rng(100);
    std::uniform_real_distribution<float> u(-3, 3);
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        GateConfig cfg;
        cfg.num_branches = 8;
        cfg.grc_dim = 16;
        Tensor<float> G({3, 16});
        for (auto& v : G.data) v = u(rng);

        cfg.gain_strength = 0.0;  // alpha = 0
        DendriticGate<float> zero_alpha(cfg, trial);
        Tensor<float> a = zero_alpha.apply(G);
        ok = ok && std::memcmp(a.ptr(), G.ptr(), G.numel() * sizeof(float)) == 0;

        cfg.gain_strength = 0.5;  // e pinned at the sigmoid midpoint
        DendriticGate<float> mid(cfg, trial);
        mid.ema.fill(0.5f);
        mid.initialized = true;
        Tensor<float> b = mid.modulate(G);
        ok = ok && std::memcmp(b.ptr(), G.ptr(), G.numel() * sizeof(float)) == 0;
    }
    report(1, "gate identity (alpha=0 and e=0.5 are bit-exact)", ok,
           ok ? "100 instances" : "mismatch found");
}

// ---- criterion 2: gain bounds and unit hyperplanes -------------------------

void criterion_gain_bounds() {
    GateConfig cfg;
    cfg.num_branches = 32;
    cfg.grc_dim = 64;
    cfg.gain_strength = 0.5;
    DendriticGate<float> gate(cfg, 101);
    double worst_norm = 0;
    for (int m = 0; m < cfg.num_branches; ++m) {
        double ss = 0;
        for (int d = 0; d < cfg.grc_dim; ++d) {
            const double v = gate.hyperplanes.value[m * cfg.grc_dim + d];
            ss += v * v;
        }
        worst_norm = std::max(worst_norm, std::abs(std::sqrt(ss) - 1.0));
    }
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<float> u(-2, 2);
    float lo = 1, hi = 1;
    for (int trial = 0; trial < 1000; ++trial) {
        Tensor<float> G({4, 64});
        for (auto& v : G.data) v = u(rng);
        gate.apply(G);
        Tensor<float> g = gate.gain();
        for (float v : g.data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const bool ok = lo >= 0.75f && hi <= 1.25f && worst_norm < 1e-6;
    std::ostringstream d;
    d << "gain range [" << lo << ", " << hi << "], max |norm-1| " << worst_norm;
    report(2, "gain bounds and unit hyperplanes", ok, d.str());
}

// ---- criterion 3: top-k cardinality and structural fan-in ------------------

void criterion_topk() {
    ModelConfig cfg = mini_model(ModelKind::CdrlNoDendrite);
    CerebellarNet<float> net(cfg, 103);
    const int K = net.topk();
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<float> u(-1, 1);
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        Tensor<float> mf({1, cfg.mf_dim});
        for (auto& v : mf.data) v = u(rng);
        Tensor<float> h = net.grc_forward(mf);
        // masked positive pre-activations bound the achievable support
        Tensor<float> pre = net.phi().forward(mf);
        int positives = 0;
        for (int d = 0; d < cfg.grc_dim; ++d)
            if (pre[d] > 0 && net.mask().value[d] > 0) ++positives;
        int nnz = 0;
        for (int d = 0; d < cfg.grc_dim; ++d)
            if (h[d] != 0.0f) ++nnz;
        ok = ok && nnz <= K && (positives < K || nnz == K);
    }
    // perturbing MF inputs outside a GrC's receptive field never moves it
    Tensor<float> mf({1, cfg.mf_dim});
    for (auto& v : mf.data) v = u(rng);
    Tensor<float> pre0 = net.phi().forward(mf);
    for (int r = 0; r < cfg.grc_dim && ok; ++r) {
        const int32_t* row = net.phi().indices.data() + r * cfg.fan_in;
        for (int j = 0; j < cfg.mf_dim; ++j) {
            if (std::find(row, row + cfg.fan_in, j) != row + cfg.fan_in) continue;
            Tensor<float> mf2 = mf;
            mf2[j] += 5.0f;
            ok = ok && net.phi().forward(mf2)[r] == pre0[r];
        }
    }
    report(3, "top-k cardinality and fan-in structure", ok,
           "K=" + std::to_string(K) + ", 1000 inputs");
}

// ---- criterion 4: 64-bit gradient check on the miniature pipeline ----------

void criterion_gradcheck() {
    ModelConfig cfg = mini_model(ModelKind::Cdrl);
    CerebellarNet<double> net(cfg, 105);
    Tensor<double> obs({2, cfg.in_channels * cfg.obs_side * cfg.obs_side});
    std::mt19937_64 rng(106);
    std::uniform_real_distribution<double> u(0, 1);
    for (auto& v : obs.data) v = u(rng);
    net.forward(obs);
    net.gate()->freeze_ema = true;

    Tensor<double> q0 = net.forward(obs);
    Tensor<double> w(q0.shape);
    std::uniform_real_distribution<double> uw(-1, 1);
    for (auto& v : w.data) v = uw(rng);
    auto loss = [&]() {
        Tensor<double> q = net.forward(obs);
        double L = 0;
        for (std::size_t i = 0; i < q.numel(); ++i) L += q[i] * w[i];
        return L;
    };
    loss();
    net.zero_grad();
    net.backward(w);

    const double h = 1e-6;
    double worst = 0;
    bool fixed_zero = true;
    for (auto* p : net.params()) {
        if (!p->trainable) {
            for (double g : p->grad.data) fixed_zero = fixed_zero && g == 0.0;
            continue;
        }
        for (std::size_t j = 0; j < p->value.numel(); ++j) {
            const double keep = p->value[j];
            p->value[j] = keep + h;
            const double lp = loss();
            p->value[j] = keep - h;
            const double lm = loss();
            p->value[j] = keep;
            const double fd = (lp - lm) / (2 * h);
            const double rel = std::abs(p->grad[j] - fd) /
                               std::max({std::abs(p->grad[j]), std::abs(fd), 1e-6});
            worst = std::max(worst, rel);
        }
    }
    const bool ok = worst < 1e-4 && fixed_zero;
    std::ostringstream d;
    d << "max rel err " << worst << ", fixed structures zero-grad: " << (fixed_zero ? "yes" : "no");
    report(4, "analytic vs finite-difference gradients", ok, d.str());
}

// ---- criterion 5: DDQN solves a 2-state toy MDP -----------------------------

struct ToyMdp {
    // s0: stay (r=0) or hop to s1 (r=1); s1: stay (r=2) or hop back (r=0)
    static void step(int s, int a, int& s2, int& r) {
        if (s == 0) {
            s2 = a == 0 ? 0 : 1;
            r = a == 0 ? 0 : 1;
        } else {
            s2 = a == 0 ? 1 : 0;
            r = a == 0 ? 2 : 0;
        }
    }
    static std::vector<double> q_star(double gamma) {
        double v0 = 0, v1 = 0;
        for (int it = 0; it < 2000; ++it) {
            const double q00 = 0 + gamma * v0, q01 = 1 + gamma * v1;
            const double q10 = 2 + gamma * v1, q11 = 0 + gamma * v0;
            v0 = std::max(q00, q01);
            v1 = std::max(q10, q11);
        }
        return {gamma * v0, 1 + gamma * v1, 2 + gamma * v1, gamma * v0};
    }
};

void criterion_toy_mdp() {
    const double gamma = 0.9;
    const auto q_star = ToyMdp::q_star(gamma);

    MlpQNet<float> online(2, 32, 2, 107), target(2, 32, 2, 107);
    target.copy_from(online);
    Adam<float> opt(online.params(), 5e-3);
    ReplayBuffer replay(512);
    std::mt19937_64 rng(108);

    auto one_hot = [](int s) { return std::vector<float>{s == 0 ? 1.0f : 0.0f,
                                                         s == 1 ? 1.0f : 0.0f}; };
    int s = 0;
    long steps_used = 0;
    double err = 1e9;
    for (long step = 1; step <= 50000; ++step) {
        const int a = static_cast<int>(rng() % 2);
        int s2 = 0, r = 0;
        ToyMdp::step(s, a, s2, r);
        replay.push(one_hot(s), a, r, one_hot(s2), false);
        s = s2;
        if (replay.size() >= 32) {
            auto batch = replay.sample(32, rng);
            const auto y = td_target(batch, gamma, online, target);
            opt.zero_grad();
            td_loss(batch, y, online);
            opt.step();
            sync_target(online, target, opt.step_count(), 100);
        }
        if (step % 500 == 0) {
            err = 0;
            for (int si = 0; si < 2; ++si) {
                Tensor<float> q = online.forward(Tensor<float>({1, 2}, one_hot(si)));
                err = std::max(err, std::abs(q[0] - q_star[si * 2 + 0]));
                err = std::max(err, std::abs(q[1] - q_star[si * 2 + 1]));
            }
            if (err < 1e-2) {
                steps_used = step;
                break;
            }
        }
    }
    const bool ok = err < 1e-2;
    std::ostringstream d;
    d << "max |Q - Q*| " << err << (ok ? " after " + std::to_string(steps_used) + " steps"
                                       : " after 50000 steps");
    report(5, "DDQN matches value iteration on the toy MDP", ok, d.str());
}

// ---- criterion 6: environment determinism across processes -----------------

EnvConfig determinism_env() {
    EnvConfig env;
    env.field_width = 240;
    env.field_height = 180;
    env.paddle_height = 45;
    env.paddle_width = 8;
    env.paddle_speed = 10;
    env.opp_paddle_height = 60;
    env.opp_paddle_speed = 5;
    env.max_score = 2;
    env.obs_side = 42;
    env.ball_size = 12;
    return env;
}

std::string trajectory_digest() {
    PongEnv env(determinism_env(), 7);
    std::ostringstream os;
    os.precision(17);
    long reward_mismatch = 0;
    for (int ep = 0; ep < 3; ++ep) {
        env.reset(1000 + ep);
        bool done = false;
        long t = 0, total = 0;
        while (!done) {
            auto r = env.step(static_cast<Action>(t % 3));
            total += r.reward;
            done = r.done;
            const auto& s = env.state();
            os << s.ball_x << ',' << s.ball_y << ',' << s.left_paddle_y << ','
               << s.right_paddle_y << ',' << r.reward << ';';
            ++t;
        }
        if (total != env.state().score_left - env.state().score_right) ++reward_mismatch;
        os << '|';
    }
    // fold the trajectory into a short digest
    std::hash<std::string> hasher;
    std::ostringstream out;
    out << std::hex << hasher(os.str()) << " reward_mismatch=" << reward_mismatch;
    return out.str();
}

void criterion_determinism(const char* self) {
    std::string runs[2];
    bool spawned = true;
    for (int i = 0; i < 2 && spawned; ++i) {
        const std::string cmd = std::string(self) + " --trajectory";
        FILE* pipe = popen(cmd.c_str(), "r");
        if (!pipe) {
            spawned = false;
            break;
        }
        char buf[256];
        while (fgets(buf, sizeof(buf), pipe)) runs[i] += buf;
        if (pclose(pipe) != 0) spawned = false;
    }
    const bool ok = spawned && !runs[0].empty() && runs[0] == runs[1] &&
                    runs[0].find("reward_mismatch=0") != std::string::npos;
    report(6, "trajectories bit-identical across two processes", ok,
           spawned ? "3 scripted episodes, reward sum = score differential"
                   : "could not spawn child process");
}

// ---- criterion 7: noise calibration ----------------------------------------

void criterion_noise_calibration() {
    std::mt19937_64 rng(109);
    const int n = 10000;
    Observation o;
    o.stack = 1;
    o.side = 100;
    o.data.assign(n, 0.0f);
    Observation noisy = add_obs_noise(o, 2.0, rng);
    double mean = 0;
    for (float v : noisy.data) mean += v;
    mean /= n;
    double ss = 0;
    for (float v : noisy.data) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    const bool obs_ok = std::abs(sd - 2.0) < 3 * 2.0 / std::sqrt(2.0 * n);

    int changed = 0;
    for (int i = 0; i < n; ++i)
        if (perturb_action(Action::Up, 0.3, rng) != Action::Up) ++changed;
    const double p_eff = 0.3 * 2.0 / 3.0;  // uniform redraw can repeat the action
    const bool act_ok = std::abs(changed - n * p_eff) < 3 * std::sqrt(n * p_eff * (1 - p_eff));

    int stuck = 0;
    for (int i = 0; i < n; ++i)
        if (sticky_action(Action::Up, Action::Down, 0.25, rng) == Action::Down) ++stuck;
    const bool sticky_ok = std::abs(stuck - n * 0.25) < 3 * std::sqrt(n * 0.25 * 0.75);

    std::ostringstream d;
    d << "obs sd " << sd << ", act rate " << changed / double(n) << ", sticky rate "
      << stuck / double(n);
    report(7, "noise calibration within 3 sigma of nominal", obs_ok && act_ok && sticky_ok,
           d.str());
}

// ---- criterion 8: parameter budgets ----------------------------------------

void criterion_param_counts() {
    long nb = 0, nc = 0;
    {
        ModelConfig base;
        base.kind = ModelKind::Baseline;
        BaselineNet<float> baseline(base, 0);
        nb = param_count(baseline).trainable;
    }
    {
        ModelConfig cd;
        cd.kind = ModelKind::Cdrl;
        CerebellarNet<float> cdrl(cd, 0);
        nc = param_count(cdrl).trainable;
    }
    const double ratio = static_cast<double>(nc) / nb;
    const bool ok = std::abs(nb - 13e6) <= 0.15 * 13e6 && std::abs(nc - 6e6) <= 0.15 * 6e6 &&
                    ratio < 0.6;
    std::ostringstream d;
    d << "baseline " << nb << ", cdrl " << nc << ", ratio " << ratio;
    report(8, "trainable parameter budgets (13M / 6M / <0.6)", ok, d.str());
}

// ---- desk-scale profile ------------------------------------------------------

EnvConfig desk_env() {
    EnvConfig env;
    env.field_width = 240;
    env.field_height = 180;
    env.ball_speed_x = 12;
    env.ball_speed_y = 8;
    env.paddle_height = 45;
    env.paddle_width = 8;
    env.paddle_speed = 10;
    env.opp_paddle_height = 60;
    env.opp_paddle_speed = 5;
    env.max_score = 5;
    env.obs_side = 42;
    env.ball_size = 12;
    env.stack_size = 4;
    return env;
}

ModelConfig desk_model(ModelKind kind) {
    ModelConfig m;
    m.kind = kind;
    m.in_channels = 4;
    m.obs_side = 42;
    m.convs = {{16, 8, 4}, {32, 4, 2}};
    m.mf_dim = 64;
    m.grc_dim = 512;
    m.fan_in = 5;
    m.topk_fraction = 0.05;
    m.pc_count = 16;
    m.pc_conn_fraction = 0.25;
    m.cn_dim = 128;
    m.baseline_hidden1 = 256;
    m.baseline_hidden2 = 256;
    m.gate.grc_dim = m.grc_dim;
    return m;
}

TrainConfig desk_train() {
    TrainConfig t;
    t.num_episodes = 300;
    t.batch_size = 32;
    t.learning_rate = 2.5e-4;
    t.eps_decay = 3000;
    t.eps_end = 0.05;
    t.target_update_freq = 250;
    t.memory_size = 20000;
    t.train_every = 2;
    t.max_episode_steps = 400;
    t.save_every = 0;
    t.log_every = 1000000;  // training CSVs are not needed here
    return t;
}

struct DeskRun {
    double ema_gain = 0;   // mean over seeds
    double win_gain = 0;   // trained minus random-init win rate, mean over seeds
    std::vector<std::string> checkpoints;
};

DeskRun desk_train_model(ModelKind kind, const std::vector<std::uint64_t>& seeds,
                         const std::string& ckpt_dir) {
    const EnvConfig env = desk_env();
    const TrainConfig tcfg = desk_train();
    const ModelConfig mcfg = desk_model(kind);
    EvalOptions opts;
    opts.episodes = 50;
    opts.max_episode_steps = 5000;

    DeskRun out;
    for (std::uint64_t seed : seeds) {
        TrainResult r = train(env, tcfg, mcfg, seed, nullptr, ckpt_dir);
        const auto& ema = r.episode_ema;
        double first = 0, last = 0;
        for (int i = 0; i < 20; ++i) {
            first += ema[i];
            last += ema[ema.size() - 20 + i];
        }
        out.ema_gain += (last - first) / 20.0;

        auto trained = net_from_arrays(load_checkpoint(r.final_checkpoint));
        EvalReport tr = evaluate(*trained, env, NoiseSpec{}, opts, {seed});
        auto fresh = build_qnet(mcfg, seed * 7919 + 5);
        EvalReport rnd = evaluate(*fresh, env, NoiseSpec{}, opts, {seed});
        out.win_gain += tr.win_rates[0] - rnd.win_rates[0];
        out.checkpoints.push_back(r.final_checkpoint);
        std::printf("  .. %s seed %llu: ema %+0.2f -> %+0.2f, win %.2f (random %.2f)\n",
                    to_string(kind).c_str(), static_cast<unsigned long long>(seed), first / 20.0,
                    last / 20.0, tr.win_rates[0], rnd.win_rates[0]);
        std::fflush(stdout);
    }
    out.ema_gain /= static_cast<double>(seeds.size());
    out.win_gain /= static_cast<double>(seeds.size());
    return out;
}

double mean_win_at(const std::vector<std::string>& ckpts, const NoiseSpec& noise,
                   const std::vector<std::uint64_t>& seeds) {
    EvalOptions opts;
    opts.episodes = 50;
    opts.max_episode_steps = 5000;
    double acc = 0;
    for (std::size_t i = 0; i < ckpts.size(); ++i) {
        auto net = net_from_arrays(load_checkpoint(ckpts[i]));
        EvalReport r = evaluate(*net, desk_env(), noise, opts, {seeds[i]});
        acc += r.win_rates[0];
    }
    return acc / static_cast<double>(ckpts.size());
}

void criteria_desk(const std::string& work_dir) {
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    fs::create_directories(work_dir);

    DeskRun baseline = desk_train_model(ModelKind::Baseline, seeds, work_dir + "/baseline");
    DeskRun nod = desk_train_model(ModelKind::CdrlNoDendrite, seeds, work_dir + "/nod");
    DeskRun cdrl = desk_train_model(ModelKind::Cdrl, seeds, work_dir + "/cdrl");

    // 9: every model must show a learning signal
    bool ok9 = true;
    std::ostringstream d9;
    for (auto [name, run] : {std::pair<const char*, DeskRun*>{"baseline", &baseline},
                             {"cdrl_no_dendrite", &nod},
                             {"cdrl", &cdrl}}) {
        ok9 = ok9 && run->ema_gain >= 3.0 && run->win_gain >= 0.2;
        d9 << name << " ema+" << run->ema_gain << " win+" << run->win_gain << "  ";
    }
    report(9, "learning signal across all three models", ok9, d9.str());

    // 10: soft trend check under moderate observation noise
    bool ok10 = true;
    std::ostringstream d10;
    for (double sigma : {2.0, 3.0}) {
        NoiseSpec noise;
        noise.obs_sigma = sigma;
        const double wc = mean_win_at(cdrl.checkpoints, noise, seeds);
        const double wb = mean_win_at(baseline.checkpoints, noise, seeds);
        ok10 = ok10 && wc >= wb;
        d10 << "sigma " << sigma << ": cdrl " << wc << " vs baseline " << wb << "  ";
    }
    report(10, "noise-robustness trend (report-only)", ok10,
           d10.str() + (ok10 ? "" : "[flagged regression]"), /*soft=*/true);

    // 11: the full reporting pipeline on a minimal budget
    bool ok11 = true;
    std::string detail11;
    try {
        ExperimentSpec spec;
        spec.env = desk_env();
        spec.model = desk_model(ModelKind::Cdrl);
        spec.eval.episodes = 5;
        spec.eval.max_episode_steps = 2000;
        spec.seeds = {1};
        spec.checkpoints = {"cdrl=" + cdrl.checkpoints[0], "baseline=" + baseline.checkpoints[0]};

        spec.command = "grid";
        spec.out_dir = work_dir + "/grid";
        const std::string grid_dir = run_experiment(spec);
        spec.command = "generalize";
        spec.out_dir = work_dir + "/gen";
        const std::string gen_dir = run_experiment(spec);

        auto count_rows = [](const std::string& path, const std::string& header) {
            std::ifstream in(path);
            if (!in) throw ConfigError("missing " + path);
            std::string line;
            std::getline(in, line);
            if (line != header) throw ConfigError("bad header in " + path + ": " + line);
            int rows = 0;
            while (std::getline(in, line))
                if (!line.empty()) ++rows;
            return rows;
        };
        const int grid_rows = count_rows(grid_dir + "/reports/robustness.csv",
                                         "obs_sigma,act_prob,model,seed,win_rate,mean_reward");
        const int gen_rows = count_rows(gen_dir + "/reports/generalization.csv",
                                        "test_id,model,seed,win_rate,mean_reward");
        int matrix_lines = 0;
        {
            std::ifstream in(grid_dir + "/reports/matrix_cdrl.csv");
            std::string line;
            while (std::getline(in, line))
                if (!line.empty()) ++matrix_lines;
        }
        const bool diff_exists =
            fs::exists(grid_dir + "/reports/matrix_cdrl_minus_baseline.csv");
        ok11 = grid_rows == 72 && gen_rows == 16 && matrix_lines == 7 && diff_exists;
        std::ostringstream d;
        d << "grid rows " << grid_rows << "/72, generalization rows " << gen_rows
          << "/16, matrix lines " << matrix_lines << "/7, diff matrix "
          << (diff_exists ? "yes" : "no");
        detail11 = d.str();
    } catch (const std::exception& e) {
        ok11 = false;
        detail11 = e.what();
    }
    report(11, "robustness grid and generalization sweep plumbing", ok11, detail11);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1 && std::string(argv[1]) == "--trajectory") {
        std::printf("%s\n", trajectory_digest().c_str());
        return 0;
    }
    const bool fast_only = argc > 1 && std::string(argv[1]) == "--fast";

    criterion_gate_identity();
    criterion_gain_bounds();
    criterion_topk();
    criterion_gradcheck();
    criterion_toy_mdp();
    criterion_determinism(argv[0]);
    criterion_noise_calibration();
    criterion_param_counts();

    if (!fast_only) {
        const std::string work_dir =
            (fs::temp_directory_path() / "cdrl_acceptance").string();
        fs::remove_all(work_dir);
        criteria_desk(work_dir);
    }

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
