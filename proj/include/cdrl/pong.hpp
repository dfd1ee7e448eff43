#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "cdrl/tensor.hpp"

namespace cdrl {

enum class Action : int { Up = 0, Down = 1, NoOp = 2 };
inline constexpr int kNumActions = 3;

// Physics parameters for the headless two-paddle Pong field.
// Pixel values interpret against a 640x480 native canvas by default.
struct EnvConfig {
    int field_width = 640;
    int field_height = 480;
    double ball_speed_x = 12;
    double ball_speed_y = 8;
    int paddle_height = 80;  // agent paddle
    int paddle_width = 10;
    double paddle_speed = 5;  // agent paddle
    int opp_paddle_height = 0;   // 0 = same as paddle_height
    double opp_paddle_speed = 0; // 0 = same as paddle_speed
    int max_score = 21;
    int frame_skip_fps = 1920;  // headless simulation-rate cap; never throttles
    int stack_size = 4;
    int obs_side = 84;
    int ball_size = 10;
    std::uint64_t rng_seed = 0;

    int opp_height() const { return opp_paddle_height > 0 ? opp_paddle_height : paddle_height; }
    double opp_speed() const { return opp_paddle_speed > 0 ? opp_paddle_speed : paddle_speed; }

    void validate() const;
};

// Frame stack fed to the network; oldest frame first, values in [0,1]
// (before any evaluation-time noise).
struct Observation {
    int stack = 0;
    int side = 0;
    std::vector<float> data;  // stack * side * side

    std::size_t numel() const { return data.size(); }
    Tensor<float> as_batch1() const {
        return Tensor<float>({1, static_cast<int>(data.size())}, data);
    }
};

struct EnvState {
    double ball_x = 0, ball_y = 0;
    double ball_vx = 0, ball_vy = 0;
    double left_paddle_y = 0;   // agent
    double right_paddle_y = 0;  // opponent
    int score_left = 0, score_right = 0;
    long step_count = 0;
    std::mt19937_64 rng;
};

// Draws ball and both paddles as intensity-1 rectangles on the native
// canvas, area-averaged down to obs_side x obs_side.
std::vector<float> render_frame(const EnvConfig& cfg, double ball_x, double ball_y,
                                double left_paddle_y, double right_paddle_y);

class PongEnv {
  public:
    struct StepResult {
        Observation obs;
        int reward = 0;
        bool done = false;
    };

    PongEnv(EnvConfig cfg, std::uint64_t seed);

    Observation reset(std::uint64_t seed);
    StepResult step(Action a);

    bool done() const {
        return state_.score_left >= cfg_.max_score || state_.score_right >= cfg_.max_score;
    }
    const EnvState& state() const { return state_; }
    EnvState& mutable_state() { return state_; }
    const EnvConfig& config() const { return cfg_; }
    Observation observation() const;
    std::vector<float> rasterize() const;

  private:
    void push_frame();
    void serve(int toward);  // -1 toward agent, +1 toward opponent

    EnvConfig cfg_;
    EnvState state_;
    std::deque<std::vector<float>> frames_;
};

}  // namespace cdrl
