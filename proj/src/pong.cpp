#include "cdrl/pong.hpp"

#include <algorithm>
#include <cmath>

namespace cdrl {

void EnvConfig::validate() const {
    auto fail = [](const char* field) {
        throw ConfigError(std::string("env config: invalid ") + field);
    };
    if (field_width <= 0) fail("field_width");
    if (field_height <= 0) fail("field_height");
    if (ball_speed_x <= 0) fail("ball_speed_x");
    if (ball_speed_y <= 0) fail("ball_speed_y");
    if (paddle_speed <= 0) fail("paddle_speed");
    if (paddle_height <= 0 || paddle_height >= field_height) fail("paddle_height");
    if (opp_paddle_height < 0 || opp_height() >= field_height) fail("opp_paddle_height");
    if (opp_paddle_speed < 0) fail("opp_paddle_speed");
    if (paddle_width <= 0 || paddle_width * 2 >= field_width) fail("paddle_width");
    if (max_score < 1) fail("max_score");
    if (stack_size < 1) fail("stack_size");
    if (obs_side < 1) fail("obs_side");
    if (ball_size < 1) fail("ball_size");
    if (frame_skip_fps < 1) fail("frame_skip_fps");
}

namespace {

// Adds one axis-aligned rectangle's exact coverage to the downsampled frame.
void add_rect(std::vector<float>& frame, const EnvConfig& cfg, double x0, double y0, double x1,
              double y1) {
    x0 = std::max(0.0, x0);
    y0 = std::max(0.0, y0);
    x1 = std::min(static_cast<double>(cfg.field_width), x1);
    y1 = std::min(static_cast<double>(cfg.field_height), y1);
    if (x1 <= x0 || y1 <= y0) return;
    const double sx = static_cast<double>(cfg.field_width) / cfg.obs_side;
    const double sy = static_cast<double>(cfg.field_height) / cfg.obs_side;
    const int j0 = std::max(0, static_cast<int>(std::floor(x0 / sx)));
    const int j1 = std::min(cfg.obs_side - 1, static_cast<int>(std::ceil(x1 / sx)) - 1);
    const int i0 = std::max(0, static_cast<int>(std::floor(y0 / sy)));
    const int i1 = std::min(cfg.obs_side - 1, static_cast<int>(std::ceil(y1 / sy)) - 1);
    for (int i = i0; i <= i1; ++i) {
        const double oy = std::min(y1, (i + 1) * sy) - std::max(y0, i * sy);
        if (oy <= 0) continue;
        for (int j = j0; j <= j1; ++j) {
            const double ox = std::min(x1, (j + 1) * sx) - std::max(x0, j * sx);
            if (ox <= 0) continue;
            float& px = frame[static_cast<std::size_t>(i) * cfg.obs_side + j];
            px = std::min(1.0f, px + static_cast<float>((ox * oy) / (sx * sy)));
        }
    }
}

}  // namespace

std::vector<float> render_frame(const EnvConfig& cfg, double ball_x, double ball_y,
                                double left_paddle_y, double right_paddle_y) {
    std::vector<float> frame(static_cast<std::size_t>(cfg.obs_side) * cfg.obs_side, 0.0f);
    add_rect(frame, cfg, 0, left_paddle_y, cfg.paddle_width, left_paddle_y + cfg.paddle_height);
    add_rect(frame, cfg, cfg.field_width - cfg.paddle_width, right_paddle_y, cfg.field_width,
             right_paddle_y + cfg.opp_height());
    const double hb = cfg.ball_size / 2.0;
    add_rect(frame, cfg, ball_x - hb, ball_y - hb, ball_x + hb, ball_y + hb);
    return frame;
}

PongEnv::PongEnv(EnvConfig cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    reset(seed);
}

void PongEnv::serve(int toward) {
    state_.ball_x = cfg_.field_width / 2.0;
    state_.ball_y = cfg_.field_height / 2.0;
    state_.ball_vx = toward * cfg_.ball_speed_x;
    const int up = static_cast<int>(state_.rng() & 1u);
    state_.ball_vy = (up ? -1 : 1) * cfg_.ball_speed_y;
}

Observation PongEnv::reset(std::uint64_t seed) {
    state_ = EnvState{};
    state_.rng.seed(seed);
    state_.left_paddle_y = (cfg_.field_height - cfg_.paddle_height) / 2.0;
    state_.right_paddle_y = (cfg_.field_height - cfg_.opp_height()) / 2.0;
    serve(-1);  // opening serve toward the agent
    frames_.clear();
    auto frame = rasterize();
    for (int i = 0; i < cfg_.stack_size; ++i) frames_.push_back(frame);
    return observation();
}

PongEnv::StepResult PongEnv::step(Action a) {
    if (done()) throw UsageError("pong step: episode is terminal");
    const double H = cfg_.field_height;
    const double W = cfg_.field_width;

    // agent paddle
    if (a == Action::Up)
        state_.left_paddle_y -= cfg_.paddle_speed;
    else if (a == Action::Down)
        state_.left_paddle_y += cfg_.paddle_speed;
    state_.left_paddle_y = std::clamp(state_.left_paddle_y, 0.0, H - cfg_.paddle_height);

    // opponent tracks the ball with a dead-zone to avoid oscillation
    const double opp_center = state_.right_paddle_y + cfg_.opp_height() / 2.0;
    const double dead_zone = cfg_.opp_height() / 4.0;
    if (state_.ball_y < opp_center - dead_zone)
        state_.right_paddle_y -= cfg_.opp_speed();
    else if (state_.ball_y > opp_center + dead_zone)
        state_.right_paddle_y += cfg_.opp_speed();
    state_.right_paddle_y = std::clamp(state_.right_paddle_y, 0.0, H - cfg_.opp_height());

    // ball advance + wall reflection (ball center stays in [0, H])
    const double prev_x = state_.ball_x;
    state_.ball_x += state_.ball_vx;
    state_.ball_y += state_.ball_vy;
    if (state_.ball_y < 0) {
        state_.ball_y = -state_.ball_y;
        state_.ball_vy = -state_.ball_vy;
    } else if (state_.ball_y > H) {
        state_.ball_y = 2 * H - state_.ball_y;
        state_.ball_vy = -state_.ball_vy;
    }

    // paddle faces: swept crossing test, vertical overlap at arrival
    const double hb = cfg_.ball_size / 2.0;
    const double left_face = cfg_.paddle_width;
    const double right_face = W - cfg_.paddle_width;
    if (state_.ball_vx < 0 && prev_x >= left_face && state_.ball_x <= left_face) {
        if (state_.ball_y + hb >= state_.left_paddle_y &&
            state_.ball_y - hb <= state_.left_paddle_y + cfg_.paddle_height) {
            state_.ball_x = 2 * left_face - state_.ball_x;
            state_.ball_vx = -state_.ball_vx;
        }
    } else if (state_.ball_vx > 0 && prev_x <= right_face && state_.ball_x >= right_face) {
        if (state_.ball_y + hb >= state_.right_paddle_y &&
            state_.ball_y - hb <= state_.right_paddle_y + cfg_.opp_height()) {
            state_.ball_x = 2 * right_face - state_.ball_x;
            state_.ball_vx = -state_.ball_vx;
        }
    }

    // scoring: ball past a goal line; serve toward whoever conceded
    int reward = 0;
    if (state_.ball_x <= 0) {
        ++state_.score_right;
        reward = -1;
        serve(-1);
    } else if (state_.ball_x >= W) {
        ++state_.score_left;
        reward = +1;
        serve(+1);
    }

    ++state_.step_count;
    push_frame();
    return StepResult{observation(), reward, done()};
}

std::vector<float> PongEnv::rasterize() const {
    return render_frame(cfg_, state_.ball_x, state_.ball_y, state_.left_paddle_y,
                        state_.right_paddle_y);
}

void PongEnv::push_frame() {
    frames_.push_back(rasterize());
    while (static_cast<int>(frames_.size()) > cfg_.stack_size) frames_.pop_front();
}

Observation PongEnv::observation() const {
    Observation obs;
    obs.stack = cfg_.stack_size;
    obs.side = cfg_.obs_side;
    obs.data.reserve(static_cast<std::size_t>(cfg_.stack_size) * cfg_.obs_side * cfg_.obs_side);
    for (const auto& f : frames_) obs.data.insert(obs.data.end(), f.begin(), f.end());
    return obs;
}

}  // namespace cdrl
