#include "cdrl/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cdrl {

namespace {

struct KeyEntry {
    const char* type;  // "int", "float", "bool", "string", "list"
    std::function<void(ExperimentSpec&, const std::string&)> set;
    std::function<std::string(const ExperimentSpec&)> get;
};

long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("config key '" + key + "': expected int, got '" + v + "'");
    }
}

double parse_float(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("config key '" + key + "': expected float, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': expected bool (on/off), got '" + v + "'");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

#define INT_KEY(name, field)                                                             \
    {name,                                                                               \
     {"int", [](ExperimentSpec& s, const std::string& v) {                               \
          s.field = static_cast<decltype(s.field)>(parse_int(name, v));                  \
      },                                                                                 \
      [](const ExperimentSpec& s) { return std::to_string(s.field); }}}

#define FLOAT_KEY(name, field)                                                           \
    {name,                                                                               \
     {"float",                                                                           \
      [](ExperimentSpec& s, const std::string& v) { s.field = parse_float(name, v); },   \
      [](const ExperimentSpec& s) { return fmt(s.field); }}}

const std::map<std::string, KeyEntry>& registry() {
    static const std::map<std::string, KeyEntry> table = {
        // environment (Pong physics / observation)
        INT_KEY("env.field_width", env.field_width),
        INT_KEY("env.field_height", env.field_height),
        FLOAT_KEY("env.ball_speed_x", env.ball_speed_x),
        FLOAT_KEY("env.ball_speed_y", env.ball_speed_y),
        INT_KEY("env.paddle_height", env.paddle_height),
        INT_KEY("env.paddle_width", env.paddle_width),
        FLOAT_KEY("env.paddle_speed", env.paddle_speed),
        INT_KEY("env.opp_paddle_height", env.opp_paddle_height),
        FLOAT_KEY("env.opp_paddle_speed", env.opp_paddle_speed),
        INT_KEY("env.max_score", env.max_score),
        INT_KEY("env.fps", env.frame_skip_fps),
        INT_KEY("env.stack_size", env.stack_size),
        INT_KEY("env.obs_side", env.obs_side),
        INT_KEY("env.ball_size", env.ball_size),
        // training
        FLOAT_KEY("train.gamma", train.gamma),
        INT_KEY("train.batch_size", train.batch_size),
        INT_KEY("train.num_episodes", train.num_episodes),
        FLOAT_KEY("train.eps_start", train.eps_start),
        FLOAT_KEY("train.eps_end", train.eps_end),
        FLOAT_KEY("train.eps_decay", train.eps_decay),
        INT_KEY("train.target_update_freq", train.target_update_freq),
        FLOAT_KEY("train.learning_rate", train.learning_rate),
        INT_KEY("train.memory_size", train.memory_size),
        INT_KEY("train.save_every", train.save_every),
        FLOAT_KEY("train.grad_clip", train.grad_clip),
        FLOAT_KEY("train.ema_alpha", train.ema_alpha),
        INT_KEY("train.action_repeat", train.action_repeat),
        INT_KEY("train.train_every", train.train_every),
        INT_KEY("train.max_episode_steps", train.max_episode_steps),
        INT_KEY("train.log_every", train.log_every),
        // model
        {"model.kind",
         {"string",
          [](ExperimentSpec& s, const std::string& v) { s.model.kind = model_kind_from(v); },
          [](const ExperimentSpec& s) { return to_string(s.model.kind); }}},
        {"model.convs",
         {"list",
          [](ExperimentSpec& s, const std::string& v) {
              std::vector<ConvSpec> convs;
              std::stringstream ss(v);
              std::string item;
              while (std::getline(ss, item, ',')) {
                  if (item.empty()) continue;
                  ConvSpec spec{};
                  char a = 0, b = 0;
                  std::istringstream is(item);
                  if (!(is >> spec.out_c >> a >> spec.k >> b >> spec.stride) || a != ':' ||
                      b != ':' || spec.out_c < 1 || spec.k < 1 || spec.stride < 1)
                      throw ConfigError(
                          "config key 'model.convs': expected outc:k:stride entries, got '" + v +
                          "'");
                  convs.push_back(spec);
              }
              if (convs.empty())
                  throw ConfigError("config key 'model.convs': empty layer list");
              s.model.convs = std::move(convs);
          },
          [](const ExperimentSpec& s) {
              std::string out;
              for (const auto& c : s.model.convs)
                  out += (out.empty() ? "" : ",") + std::to_string(c.out_c) + ":" +
                         std::to_string(c.k) + ":" + std::to_string(c.stride);
              return out;
          }}},
        INT_KEY("model.mf_dim", model.mf_dim),
        INT_KEY("model.grc_dim", model.grc_dim),
        INT_KEY("model.fan_in", model.fan_in),
        FLOAT_KEY("model.mask_p", model.mask_p),
        FLOAT_KEY("model.topk_fraction", model.topk_fraction),
        INT_KEY("model.pc_count", model.pc_count),
        FLOAT_KEY("model.pc_conn_fraction", model.pc_conn_fraction),
        INT_KEY("model.cn_dim", model.cn_dim),
        FLOAT_KEY("model.alpha_pc_init", model.alpha_pc_init),
        INT_KEY("model.baseline_hidden1", model.baseline_hidden1),
        INT_KEY("model.baseline_hidden2", model.baseline_hidden2),
        // dendritic gate
        INT_KEY("gate.num_branches", model.gate.num_branches),
        FLOAT_KEY("gate.select_fraction", model.gate.select_fraction),
        FLOAT_KEY("gate.sigmoid_temp", model.gate.sigmoid_temp),
        FLOAT_KEY("gate.ema_decay", model.gate.ema_decay),
        FLOAT_KEY("gate.gain_strength", model.gate.gain_strength),
        // evaluation
        INT_KEY("eval.episodes", eval.episodes),
        INT_KEY("eval.max_episode_steps", eval.max_episode_steps),
        FLOAT_KEY("noise.obs_sigma", noise.obs_sigma),
        FLOAT_KEY("noise.act_prob", noise.act_prob),
        FLOAT_KEY("noise.sticky_prob", noise.sticky_prob),
        INT_KEY("noise.seed", noise.noise_seed),
        // run orchestration
        {"run.seeds",
         {"list",
          [](ExperimentSpec& s, const std::string& v) { s.seeds = parse_seed_list(v); },
          [](const ExperimentSpec& s) {
              std::string out;
              for (auto x : s.seeds) out += (out.empty() ? "" : ",") + std::to_string(x);
              return out;
          }}},
        {"run.out_dir",
         {"string", [](ExperimentSpec& s, const std::string& v) { s.out_dir = v; },
          [](const ExperimentSpec& s) { return s.out_dir; }}},
        {"sweep.axis",
         {"string", [](ExperimentSpec& s, const std::string& v) { s.sweep_axis = v; },
          [](const ExperimentSpec& s) { return s.sweep_axis; }}},
        {"sweep.values",
         {"list",
          [](ExperimentSpec& s, const std::string& v) {
              s.sweep_values.clear();
              std::stringstream ss(v);
              std::string item;
              while (std::getline(ss, item, ','))
                  if (!item.empty()) s.sweep_values.push_back(parse_float("sweep.values", item));
          },
          [](const ExperimentSpec& s) {
              std::string out;
              for (double x : s.sweep_values) out += (out.empty() ? "" : ",") + fmt(x);
              return out;
          }}},
    };
    return table;
}

#undef INT_KEY
#undef FLOAT_KEY

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                               prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string closest_key(const std::string& key) {
    std::string best;
    std::size_t best_d = static_cast<std::size_t>(-1);
    for (const auto& [name, entry] : registry()) {
        (void)entry;
        // compare against the full key and its bare suffix
        const std::size_t d_full = edit_distance(key, name);
        const std::string suffix = name.substr(name.find('.') + 1);
        const std::size_t d = std::min(d_full, edit_distance(key, suffix));
        if (d < best_d) {
            best_d = d;
            best = name;
        }
    }
    return best;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(static_cast<std::uint64_t>(parse_int("seeds", item)));
    if (out.empty()) throw ConfigError("seeds: empty list");
    return out;
}

void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
    const auto& table = registry();
    auto it = table.find(key);
    if (it == table.end())
        throw ConfigError("unknown config key '" + key + "' (did you mean '" +
                          closest_key(key) + "'?)");
    it->second.set(spec, value);
}

void apply_config_file(ExperimentSpec& spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
        while (!line.empty() && is_space(line.front())) line.erase(line.begin());
        while (!line.empty() && is_space(line.back())) line.pop_back();
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && is_space(key.back())) key.pop_back();
        while (!value.empty() && is_space(value.front())) value.erase(value.begin());
        apply_setting(spec, key, value);
    }
}

std::string render_config(const ExperimentSpec& spec) {
    std::ostringstream os;
    os << "# resolved experiment spec (command: " << spec.command << ")\n";
    for (const auto& [name, entry] : registry()) {
        const std::string v = entry.get(spec);
        if (!v.empty() || std::string(entry.type) != "string") os << name << "=" << v << "\n";
    }
    return os.str();
}

std::vector<std::string> known_config_keys() {
    std::vector<std::string> keys;
    for (const auto& [name, entry] : registry()) {
        (void)entry;
        keys.push_back(name);
    }
    return keys;
}

std::vector<double> default_sweep_values(const std::string& axis) {
    if (axis == "expansion") return {2048, 4096, 8192, 16384};
    if (axis == "fan_in") return {2, 5, 16, 0};  // 0 = fully connected rows
    if (axis == "topk") return {0.01, 0.05, 0.1, 0.25, 1.0};
    throw ConfigError("unknown sweep axis '" + axis +
                      "' (expected expansion, fan_in, or topk)");
}

void apply_sweep_value(ModelConfig& model, const std::string& axis, double value) {
    if (axis == "expansion")
        model.grc_dim = static_cast<int>(value);
    else if (axis == "fan_in")
        model.fan_in = static_cast<int>(value);
    else if (axis == "topk")
        model.topk_fraction = value;
    else
        throw ConfigError("unknown sweep axis '" + axis + "'");
    model.gate.grc_dim = model.grc_dim;
}

}  // namespace cdrl
