#include "cdrl/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "cdrl/trainer.hpp"

namespace fs = std::filesystem;

namespace cdrl {

namespace {

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    localtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y%m%d-%H%M%S");
    return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name, const std::string& file) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw ConfigError("report: file " + file + " is missing column '" + name + "'");
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("report: cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("report: empty file " + path);
    t.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = split_csv_line(line);
        if (row.size() != t.header.size())
            throw ConfigError("report: ragged row in " + path);
        t.rows.push_back(std::move(row));
    }
    return t;
}

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
    mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size()));
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for write: " + path);
    return out;
}

}  // namespace

LoadedModel load_model(const std::string& arg) {
    std::string label, path = arg;
    const auto eq = arg.find('=');
    if (eq != std::string::npos && !fs::exists(arg)) {
        label = arg.substr(0, eq);
        path = arg.substr(eq + 1);
    }
    if (!fs::exists(path)) throw ConfigError("checkpoint not found: " + path);
    LoadedModel m;
    auto arrays = load_checkpoint(path);
    m.config = config_from_arrays(arrays);
    m.net = net_from_arrays(arrays);
    m.label = label.empty() ? to_string(m.config.kind) : label;
    return m;
}

void write_robustness_csv(const std::string& path, const RobustnessGrid& grid) {
    const bool fresh = !fs::exists(path);
    std::ofstream out(path, std::ios::app);
    if (!out) throw ConfigError("cannot open for write: " + path);
    if (fresh) out << "obs_sigma,act_prob,model,seed,win_rate,mean_reward\n";
    for (const auto& cell : grid.cells)
        for (std::size_t s = 0; s < cell.report.seeds.size(); ++s)
            out << cell.obs_sigma << ',' << cell.act_prob << ',' << grid.model_id << ','
                << cell.report.seeds[s] << ',' << cell.report.win_rates[s] << ','
                << cell.report.mean_rewards[s] << '\n';
}

void write_robustness_pivot_csv(const std::string& path,
                                const std::vector<RobustnessGrid>& grids) {
    auto out = open_out(path);
    out << "obs_sigma,act_prob,model,win_rate_mean,win_rate_std,reward_mean,reward_std\n";
    for (const auto& grid : grids)
        for (const auto& cell : grid.cells)
            out << cell.obs_sigma << ',' << cell.act_prob << ',' << grid.model_id << ','
                << cell.report.win_rate_mean << ',' << cell.report.win_rate_std << ','
                << cell.report.reward_mean << ',' << cell.report.reward_std << '\n';
}

void write_matrix_csv(const std::string& path,
                      const std::vector<std::vector<double>>& matrix) {
    auto out = open_out(path);
    out << "obs_sigma\\act_prob";
    for (double a : robustness_act_levels()) out << ',' << a;
    out << '\n';
    const auto& obs = robustness_obs_levels();
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out << obs[i];
        for (double v : matrix[i]) out << ',' << v;
        out << '\n';
    }
}

void write_generalization_csv(const std::string& path,
                              const std::vector<EvalReport>& reports,
                              const std::string& extra_col, const std::string& extra_val) {
    const bool fresh = !fs::exists(path);
    std::ofstream out(path, std::ios::app);
    if (!out) throw ConfigError("cannot open for write: " + path);
    if (fresh) {
        out << "test_id,model,seed,win_rate,mean_reward";
        if (!extra_col.empty()) out << ',' << extra_col;
        out << '\n';
    }
    for (const auto& r : reports)
        for (std::size_t s = 0; s < r.seeds.size(); ++s) {
            out << r.condition_id << ',' << r.model_id << ',' << r.seeds[s] << ','
                << r.win_rates[s] << ',' << r.mean_rewards[s];
            if (!extra_col.empty()) out << ',' << extra_val;
            out << '\n';
        }
}

void write_eval_csv(const std::string& path, const EvalReport& report) {
    auto out = open_out(path);
    out << "condition,model,seed,win_rate,mean_reward\n";
    for (std::size_t s = 0; s < report.seeds.size(); ++s)
        out << report.condition_id << ',' << report.model_id << ',' << report.seeds[s] << ','
            << report.win_rates[s] << ',' << report.mean_rewards[s] << '\n';
    out << "aggregate," << report.model_id << ",all," << report.win_rate_mean << ','
        << report.reward_mean << '\n';
}

std::string run_experiment(ExperimentSpec spec) {
    spec.finalize();
    const std::string run_dir =
        spec.out_dir.empty()
            ? (fs::path("runs") / (timestamp() + "-" + spec.command + "-" +
                                   to_string(spec.model.kind))).string()
            : spec.out_dir;

    auto prepare_dirs = [&]() {
        fs::create_directories(run_dir);
        fs::create_directories(fs::path(run_dir) / "logs");
        fs::create_directories(fs::path(run_dir) / "checkpoints");
        fs::create_directories(fs::path(run_dir) / "reports");
        auto out = open_out((fs::path(run_dir) / "spec.cfg").string());
        out << render_config(spec);
    };
    const std::string reports = (fs::path(run_dir) / "reports").string();

    if (spec.command == "train") {
        spec.env.validate();
        spec.train.validate();
        spec.model.validate();
        prepare_dirs();
        for (auto seed : spec.seeds) {
            auto log = open_out((fs::path(run_dir) / "logs" /
                                 ("train_seed" + std::to_string(seed) + ".csv")).string());
            train(spec.env, spec.train, spec.model, seed, &log,
                  (fs::path(run_dir) / "checkpoints").string());
        }
    } else if (spec.command == "eval") {
        if (spec.checkpoints.size() != 1)
            throw ConfigError("eval: exactly one checkpoint required");
        LoadedModel m = load_model(spec.checkpoints[0]);  // before any output exists
        prepare_dirs();
        EvalReport r = evaluate(*m.net, spec.env, spec.noise, spec.eval, spec.seeds);
        std::ostringstream cond;
        cond << "obs" << spec.noise.obs_sigma << "_act" << spec.noise.act_prob << "_sticky"
             << spec.noise.sticky_prob;
        r.condition_id = cond.str();
        r.model_id = m.label;
        write_eval_csv((fs::path(reports) / "eval.csv").string(), r);
    } else if (spec.command == "grid") {
        if (spec.checkpoints.empty()) throw ConfigError("grid: at least one checkpoint required");
        std::vector<LoadedModel> models;
        for (const auto& c : spec.checkpoints) models.push_back(load_model(c));
        prepare_dirs();
        std::vector<RobustnessGrid> grids;
        for (auto& m : models)
            grids.push_back(robustness_grid(*m.net, m.label, spec.env, spec.eval, spec.seeds));
        for (const auto& g : grids)
            write_robustness_csv((fs::path(reports) / "robustness.csv").string(), g);
        write_robustness_pivot_csv((fs::path(reports) / "robustness_pivot.csv").string(), grids);
        for (const auto& g : grids) {
            std::vector<std::vector<double>> m(robustness_obs_levels().size(),
                                               std::vector<double>(robustness_act_levels().size()));
            for (std::size_t i = 0; i < m.size(); ++i)
                for (std::size_t j = 0; j < m[i].size(); ++j)
                    m[i][j] = g.at(i, j).report.win_rate_mean;
            write_matrix_csv(
                (fs::path(reports) / ("matrix_" + g.model_id + ".csv")).string(), m);
        }
        if (grids.size() >= 2)
            write_matrix_csv((fs::path(reports) / ("matrix_" + grids[0].model_id + "_minus_" +
                                                   grids[1].model_id + ".csv")).string(),
                             difference_grid(grids[0], grids[1]));
    } else if (spec.command == "generalize") {
        if (spec.checkpoints.empty())
            throw ConfigError("generalize: at least one checkpoint required");
        std::vector<LoadedModel> models;
        for (const auto& c : spec.checkpoints) models.push_back(load_model(c));
        prepare_dirs();
        for (auto& m : models) {
            auto reports_vec =
                generalization_sweep(*m.net, m.label, spec.env, spec.eval, spec.seeds);
            write_generalization_csv((fs::path(reports) / "generalization.csv").string(),
                                     reports_vec);
        }
    } else if (spec.command == "sweep") {
        if (spec.sweep_axis.empty()) throw ConfigError("sweep: sweep.axis required");
        const auto values =
            spec.sweep_values.empty() ? default_sweep_values(spec.sweep_axis) : spec.sweep_values;
        prepare_dirs();
        auto out = open_out((fs::path(reports) / "sweep.csv").string());
        out << "axis,value,model,seed,win_rate,mean_reward\n";
        for (double value : values) {
            ModelConfig model = spec.model;
            apply_sweep_value(model, spec.sweep_axis, value);
            for (auto seed : spec.seeds) {
                std::ostringstream tag;
                tag << spec.sweep_axis << value << "_seed" << seed;
                auto log = open_out(
                    (fs::path(run_dir) / "logs" / ("train_" + tag.str() + ".csv")).string());
                TrainResult tr = train(spec.env, spec.train, model, seed, &log,
                                       (fs::path(run_dir) / "checkpoints" / tag.str()).string());
                auto arrays = load_checkpoint(tr.final_checkpoint);
                auto net = net_from_arrays(arrays);
                EvalReport r = evaluate(*net, spec.env, NoiseSpec{}, spec.eval, {seed});
                out << spec.sweep_axis << ',' << value << ',' << to_string(model.kind) << ','
                    << seed << ',' << r.win_rates[0] << ',' << r.mean_rewards[0] << '\n';
            }
        }
    } else if (spec.command == "report") {
        if (spec.report_dirs.empty()) throw ConfigError("report: at least one run dir required");
        prepare_dirs();
        write_report(spec.report_dirs, reports);
    } else {
        throw ConfigError("unknown command: " + spec.command);
    }
    return run_dir;
}

void write_report(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
    fs::create_directories(out_dir);
    // gather per-seed rows from every harness CSV beneath the run dirs
    struct Key {
        std::string a, b;  // (obs,act) or test_id, plus model
        std::string model;
        bool operator<(const Key& o) const {
            return std::tie(a, b, model) < std::tie(o.a, o.b, o.model);
        }
    };
    std::map<Key, std::pair<std::vector<double>, std::vector<double>>> robustness, general;

    for (const auto& dir : run_dirs) {
        if (!fs::exists(dir)) throw ConfigError("report: run dir not found: " + dir);
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            const std::string path = entry.path().string();
            if (name == "robustness.csv") {
                CsvTable t = read_csv(path);
                const int co = t.col("obs_sigma", path), ca = t.col("act_prob", path),
                          cm = t.col("model", path), cw = t.col("win_rate", path),
                          cr = t.col("mean_reward", path);
                for (const auto& row : t.rows) {
                    Key k{row[co], row[ca], row[cm]};
                    robustness[k].first.push_back(std::stod(row[cw]));
                    robustness[k].second.push_back(std::stod(row[cr]));
                }
            } else if (name == "generalization.csv") {
                CsvTable t = read_csv(path);
                const int ct = t.col("test_id", path), cm = t.col("model", path),
                          cw = t.col("win_rate", path), cr = t.col("mean_reward", path);
                for (const auto& row : t.rows) {
                    Key k{row[ct], "", row[cm]};
                    general[k].first.push_back(std::stod(row[cw]));
                    general[k].second.push_back(std::stod(row[cr]));
                }
            }
        }
    }

    if (!robustness.empty()) {
        auto out = open_out((fs::path(out_dir) / "robustness_summary.csv").string());
        out << "obs_sigma,act_prob,model,win_rate_mean,win_rate_std,reward_mean,reward_std\n";
        std::map<std::string, std::vector<std::vector<double>>> matrices;
        for (const auto& [k, v] : robustness) {
            double wm, ws, rm, rs;
            mean_std(v.first, wm, ws);
            mean_std(v.second, rm, rs);
            out << k.a << ',' << k.b << ',' << k.model << ',' << wm << ',' << ws << ',' << rm
                << ',' << rs << '\n';
            auto& m = matrices[k.model];
            if (m.empty())
                m.assign(robustness_obs_levels().size(),
                         std::vector<double>(robustness_act_levels().size(), 0.0));
            const auto& obs = robustness_obs_levels();
            const auto& act = robustness_act_levels();
            for (std::size_t i = 0; i < obs.size(); ++i)
                for (std::size_t j = 0; j < act.size(); ++j)
                    if (std::abs(std::stod(k.a) - obs[i]) < 1e-9 &&
                        std::abs(std::stod(k.b) - act[j]) < 1e-9)
                        m[i][j] = wm;
        }
        for (const auto& [model, m] : matrices)
            write_matrix_csv((fs::path(out_dir) / ("matrix_" + model + ".csv")).string(), m);
        if (matrices.size() >= 2) {
            auto it = matrices.begin();
            const auto& a = *it++;
            const auto& b = *it;
            std::vector<std::vector<double>> diff = a.second;
            for (std::size_t i = 0; i < diff.size(); ++i)
                for (std::size_t j = 0; j < diff[i].size(); ++j) diff[i][j] -= b.second[i][j];
            write_matrix_csv((fs::path(out_dir) / ("matrix_" + a.first + "_minus_" + b.first +
                                                   ".csv")).string(),
                             diff);
        }
    }

    if (!general.empty()) {
        auto out = open_out((fs::path(out_dir) / "generalization_summary.csv").string());
        out << "test_id,model,win_rate_mean,win_rate_std,reward_mean,reward_std\n";
        for (const auto& [k, v] : general) {
            double wm, ws, rm, rs;
            mean_std(v.first, wm, ws);
            mean_std(v.second, rm, rs);
            out << k.a << ',' << k.model << ',' << wm << ',' << ws << ',' << rm << ',' << rs
                << '\n';
        }
    }
}

}  // namespace cdrl
