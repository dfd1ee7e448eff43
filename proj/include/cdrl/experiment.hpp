#pragma once

#include <string>
#include <vector>

#include "cdrl/config.hpp"
#include "cdrl/eval.hpp"

namespace cdrl {

// Loads a "label=path" checkpoint argument; a bare path gets its model
// kind as label.
struct LoadedModel {
    std::string label;
    ModelConfig config;
    std::unique_ptr<QNet<float>> net;
};

LoadedModel load_model(const std::string& arg);

// CSV writers (schemas fixed by the harness contracts).
void write_robustness_csv(const std::string& path, const RobustnessGrid& grid);
void write_robustness_pivot_csv(const std::string& path,
                                const std::vector<RobustnessGrid>& grids);
void write_matrix_csv(const std::string& path,
                      const std::vector<std::vector<double>>& matrix);
void write_generalization_csv(const std::string& path,
                              const std::vector<EvalReport>& reports,
                              const std::string& extra_col = "",
                              const std::string& extra_val = "");
void write_eval_csv(const std::string& path, const EvalReport& report);

// Dispatches a resolved spec; creates the run directory, echoes the spec
// for provenance, and writes logs/checkpoints/reports beneath it.
// Returns the run directory.
std::string run_experiment(ExperimentSpec spec);

// Merges per-seed harness CSVs from run directories into mean/std summary
// tables and heat-map matrix files. Pure reshaping, no new statistics.
void write_report(const std::vector<std::string>& run_dirs, const std::string& out_dir);

}  // namespace cdrl
