#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dual/baselines.hpp"
#include "dual/dataset.hpp"
#include "dual/trainer.hpp"

namespace dual {

// Hyperparameter candidates for model selection. Empty lists fall back to the
// corresponding base value from ExperimentConfig::train; gamma candidates set
// eta to the same value.
struct GridSpec {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;
    std::vector<std::size_t> k_clusters;

    bool empty() const {
        return alpha.empty() && beta.empty() && gamma.empty() && k_clusters.empty();
    }
};

struct ExperimentConfig {
    std::filesystem::path dataset_path;
    std::string label_column = "label";
    bool has_header = true;

    std::vector<Strategy> strategies;
    std::vector<std::size_t> budgets;
    std::size_t repeats = 5;
    std::uint64_t base_seed = 0;
    std::filesystem::path output_dir = "out";

    TrainConfig train;  // per-repeat seeds are derived from base_seed, not train.seed
    std::optional<GridSpec> grid;
    double svm_c = 100.0;

    void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::ordered_json& doc);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::ordered_json experiment_config_to_json(const ExperimentConfig& cfg);

// One (strategy, budget, repeat) evaluation. selected holds dataset-level
// sample indices, in selection order.
struct CellResult {
    std::string strategy;
    std::size_t budget = 0;
    std::size_t repeat = 0;
    std::vector<std::size_t> selected;
    double accuracy = 0.0;
    double auc_macro = 0.0;
};

struct AggregateResult {
    std::string strategy;
    std::size_t budget = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population standard deviation over repeats
    double mean_auc = 0.0;
    double std_auc = 0.0;
};

struct GridCellOutcome {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    std::size_t k_clusters = 0;
    double mean_accuracy = 0.0;  // of the dual strategy at the largest budget
};

struct RepeatRecord {
    std::size_t repeat = 0;
    std::uint64_t split_seed = 0;
    std::uint64_t train_seed = 0;
    std::vector<std::size_t> candidate_indices;
    std::vector<std::size_t> test_indices;
};

// Loss histories of one dual-family training run.
struct DualRunTrace {
    std::string strategy;
    std::size_t repeat = 0;
    std::vector<double> pretrain_history;
    std::vector<JointLossRecord> joint_history;
};

struct ExperimentReport {
    nlohmann::ordered_json config_echo;
    TrainConfig train_used;  // base config with any grid winner applied
    std::vector<RepeatRecord> repeats;
    std::vector<CellResult> cells;
    std::vector<AggregateResult> aggregates;
    std::vector<GridCellOutcome> grid_cells;  // empty when no grid search ran
    std::optional<GridCellOutcome> grid_winner;
    std::vector<DualRunTrace> traces;
};

// Runs the full protocol: per repeat, split / standardize on the candidate
// pool / select with every strategy at every budget / reveal the selected
// labels / train the classifier / score the held-out half. Budgets beyond the
// candidate-pool size fail before any training starts.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& data);
ExperimentReport run_experiment(const ExperimentConfig& cfg);  // loads cfg.dataset_path

nlohmann::ordered_json report_to_json(const ExperimentReport& report);

// Writes report.json, curves.csv, selections/*.csv, and the per-stage loss
// history CSVs into dir. All writes are atomic (write-then-rename).
void emit_outputs(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace dual
