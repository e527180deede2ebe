#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dual/baselines.hpp"
#include "dual/dataset.hpp"
#include "dual/errors.hpp"
#include "dual/experiment.hpp"
#include "dual/io.hpp"
#include "dual/serialize.hpp"
#include "dual/trainer.hpp"

namespace {

void write_indices_csv(const std::vector<std::size_t>& indices,
                       const std::filesystem::path& path) {
    std::string body = "rank,index\n";
    for (std::size_t i = 0; i < indices.size(); ++i)
        body += std::to_string(i) + "," + std::to_string(indices[i]) + "\n";
    dual::write_text_atomic(path, body);
}

// One row per sample: its latent coordinates plus a selected flag. Feed this
// to any external 2-D projection tool for embedding plots.
void write_latent_csv(const dual::DualNetwork& net, const dual::Matrix& x,
                      const std::vector<std::size_t>& selected,
                      const std::filesystem::path& path) {
    const dual::Matrix z = dual::encode(net, x);
    std::vector<char> mark(z.cols(), 0);
    for (std::size_t idx : selected) mark[idx] = 1;
    std::string body = "index";
    for (std::size_t j = 0; j < z.rows(); ++j) body += ",z" + std::to_string(j);
    body += ",selected\n";
    for (std::size_t i = 0; i < z.cols(); ++i) {
        body += std::to_string(i);
        for (std::size_t j = 0; j < z.rows(); ++j) body += "," + dual::format_double(z(j, i));
        body += mark[i] ? ",1\n" : ",0\n";
    }
    dual::write_text_atomic(path, body);
}

int run_select(const std::string& config_path, const std::string& strategy_name,
               std::size_t budget, bool seed_set, std::uint64_t seed,
               const std::string& out_dir_flag) {
    dual::ExperimentConfig cfg = dual::load_experiment_config(config_path);
    if (seed_set) cfg.base_seed = seed;
    const std::filesystem::path out =
        out_dir_flag.empty() ? cfg.output_dir : std::filesystem::path(out_dir_flag);
    const dual::Strategy strategy = dual::strategy_from_string(strategy_name);

    const dual::Dataset data = dual::load_csv(cfg.dataset_path, cfg.label_column, cfg.has_header);
    if (budget > data.n_samples())
        throw dual::ContractViolation("select: budget " + std::to_string(budget) +
                                      " exceeds dataset size " +
                                      std::to_string(data.n_samples()));
    const dual::Scaler scaler = dual::zscore_fit(data.features);
    const dual::Matrix x = dual::zscore_apply(scaler, data.features);

    std::vector<std::size_t> selected;
    if (strategy == dual::Strategy::dual || strategy == dual::Strategy::dual_wo) {
        dual::TrainConfig t = cfg.train;
        t.seed = cfg.base_seed;
        if (strategy == dual::Strategy::dual_wo) t.beta = 0.0;
        const dual::RunResult run = dual::run_dual(x, t);
        selected = dual::select_top_m(run.selection, budget);
        dual::write_selection_csv(run.selection, out / "scores.csv");
        dual::write_pretrain_history_csv(run.pretrain_history, out / "pretrain_history.csv");
        dual::write_joint_history_csv(run.joint_history, out / "joint_history.csv");
        dual::save_params(run.net, out / "params.json");
        write_latent_csv(run.net, x, selected, out / "latent.csv");
    } else if (strategy == dual::Strategy::random) {
        selected = dual::random_select(data.n_samples(), budget, cfg.base_seed);
    } else {
        selected = dual::kmeans_select(x, cfg.train.k_clusters, budget, cfg.base_seed);
    }
    write_indices_csv(selected, out / "selected.csv");
    std::cout << "selected " << selected.size() << " of " << data.n_samples() << " samples -> "
              << (out / "selected.csv").string() << "\n";
    return 0;
}

int run_experiment_cmd(const std::string& config_path, bool seed_set, std::uint64_t seed,
                       const std::string& out_dir_flag) {
    dual::ExperimentConfig cfg = dual::load_experiment_config(config_path);
    if (seed_set) cfg.base_seed = seed;
    if (!out_dir_flag.empty()) cfg.output_dir = out_dir_flag;
    const dual::ExperimentReport report = dual::run_experiment(cfg);
    dual::emit_outputs(report, cfg.output_dir);
    for (const dual::AggregateResult& a : report.aggregates)
        std::cout << a.strategy << " m=" << a.budget << " mean_acc=" << a.mean_accuracy
                  << " std_acc=" << a.std_accuracy << " mean_auc=" << a.mean_auc
                  << " std_auc=" << a.std_auc << "\n";
    std::cout << "report written to " << (cfg.output_dir / "report.json").string() << "\n";
    return 0;
}

int run_gen_synth(const std::string& out, const std::vector<std::size_t>& counts,
                  std::size_t dim, double separation, double sigma, std::uint64_t seed) {
    const dual::Dataset data = dual::make_axis_blobs(counts, dim, separation, sigma, seed);
    dual::write_dataset_csv(data, out);
    std::cout << "wrote " << data.n_samples() << " samples, " << data.n_features()
              << " features, " << data.n_classes() << " classes -> " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DUAL: deep unsupervised active learning toolkit"};
    app.require_subcommand(1);

    auto* select_cmd = app.add_subcommand(
        "select", "Rank one dataset with one strategy and write the selected indices");
    std::string sel_config;
    std::string sel_strategy = "dual";
    std::size_t sel_budget = 0;
    std::uint64_t sel_seed = 0;
    std::string sel_out;
    select_cmd->add_option("--config", sel_config, "config JSON (dataset and train sections used)")
        ->required()
        ->check(CLI::ExistingFile);
    select_cmd->add_option("--strategy", sel_strategy, "dual | dual_wo | random | kmeans");
    select_cmd->add_option("--budget", sel_budget, "number of samples to select")->required();
    auto* sel_seed_opt = select_cmd->add_option("--seed", sel_seed, "override the config seed");
    select_cmd->add_option("--out-dir", sel_out, "override the config output directory");

    auto* exp_cmd = app.add_subcommand(
        "experiment", "Run the full protocol: strategies x budgets x repeats, then aggregate");
    std::string exp_config;
    std::uint64_t exp_seed = 0;
    std::string exp_out;
    exp_cmd->add_option("--config", exp_config, "experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    auto* exp_seed_opt = exp_cmd->add_option("--seed", exp_seed, "override the config seed");
    exp_cmd->add_option("--out-dir", exp_out, "override the config output directory");

    auto* gen_cmd = app.add_subcommand("gen-synth", "Generate a Gaussian-blob CSV dataset");
    std::string gen_out = "synth.csv";
    std::vector<std::size_t> gen_counts{100, 100, 100};
    std::size_t gen_dim = 10;
    double gen_sep = 10.0;
    double gen_sigma = 1.0;
    std::uint64_t gen_seed = 0;
    gen_cmd->add_option("--out", gen_out, "output CSV path");
    gen_cmd->add_option("--counts", gen_counts, "samples per blob, comma separated")
        ->delimiter(',');
    gen_cmd->add_option("--dim", gen_dim, "feature dimension");
    gen_cmd->add_option("--separation", gen_sep, "distance scale between blob centers");
    gen_cmd->add_option("--sigma", gen_sigma, "per-axis standard deviation inside a blob");
    gen_cmd->add_option("--seed", gen_seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(select_cmd))
            return run_select(sel_config, sel_strategy, sel_budget, sel_seed_opt->count() > 0,
                              sel_seed, sel_out);
        if (app.got_subcommand(exp_cmd))
            return run_experiment_cmd(exp_config, exp_seed_opt->count() > 0, exp_seed, exp_out);
        if (app.got_subcommand(gen_cmd))
            return run_gen_synth(gen_out, gen_counts, gen_dim, gen_sep, gen_sigma, gen_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
