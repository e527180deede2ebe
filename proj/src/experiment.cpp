#include "dual/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "dual/errors.hpp"
#include "dual/io.hpp"
#include "dual/metrics.hpp"
#include "dual/rng.hpp"
#include "dual/svm.hpp"

namespace dual {

namespace {

// Seed salts: one fixed role per salt so every random decision in a repeat is
// independent yet reproducible from the repeat's split seed.
constexpr std::uint64_t kSaltTrain = 2;
constexpr std::uint64_t kSaltKmeansBaseline = 3;
constexpr std::uint64_t kSaltRandomBaseline = 4;

template <typename T>
T get_or(const nlohmann::ordered_json& doc, const std::string& key, T fallback) {
    if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
    return doc.at(key).get<T>();
}

nlohmann::ordered_json train_to_json(const TrainConfig& t) {
    nlohmann::ordered_json doc;
    doc["alpha"] = t.alpha;
    doc["beta"] = t.beta;
    doc["gamma"] = t.gamma;
    doc["eta"] = t.eta;
    doc["k_clusters"] = t.k_clusters;
    doc["latent_dim"] = t.latent_dim;
    doc["hidden_widths"] = t.hidden_widths;
    doc["pretrain_epochs"] = t.pretrain_epochs;
    doc["joint_epochs"] = t.joint_epochs;
    doc["lr"] = t.lr;
    return doc;
}

TrainConfig train_from_json(const nlohmann::ordered_json& doc, TrainConfig base) {
    base.alpha = get_or(doc, "alpha", base.alpha);
    base.beta = get_or(doc, "beta", base.beta);
    base.gamma = get_or(doc, "gamma", base.gamma);
    base.eta = get_or(doc, "eta", doc.contains("gamma") ? base.gamma : base.eta);
    base.k_clusters = get_or(doc, "k_clusters", base.k_clusters);
    base.latent_dim = get_or(doc, "latent_dim", base.latent_dim);
    base.hidden_widths = get_or(doc, "hidden_widths", base.hidden_widths);
    base.pretrain_epochs = get_or(doc, "pretrain_epochs", base.pretrain_epochs);
    base.joint_epochs = get_or(doc, "joint_epochs", base.joint_epochs);
    base.lr = get_or(doc, "lr", base.lr);
    return base;
}

nlohmann::ordered_json grid_cell_to_json(const GridCellOutcome& cell) {
    nlohmann::ordered_json doc;
    doc["alpha"] = cell.alpha;
    doc["beta"] = cell.beta;
    doc["gamma"] = cell.gamma;
    doc["eta"] = cell.eta;
    doc["k_clusters"] = cell.k_clusters;
    doc["mean_accuracy"] = cell.mean_accuracy;
    return doc;
}

double mean_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double pop_std_of(const std::vector<double>& v, double mean) {
    double sum = 0.0;
    for (double x : v) {
        const double d = x - mean;
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(v.size()));
}

// One repeat's split plus its standardized feature views. The scaler is fit
// on the candidate half only; the test half reuses it.
struct RepeatContext {
    RepeatRecord record;
    Matrix x_cand{0, 0};
    Matrix x_test{0, 0};
    std::vector<int> y_cand;
    std::vector<int> y_test;
};

RepeatContext make_repeat_context(const Dataset& data, std::uint64_t base_seed, std::size_t r) {
    RepeatContext ctx;
    ctx.record.repeat = r;
    ctx.record.split_seed = base_seed + r;
    ctx.record.train_seed = derive_seed(ctx.record.split_seed, kSaltTrain);
    const Split split = split_candidates(data.n_samples(), ctx.record.split_seed);
    ctx.record.candidate_indices = split.candidate_indices;
    ctx.record.test_indices = split.test_indices;
    const Matrix cand_raw = take_columns(data.features, split.candidate_indices);
    const Scaler scaler = zscore_fit(cand_raw);
    ctx.x_cand = zscore_apply(scaler, cand_raw);
    ctx.x_test = zscore_apply(scaler, take_columns(data.features, split.test_indices));
    ctx.y_cand = take_labels(data.labels, split.candidate_indices);
    ctx.y_test = take_labels(data.labels, split.test_indices);
    return ctx;
}

// Labels of the chosen candidates are read only here, after selection is done.
Metrics fit_and_score(const Matrix& train_features, const Matrix& test_features,
                      const std::vector<int>& y_cand, const std::vector<int>& y_test,
                      const std::vector<std::size_t>& selected_pool, double svm_c) {
    const Matrix x_sel = take_columns(train_features, selected_pool);
    const std::vector<int> y_sel = take_labels(y_cand, selected_pool);
    const LinearSvmModel model = svm_train(x_sel, y_sel, svm_c);
    return evaluate(model, test_features, y_test);
}

std::vector<std::size_t> to_dataset_indices(const RepeatContext& ctx,
                                            const std::vector<std::size_t>& pool_positions) {
    std::vector<std::size_t> out;
    out.reserve(pool_positions.size());
    for (std::size_t pos : pool_positions) out.push_back(ctx.record.candidate_indices[pos]);
    return out;
}

CellResult make_cell(Strategy s, std::size_t budget, std::size_t repeat,
                     std::vector<std::size_t> selected, const Metrics& metrics) {
    CellResult cell;
    cell.strategy = to_string(s);
    cell.budget = budget;
    cell.repeat = repeat;
    cell.selected = std::move(selected);
    cell.accuracy = metrics.accuracy;
    cell.auc_macro = metrics.auc_macro;
    return cell;
}

std::vector<GridCellOutcome> expand_grid(const GridSpec& grid, const TrainConfig& base) {
    const std::vector<double> alphas = grid.alpha.empty() ? std::vector<double>{base.alpha}
                                                          : grid.alpha;
    const std::vector<double> betas = grid.beta.empty() ? std::vector<double>{base.beta}
                                                        : grid.beta;
    const std::vector<double> gammas = grid.gamma.empty() ? std::vector<double>{base.gamma}
                                                          : grid.gamma;
    const std::vector<std::size_t> ks = grid.k_clusters.empty()
                                            ? std::vector<std::size_t>{base.k_clusters}
                                            : grid.k_clusters;
    const bool tie_eta = !grid.gamma.empty();  // grid gamma candidates drive eta too
    std::vector<GridCellOutcome> cells;
    for (double a : alphas)
        for (double b : betas)
            for (double g : gammas)
                for (std::size_t k : ks)
                    cells.push_back({a, b, g, tie_eta ? g : base.eta, k, 0.0});
    return cells;
}

// Scores every grid cell by the dual strategy's mean accuracy at the largest
// budget; the winner is the first cell attaining the maximum.
void run_grid_search(const ExperimentConfig& cfg, const std::vector<RepeatContext>& contexts,
                     std::size_t largest_budget, ExperimentReport& report) {
    report.grid_cells = expand_grid(*cfg.grid, cfg.train);
    for (auto& cell : report.grid_cells) {
        TrainConfig t = cfg.train;
        t.alpha = cell.alpha;
        t.beta = cell.beta;
        t.gamma = cell.gamma;
        t.eta = cell.eta;
        t.k_clusters = cell.k_clusters;
        double sum_acc = 0.0;
        for (const RepeatContext& ctx : contexts) {
            TrainConfig run_cfg = t;
            run_cfg.seed = ctx.record.train_seed;
            const RunResult run = run_dual(ctx.x_cand, run_cfg);
            const std::vector<std::size_t> selected = select_top_m(run.selection, largest_budget);
            const Matrix phi_cand = encode(run.net, ctx.x_cand);
            const Matrix phi_test = encode(run.net, ctx.x_test);
            sum_acc += fit_and_score(phi_cand, phi_test, ctx.y_cand, ctx.y_test, selected,
                                     cfg.svm_c)
                           .accuracy;
        }
        cell.mean_accuracy = sum_acc / static_cast<double>(contexts.size());
    }
    const auto best = std::max_element(
        report.grid_cells.begin(), report.grid_cells.end(),
        [](const GridCellOutcome& a, const GridCellOutcome& b) {
            return a.mean_accuracy < b.mean_accuracy;
        });
    report.grid_winner = *best;
}

void aggregate(const ExperimentConfig& cfg, ExperimentReport& report) {
    for (Strategy s : cfg.strategies) {
        const std::string name = to_string(s);
        for (std::size_t m : cfg.budgets) {
            std::vector<double> accs;
            std::vector<double> aucs;
            for (const CellResult& cell : report.cells) {
                if (cell.strategy != name || cell.budget != m) continue;
                accs.push_back(cell.accuracy);
                aucs.push_back(cell.auc_macro);
            }
            AggregateResult agg;
            agg.strategy = name;
            agg.budget = m;
            agg.mean_accuracy = mean_of(accs);
            agg.std_accuracy = pop_std_of(accs, agg.mean_accuracy);
            agg.mean_auc = mean_of(aucs);
            agg.std_auc = pop_std_of(aucs, agg.mean_auc);
            report.aggregates.push_back(agg);
        }
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    train.validate();
    if (repeats == 0) throw ContractViolation("experiment: repeats must be at least 1");
    if (svm_c <= 0.0) throw ContractViolation("experiment: svm_c must be positive");
    std::unordered_set<std::size_t> seen_budgets;
    for (std::size_t m : budgets) {
        if (m == 0) throw ContractViolation("experiment: budgets must be at least 1");
        if (!seen_budgets.insert(m).second)
            throw ContractViolation("experiment: duplicate budget " + std::to_string(m));
    }
    std::unordered_set<std::string> seen_strategies;
    for (Strategy s : strategies)
        if (!seen_strategies.insert(to_string(s)).second)
            throw ContractViolation("experiment: duplicate strategy " + to_string(s));
    if (grid) {
        for (double v : grid->alpha)
            if (!(v >= 0.0)) throw ContractViolation("experiment: grid alpha must be >= 0");
        for (double v : grid->beta)
            if (!(v >= 0.0)) throw ContractViolation("experiment: grid beta must be >= 0");
        for (double v : grid->gamma)
            if (!(v >= 0.0)) throw ContractViolation("experiment: grid gamma must be >= 0");
        for (std::size_t k : grid->k_clusters)
            if (k == 0) throw ContractViolation("experiment: grid k_clusters must be >= 1");
    }
}

ExperimentConfig experiment_config_from_json(const nlohmann::ordered_json& doc) {
    ExperimentConfig cfg;
    if (!doc.contains("dataset"))
        throw ContractViolation("experiment config: missing \"dataset\" section");
    const auto& ds = doc.at("dataset");
    cfg.dataset_path = ds.at("path").get<std::string>();
    cfg.label_column = get_or<std::string>(ds, "label_column", cfg.label_column);
    cfg.has_header = get_or(ds, "has_header", cfg.has_header);
    if (doc.contains("strategies"))
        for (const auto& name : doc.at("strategies"))
            cfg.strategies.push_back(strategy_from_string(name.get<std::string>()));
    cfg.budgets = get_or(doc, "budgets", cfg.budgets);
    cfg.repeats = get_or(doc, "repeats", cfg.repeats);
    cfg.base_seed = get_or(doc, "base_seed", cfg.base_seed);
    cfg.output_dir = get_or<std::string>(doc, "output_dir", cfg.output_dir.string());
    cfg.svm_c = get_or(doc, "svm_c", cfg.svm_c);
    if (doc.contains("train")) cfg.train = train_from_json(doc.at("train"), cfg.train);
    if (doc.contains("grid") && !doc.at("grid").is_null()) {
        const auto& g = doc.at("grid");
        GridSpec spec;
        spec.alpha = get_or(g, "alpha", spec.alpha);
        spec.beta = get_or(g, "beta", spec.beta);
        spec.gamma = get_or(g, "gamma", spec.gamma);
        spec.k_clusters = get_or(g, "k_clusters", spec.k_clusters);
        if (!spec.empty()) cfg.grid = spec;
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return experiment_config_from_json(nlohmann::ordered_json::parse(read_text(path)));
}

nlohmann::ordered_json experiment_config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json doc;
    doc["dataset"]["path"] = cfg.dataset_path.string();
    doc["dataset"]["label_column"] = cfg.label_column;
    doc["dataset"]["has_header"] = cfg.has_header;
    auto& strategies = doc["strategies"] = nlohmann::ordered_json::array();
    for (Strategy s : cfg.strategies) strategies.push_back(to_string(s));
    doc["budgets"] = cfg.budgets;
    doc["repeats"] = cfg.repeats;
    doc["base_seed"] = cfg.base_seed;
    doc["svm_c"] = cfg.svm_c;
    doc["train"] = train_to_json(cfg.train);
    if (cfg.grid) {
        doc["grid"]["alpha"] = cfg.grid->alpha;
        doc["grid"]["beta"] = cfg.grid->beta;
        doc["grid"]["gamma"] = cfg.grid->gamma;
        doc["grid"]["k_clusters"] = cfg.grid->k_clusters;
    }
    return doc;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& data) {
    cfg.validate();
    if (data.n_samples() < 2)
        throw ContractViolation("experiment: dataset needs at least 2 samples");
    const std::size_t pool = data.n_samples() / 2;
    for (std::size_t m : cfg.budgets)
        if (m > pool)
            throw ContractViolation("experiment: budget " + std::to_string(m) +
                                    " exceeds the candidate pool size " + std::to_string(pool));

    ExperimentReport report;
    report.config_echo = experiment_config_to_json(cfg);
    report.train_used = cfg.train;

    std::vector<RepeatContext> contexts;
    contexts.reserve(cfg.repeats);
    for (std::size_t r = 0; r < cfg.repeats; ++r)
        contexts.push_back(make_repeat_context(data, cfg.base_seed, r));
    for (const RepeatContext& ctx : contexts) report.repeats.push_back(ctx.record);

    if (cfg.grid && !cfg.grid->empty()) {
        if (cfg.budgets.empty())
            throw ContractViolation("experiment: grid search needs at least one budget");
        const std::size_t largest = *std::max_element(cfg.budgets.begin(), cfg.budgets.end());
        run_grid_search(cfg, contexts, largest, report);
        report.train_used.alpha = report.grid_winner->alpha;
        report.train_used.beta = report.grid_winner->beta;
        report.train_used.gamma = report.grid_winner->gamma;
        report.train_used.eta = report.grid_winner->eta;
        report.train_used.k_clusters = report.grid_winner->k_clusters;
    }

    for (Strategy s : cfg.strategies) {
        for (std::size_t r = 0; r < cfg.repeats; ++r) {
            const RepeatContext& ctx = contexts[r];
            if (s == Strategy::dual || s == Strategy::dual_wo) {
                TrainConfig t = report.train_used;
                t.seed = ctx.record.train_seed;
                if (s == Strategy::dual_wo) t.beta = 0.0;
                const RunResult run = run_dual(ctx.x_cand, t);
                report.traces.push_back(
                    {to_string(s), r, run.pretrain_history, run.joint_history});
                const Matrix phi_cand = encode(run.net, ctx.x_cand);
                const Matrix phi_test = encode(run.net, ctx.x_test);
                for (std::size_t m : cfg.budgets) {
                    const std::vector<std::size_t> sel = select_top_m(run.selection, m);
                    const Metrics metrics = fit_and_score(phi_cand, phi_test, ctx.y_cand,
                                                          ctx.y_test, sel, cfg.svm_c);
                    report.cells.push_back(
                        make_cell(s, m, r, to_dataset_indices(ctx, sel), metrics));
                }
            } else if (s == Strategy::random) {
                for (std::size_t m : cfg.budgets) {
                    const std::uint64_t seed =
                        derive_seed(derive_seed(ctx.record.split_seed, kSaltRandomBaseline), m);
                    const std::vector<std::size_t> sel = random_select(ctx.x_cand.cols(), m, seed);
                    const Metrics metrics = fit_and_score(ctx.x_cand, ctx.x_test, ctx.y_cand,
                                                          ctx.y_test, sel, cfg.svm_c);
                    report.cells.push_back(
                        make_cell(s, m, r, to_dataset_indices(ctx, sel), metrics));
                }
            } else {
                const std::uint64_t seed = derive_seed(ctx.record.split_seed, kSaltKmeansBaseline);
                for (std::size_t m : cfg.budgets) {
                    const std::vector<std::size_t> sel =
                        kmeans_select(ctx.x_cand, report.train_used.k_clusters, m, seed);
                    const Metrics metrics = fit_and_score(ctx.x_cand, ctx.x_test, ctx.y_cand,
                                                          ctx.y_test, sel, cfg.svm_c);
                    report.cells.push_back(
                        make_cell(s, m, r, to_dataset_indices(ctx, sel), metrics));
                }
            }
        }
    }

    aggregate(cfg, report);
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    return run_experiment(cfg, load_csv(cfg.dataset_path, cfg.label_column, cfg.has_header));
}

nlohmann::ordered_json report_to_json(const ExperimentReport& report) {
    nlohmann::ordered_json doc;
    doc["config"] = report.config_echo;
    doc["train_used"] = train_to_json(report.train_used);
    if (report.grid_winner) {
        doc["grid_search"]["winner"] = grid_cell_to_json(*report.grid_winner);
        auto& cells = doc["grid_search"]["cells"] = nlohmann::ordered_json::array();
        for (const GridCellOutcome& cell : report.grid_cells)
            cells.push_back(grid_cell_to_json(cell));
    }
    auto& repeats = doc["repeats"] = nlohmann::ordered_json::array();
    for (const RepeatRecord& r : report.repeats) {
        nlohmann::ordered_json entry;
        entry["repeat"] = r.repeat;
        entry["split_seed"] = r.split_seed;
        entry["train_seed"] = r.train_seed;
        entry["n_candidates"] = r.candidate_indices.size();
        entry["n_test"] = r.test_indices.size();
        repeats.push_back(std::move(entry));
    }
    auto& cells = doc["cells"] = nlohmann::ordered_json::array();
    for (const CellResult& c : report.cells) {
        nlohmann::ordered_json entry;
        entry["strategy"] = c.strategy;
        entry["budget"] = c.budget;
        entry["repeat"] = c.repeat;
        entry["selected"] = c.selected;
        entry["accuracy"] = c.accuracy;
        entry["auc_macro"] = c.auc_macro;
        cells.push_back(std::move(entry));
    }
    auto& aggregates = doc["aggregates"] = nlohmann::ordered_json::array();
    for (const AggregateResult& a : report.aggregates) {
        nlohmann::ordered_json entry;
        entry["strategy"] = a.strategy;
        entry["budget"] = a.budget;
        entry["mean_accuracy"] = a.mean_accuracy;
        entry["std_accuracy"] = a.std_accuracy;
        entry["mean_auc"] = a.mean_auc;
        entry["std_auc"] = a.std_auc;
        aggregates.push_back(std::move(entry));
    }
    return doc;
}

void emit_outputs(const ExperimentReport& report, const std::filesystem::path& dir) {
    write_text_atomic(dir / "report.json", report_to_json(report).dump(2) + "\n");

    std::string curves = "strategy,m,mean_acc,std_acc,mean_auc,std_auc\n";
    for (const AggregateResult& a : report.aggregates) {
        curves += a.strategy + "," + std::to_string(a.budget) + "," +
                  format_double(a.mean_accuracy) + "," + format_double(a.std_accuracy) + "," +
                  format_double(a.mean_auc) + "," + format_double(a.std_auc) + "\n";
    }
    write_text_atomic(dir / "curves.csv", curves);

    for (const CellResult& c : report.cells) {
        std::string body = "rank,index\n";
        for (std::size_t i = 0; i < c.selected.size(); ++i)
            body += std::to_string(i) + "," + std::to_string(c.selected[i]) + "\n";
        const std::string name = c.strategy + "-m" + std::to_string(c.budget) + "-r" +
                                 std::to_string(c.repeat) + ".csv";
        write_text_atomic(dir / "selections" / name, body);
    }

    for (const DualRunTrace& t : report.traces) {
        const std::string stem = t.strategy + "-r" + std::to_string(t.repeat);
        write_pretrain_history_csv(t.pretrain_history, dir / "losses" / (stem + "-pretrain.csv"));
        write_joint_history_csv(t.joint_history, dir / "losses" / (stem + "-joint.csv"));
    }
}

}  // namespace dual
