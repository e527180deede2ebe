#include "dual/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "dual/errors.hpp"
#include "dual/io.hpp"
#include "dual/optim.hpp"
#include "dual/rng.hpp"

namespace dual {

void TrainConfig::validate() const {
    if (alpha < 0 || beta < 0 || gamma < 0 || eta < 0)
        throw ContractViolation("TrainConfig: tradeoff parameters must be nonnegative");
    if (k_clusters == 0) throw ContractViolation("TrainConfig: k_clusters must be positive");
    if (lr <= 0) throw ContractViolation("TrainConfig: lr must be positive");
}

std::size_t TrainConfig::resolve_latent_dim(std::size_t input_dim) const {
    if (latent_dim != 0) return latent_dim;
    return std::min<std::size_t>(input_dim, 32);
}

namespace {

[[noreturn]] void rethrow_with_epoch(const NumericFailure& failure, const char* stage,
                                     std::size_t epoch) {
    throw NumericFailure(std::string(failure.what()) + " (" + stage + " epoch " +
                         std::to_string(epoch) + ")");
}

}  // namespace

std::vector<double> pretrain(DualNetwork& net, const Matrix& x, const TrainConfig& cfg) {
    cfg.validate();
    if (!is_finite(x)) throw ContractViolation("pretrain: input must be finite");

    AdamState state = AdamState::init(net, AdamParams{.lr = cfg.lr});
    std::vector<double> history;
    history.reserve(cfg.pretrain_epochs + 1);
    for (std::size_t epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
        try {
            const ForwardTrace trace = forward_reconstruct(net, x);
            history.push_back(trace.loss_rec);
            const GradientSet grads = backward_reconstruct(net, trace);
            adam_step(net, grads, state, UpdateScope::encoder_decoder_only);
        } catch (const NumericFailure& failure) {
            rethrow_with_epoch(failure, "pretrain", epoch);
        }
    }
    history.push_back(forward_reconstruct(net, x).loss_rec);
    return history;
}

std::vector<JointLossRecord> joint_train(DualNetwork& net, const Matrix& x,
                                         const Matrix& centroids, const TrainConfig& cfg) {
    cfg.validate();
    if (!is_finite(x)) throw ContractViolation("joint_train: input must be finite");
    if (!net.q_diagonal_is_zero()) throw ContractViolation("joint_train: q diagonal not zero");

    const LossWeights weights = cfg.loss_weights();
    AdamState state = AdamState::init(net, AdamParams{.lr = cfg.lr});
    std::vector<JointLossRecord> history;
    history.reserve(cfg.joint_epochs + 1);
    auto record = [](const ForwardTrace& t) {
        return JointLossRecord{t.loss_rec, t.loss_approx, t.loss_cluster, t.loss_total};
    };
    for (std::size_t epoch = 0; epoch < cfg.joint_epochs; ++epoch) {
        try {
            const ForwardTrace trace = forward_full(net, x, centroids, weights);
            history.push_back(record(trace));
            const GradientSet grads = backward_full(net, trace);
            adam_step(net, grads, state, UpdateScope::all);
        } catch (const NumericFailure& failure) {
            rethrow_with_epoch(failure, "joint", epoch);
        }
    }
    history.push_back(record(forward_full(net, x, centroids, weights)));
    return history;
}

namespace {

// min-max to [0,1]; a constant vector maps to all zeros
std::vector<double> minmax_normalize(const std::vector<double>& v) {
    std::vector<double> out(v.size(), 0.0);
    if (v.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi == lo) return out;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) / (hi - lo);
    return out;
}

}  // namespace

SelectionResult score_samples(const Matrix& q, const Matrix& p, bool use_p) {
    if (q.rows() != p.rows())
        throw ContractViolation("score_samples: Q and P row counts differ");
    if (!is_finite(q) || !is_finite(p))
        throw ContractViolation("score_samples: Q and P must be finite");

    SelectionResult result;
    result.q_hat = minmax_normalize(row_l2_norms(q));
    result.p_hat = minmax_normalize(row_l2_norms(p));
    const std::size_t n = q.rows();
    result.combined.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        result.combined[i] = use_p ? result.q_hat[i] + result.p_hat[i] : result.q_hat[i];

    result.ranked_indices.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.ranked_indices[i] = i;
    std::stable_sort(result.ranked_indices.begin(), result.ranked_indices.end(),
                     [&](std::size_t a, std::size_t b) {
                         return result.combined[a] > result.combined[b];
                     });
    return result;
}

std::vector<std::size_t> select_top_m(const SelectionResult& result, std::size_t m) {
    if (m > result.ranked_indices.size())
        throw ContractViolation("select_top_m: m exceeds sample count");
    return {result.ranked_indices.begin(), result.ranked_indices.begin() + m};
}

RunResult run_dual(const Matrix& x, const TrainConfig& cfg) {
    cfg.validate();
    if (!is_finite(x)) throw ContractViolation("run_dual: input must be finite");

    NetworkDims dims;
    dims.input_dim = x.rows();
    dims.hidden_widths = cfg.hidden_widths;
    dims.latent_dim = cfg.resolve_latent_dim(x.rows());
    dims.n_samples = x.cols();
    dims.k_clusters = cfg.k_clusters;

    RunResult run;
    run.net = init_params(dims, cfg.seed);
    run.pretrain_history = pretrain(run.net, x, cfg);
    run.clustering = kmeans(encode(run.net, x), cfg.k_clusters, derive_seed(cfg.seed, 1));
    run.joint_history = joint_train(run.net, x, run.clustering.centroids, cfg);
    run.selection = score_samples(run.net.q, run.net.p, cfg.beta != 0.0);
    return run;
}

void write_selection_csv(const SelectionResult& result, const std::filesystem::path& path) {
    std::string csv = "rank,index,q_hat,p_hat,combined\n";
    for (std::size_t r = 0; r < result.ranked_indices.size(); ++r) {
        const std::size_t i = result.ranked_indices[r];
        csv += std::to_string(r) + ',' + std::to_string(i) + ',' + format_double(result.q_hat[i]) +
               ',' + format_double(result.p_hat[i]) + ',' + format_double(result.combined[i]) +
               '\n';
    }
    write_text_atomic(path, csv);
}

void write_pretrain_history_csv(const std::vector<double>& history,
                                const std::filesystem::path& path) {
    std::string csv = "epoch,loss_rec\n";
    for (std::size_t e = 0; e < history.size(); ++e)
        csv += std::to_string(e) + ',' + format_double(history[e]) + '\n';
    write_text_atomic(path, csv);
}

void write_joint_history_csv(const std::vector<JointLossRecord>& history,
                             const std::filesystem::path& path) {
    std::string csv = "epoch,loss_rec,loss_approx,loss_cluster,loss_total\n";
    for (std::size_t e = 0; e < history.size(); ++e) {
        const JointLossRecord& rec = history[e];
        csv += std::to_string(e) + ',' + format_double(rec.rec) + ',' + format_double(rec.approx) +
               ',' + format_double(rec.cluster) + ',' + format_double(rec.total) + '\n';
    }
    write_text_atomic(path, csv);
}

}  // namespace dual
