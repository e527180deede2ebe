#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dual/kmeans.hpp"
#include "dual/matrix.hpp"
#include "dual/nn.hpp"

namespace dual {

// All knobs of one training run. latent_dim == 0 resolves to min(d, 32).
struct TrainConfig {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 0.1;
    double eta = 0.1;  // kept separate from gamma even though the default grid ties them
    std::size_t k_clusters = 5;
    std::size_t latent_dim = 0;
    std::vector<std::size_t> hidden_widths{128, 64};
    std::size_t pretrain_epochs = 500;
    std::size_t joint_epochs = 500;
    double lr = 1e-4;
    std::uint64_t seed = 0;

    void validate() const;
    LossWeights loss_weights() const { return {alpha, beta, gamma, eta}; }
    std::size_t resolve_latent_dim(std::size_t input_dim) const;
};

struct JointLossRecord {
    double rec = 0.0;
    double approx = 0.0;
    double cluster = 0.0;
    double total = 0.0;
};

// Ranking of all samples. combined_score[ranked_indices[0]] is the largest;
// ties fall back to ascending index.
struct SelectionResult {
    std::vector<std::size_t> ranked_indices;
    std::vector<double> q_hat;     // min-max normalized row norms of Q, in [0,1]
    std::vector<double> p_hat;     // likewise for P
    std::vector<double> combined;  // the score actually ranked by
};

struct RunResult {
    DualNetwork net;
    KMeansResult clustering;
    SelectionResult selection;
    std::vector<double> pretrain_history;        // entry e = L_rec after e updates
    std::vector<JointLossRecord> joint_history;  // entry e = losses after e updates
};

// Stage 1: full-batch Adam on the encoder/decoder reconstruction loss; the
// selection layers are not touched. Returns the loss history (epochs+1 long).
std::vector<double> pretrain(DualNetwork& net, const Matrix& x, const TrainConfig& cfg);

// Stage 3: full-batch Adam on the full objective against frozen centroids.
// The q diagonal is re-zeroed after every step.
std::vector<JointLossRecord> joint_train(DualNetwork& net, const Matrix& x,
                                         const Matrix& centroids, const TrainConfig& cfg);

// Row norms of Q and P, each min-max normalized to [0,1]; a constant norm
// vector normalizes to all zeros. Ranking is by q_hat + p_hat descending
// (q_hat alone when use_p is false), stable on ascending index.
SelectionResult score_samples(const Matrix& q, const Matrix& p, bool use_p = true);

std::vector<std::size_t> select_top_m(const SelectionResult& result, std::size_t m);

// The full three-stage procedure: pretrain, K-means on the latent codes,
// joint training, then scoring. Deterministic for a fixed cfg.seed. When
// beta == 0 the cluster loss is disabled and scoring uses q_hat alone.
RunResult run_dual(const Matrix& x, const TrainConfig& cfg);

void write_selection_csv(const SelectionResult& result, const std::filesystem::path& path);
void write_pretrain_history_csv(const std::vector<double>& history,
                                const std::filesystem::path& path);
void write_joint_history_csv(const std::vector<JointLossRecord>& history,
                             const std::filesystem::path& path);

}  // namespace dual
