#include <filesystem>
#include <numeric>
#include <set>

#include "doctest.h"

#include "dual/dataset.hpp"
#include "dual/errors.hpp"
#include "dual/io.hpp"
#include "dual/matrix.hpp"
#include "dual/nn.hpp"
#include "dual/rng.hpp"
#include "dual/trainer.hpp"

using namespace dual;

namespace {

std::filesystem::path temp_dir(const std::string& leaf) {
    const auto dir = std::filesystem::temp_directory_path() / "dual_unit" / leaf;
    std::filesystem::create_directories(dir);
    return dir;
}

// rows with l2 norms 1, 2, 3
const Matrix kQ123 = Matrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 3.0}});
// rows with l2 norms 3, 2, 1
const Matrix kP321 = Matrix::from_rows({{3.0}, {2.0}, {1.0}});

TrainConfig small_cfg() {
    TrainConfig cfg;
    cfg.alpha = 0.5;
    cfg.beta = 0.5;
    cfg.gamma = 0.01;
    cfg.eta = 0.01;
    cfg.k_clusters = 3;
    cfg.latent_dim = 4;
    cfg.hidden_widths = {8};
    cfg.pretrain_epochs = 25;
    cfg.joint_epochs = 25;
    cfg.lr = 1e-3;
    cfg.seed = 5;
    return cfg;
}

Matrix blob_features(std::size_t per_blob, std::uint64_t seed) {
    const Dataset data =
        make_axis_blobs({per_blob, per_blob, per_blob}, 6, /*separation=*/8.0, /*sigma=*/1.0, seed);
    const Scaler scaler = zscore_fit(data.features);
    return zscore_apply(scaler, data.features);
}

}  // namespace

TEST_CASE("score_samples: opposing norm ladders cancel into an all-tie ranking") {
    const SelectionResult r = score_samples(kQ123, kP321);
    CHECK(r.q_hat == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(r.p_hat == std::vector<double>{1.0, 0.5, 0.0});
    CHECK(r.combined == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(r.ranked_indices == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("score_samples: constant p row norms contribute nothing") {
    const Matrix q = Matrix::from_rows({{0.0, 0.0}, {3.0, 4.0}});  // norms 0, 5
    const Matrix p = Matrix::zeros(2, 1);                          // norms 0, 0
    const SelectionResult r = score_samples(q, p);
    CHECK(r.q_hat == std::vector<double>{0.0, 1.0});
    CHECK(r.p_hat == std::vector<double>{0.0, 0.0});
    CHECK(r.ranked_indices == std::vector<std::size_t>{1, 0});
}

TEST_CASE("score_samples: all-zero coefficients rank by the index tie rule") {
    const SelectionResult r = score_samples(Matrix::zeros(4, 4), Matrix::zeros(4, 2));
    CHECK(r.combined == std::vector<double>{0.0, 0.0, 0.0, 0.0});
    CHECK(r.ranked_indices == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("score_samples: ranking is invariant to a positive rescaling of q") {
    RandomEngine rng(41);
    const Matrix q = Matrix::random_uniform(8, 8, -1.0, 1.0, rng);
    const Matrix p = Matrix::random_uniform(8, 3, -1.0, 1.0, rng);
    const SelectionResult base = score_samples(q, p);
    const SelectionResult scaled = score_samples(scale(q, 3.7), p);
    CHECK(base.ranked_indices == scaled.ranked_indices);
}

TEST_CASE("score_samples: combined scores are non-increasing along the ranking") {
    RandomEngine rng(43);
    const Matrix q = Matrix::random_uniform(10, 10, -1.0, 1.0, rng);
    const Matrix p = Matrix::random_uniform(10, 2, -1.0, 1.0, rng);
    const SelectionResult r = score_samples(q, p);
    for (std::size_t i = 0; i + 1 < r.ranked_indices.size(); ++i)
        CHECK(r.combined[r.ranked_indices[i]] >= r.combined[r.ranked_indices[i + 1]]);
    for (double v : r.q_hat) CHECK((v >= 0.0 && v <= 1.0));
    for (double v : r.p_hat) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("select_top_m: prefixes, boundaries and contract") {
    SelectionResult r;
    r.ranked_indices = {2, 0, 1};
    CHECK(select_top_m(r, 2) == std::vector<std::size_t>{2, 0});
    CHECK(select_top_m(r, 0).empty());
    CHECK(select_top_m(r, 3) == std::vector<std::size_t>{2, 0, 1});
    CHECK_THROWS_AS(select_top_m(r, 4), ContractViolation);
}

TEST_CASE("pretrain: zero epochs leave every parameter untouched") {
    const Matrix x = blob_features(5, 2);
    TrainConfig cfg = small_cfg();
    cfg.pretrain_epochs = 0;

    NetworkDims dims;
    dims.input_dim = x.rows();
    dims.hidden_widths = cfg.hidden_widths;
    dims.latent_dim = cfg.latent_dim;
    dims.n_samples = x.cols();
    dims.k_clusters = cfg.k_clusters;
    DualNetwork net = init_params(dims, 9);
    const DualNetwork before = net;

    const auto history = pretrain(net, x, cfg);
    CHECK(history.size() == 1);
    auto pa = before.params();
    auto pb = net.params();
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i].value == *pb[i].value);
}

TEST_CASE("pretrain: compressible low-rank data reaches a tenth of the initial loss") {
    // rank-2 data in five dimensions: X = A z with A 5x2, z 2x100
    RandomEngine rng(55);
    const Matrix a = Matrix::random_uniform(5, 2, -1.0, 1.0, rng);
    const Matrix z = Matrix::random_uniform(2, 100, -2.0, 2.0, rng);
    const Matrix raw = matmul(a, z);
    const Scaler scaler = zscore_fit(raw);
    const Matrix x = zscore_apply(scaler, raw);

    TrainConfig cfg;
    cfg.latent_dim = 2;
    cfg.hidden_widths = {16, 8};
    cfg.pretrain_epochs = 600;
    cfg.lr = 5e-3;
    cfg.k_clusters = 2;
    cfg.seed = 3;

    NetworkDims dims;
    dims.input_dim = 5;
    dims.hidden_widths = cfg.hidden_widths;
    dims.latent_dim = 2;
    dims.n_samples = 100;
    dims.k_clusters = 2;
    DualNetwork net = init_params(dims, cfg.seed);

    const auto history = pretrain(net, x, cfg);
    REQUIRE(history.size() == cfg.pretrain_epochs + 1);
    CHECK(history.back() < 0.1 * history.front());
}

TEST_CASE("pretrain: identical seeds give identical loss histories") {
    const Matrix x = blob_features(6, 4);
    const TrainConfig cfg = small_cfg();

    NetworkDims dims;
    dims.input_dim = x.rows();
    dims.hidden_widths = cfg.hidden_widths;
    dims.latent_dim = cfg.latent_dim;
    dims.n_samples = x.cols();
    dims.k_clusters = cfg.k_clusters;

    DualNetwork net_a = init_params(dims, 21);
    DualNetwork net_b = init_params(dims, 21);
    CHECK(pretrain(net_a, x, cfg) == pretrain(net_b, x, cfg));
}

TEST_CASE("joint_train: with zero tradeoffs the first loss is reconstruction from zero codes") {
    const Matrix x = blob_features(5, 6);
    TrainConfig cfg = small_cfg();
    cfg.alpha = 0.0;
    cfg.beta = 0.0;
    cfg.joint_epochs = 3;

    NetworkDims dims;
    dims.input_dim = x.rows();
    dims.hidden_widths = cfg.hidden_widths;
    dims.latent_dim = cfg.latent_dim;
    dims.n_samples = x.cols();
    dims.k_clusters = cfg.k_clusters;
    DualNetwork net = init_params(dims, 8);  // q starts at zero
    const DualNetwork before = net;

    const Matrix centroids = Matrix::zeros(cfg.latent_dim, cfg.k_clusters);
    const auto history = joint_train(net, x, centroids, cfg);

    // decoder input is Phi(X) Q == 0, so the starting loss must equal
    // reconstructing X from an all-zero code batch
    const Matrix zero_codes = Matrix::zeros(cfg.latent_dim, x.cols());
    const double expected = frobenius_sq(sub(x, decode(before, zero_codes)));
    CHECK(history.front().rec == expected);
    CHECK(history.front().total == history.front().rec);
}

TEST_CASE("joint_train: loss decomposition identity holds at every recorded epoch") {
    const Matrix x = blob_features(5, 7);
    TrainConfig cfg = small_cfg();
    cfg.joint_epochs = 12;

    NetworkDims dims;
    dims.input_dim = x.rows();
    dims.hidden_widths = cfg.hidden_widths;
    dims.latent_dim = cfg.latent_dim;
    dims.n_samples = x.cols();
    dims.k_clusters = cfg.k_clusters;
    DualNetwork net = init_params(dims, 10);
    pretrain(net, x, cfg);
    const KMeansResult clusters = kmeans(encode(net, x), cfg.k_clusters, 77);

    const auto history = joint_train(net, x, clusters.centroids, cfg);
    REQUIRE(history.size() == cfg.joint_epochs + 1);
    for (const JointLossRecord& rec : history)
        CHECK(rec.total == rec.rec + cfg.alpha * rec.approx + cfg.beta * rec.cluster);
}

TEST_CASE("joint_train: rejects a network whose q diagonal is nonzero") {
    const Matrix x = blob_features(4, 11);
    TrainConfig cfg = small_cfg();
    NetworkDims dims;
    dims.input_dim = x.rows();
    dims.hidden_widths = cfg.hidden_widths;
    dims.latent_dim = cfg.latent_dim;
    dims.n_samples = x.cols();
    dims.k_clusters = cfg.k_clusters;
    DualNetwork net = init_params(dims, 12);
    net.q(1, 1) = 0.3;
    const Matrix centroids = Matrix::zeros(cfg.latent_dim, cfg.k_clusters);
    CHECK_THROWS_AS(joint_train(net, x, centroids, cfg), ContractViolation);
}

TEST_CASE("run_dual: deterministic ranking, zero q diagonal, permutation output") {
    const Matrix x = blob_features(6, 13);
    const TrainConfig cfg = small_cfg();
    const RunResult a = run_dual(x, cfg);
    const RunResult b = run_dual(x, cfg);
    CHECK(a.selection.ranked_indices == b.selection.ranked_indices);
    CHECK(a.selection.combined == b.selection.combined);
    CHECK(a.net.q_diagonal_is_zero());

    std::vector<std::size_t> sorted = a.selection.ranked_indices;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expected(x.cols());
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(sorted == expected);

    CHECK(a.pretrain_history.size() == cfg.pretrain_epochs + 1);
    CHECK(a.joint_history.size() == cfg.joint_epochs + 1);
    CHECK(a.clustering.centroids.cols() == cfg.k_clusters);
}

TEST_CASE("run_dual: beta=0 disables the centroid branch and scores by q alone") {
    const Matrix x = blob_features(6, 14);
    TrainConfig cfg = small_cfg();
    cfg.beta = 0.0;
    const RunResult run = run_dual(x, cfg);
    // p receives no gradient, stays at its zero initialization
    CHECK(run.net.p == Matrix::zeros(x.cols(), cfg.k_clusters));
    CHECK(run.selection.combined == run.selection.q_hat);
    const SelectionResult expectation = score_samples(run.net.q, run.net.p, false);
    CHECK(run.selection.ranked_indices == expectation.ranked_indices);
}

TEST_CASE("history CSV writers emit one labelled row per epoch") {
    const auto dir = temp_dir("csv");
    write_pretrain_history_csv({3.0, 2.0, 1.0}, dir / "pre.csv");
    const std::string pre = read_text(dir / "pre.csv");
    CHECK(pre == "epoch,loss_rec\n0,3\n1,2\n2,1\n");

    write_joint_history_csv({{1.0, 2.0, 3.0, 4.5}}, dir / "joint.csv");
    const std::string joint = read_text(dir / "joint.csv");
    CHECK(joint == "epoch,loss_rec,loss_approx,loss_cluster,loss_total\n0,1,2,3,4.5\n");

    SelectionResult sel;
    sel.ranked_indices = {1, 0};
    sel.q_hat = {0.0, 1.0};
    sel.p_hat = {0.25, 0.5};
    sel.combined = {0.25, 1.5};
    write_selection_csv(sel, dir / "sel.csv");
    const std::string s = read_text(dir / "sel.csv");
    CHECK(s == "rank,index,q_hat,p_hat,combined\n0,1,1,0.5,1.5\n1,0,0,0.25,0.25\n");
}
