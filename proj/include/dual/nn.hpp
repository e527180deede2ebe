#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dual/matrix.hpp"

namespace dual {

enum class Activation { relu, identity };

// Fully connected layer y = act(W x + b), operating on column-sample batches.
struct DenseLayer {
    Matrix weight;  // out x in
    Matrix bias;    // out x 1
    Activation activation = Activation::relu;

    std::size_t in_width() const { return weight.cols(); }
    std::size_t out_width() const { return weight.rows(); }
};

struct NetworkDims {
    std::size_t input_dim = 0;                 // d
    std::vector<std::size_t> hidden_widths;    // encoder hidden widths, decoder mirrors
    std::size_t latent_dim = 0;                // d'
    std::size_t n_samples = 0;                 // n
    std::size_t k_clusters = 0;                // K
};

struct ParamRef {
    std::string name;
    Matrix* value;
};
struct ConstParamRef {
    std::string name;
    const Matrix* value;
};

// Encoder, the two coefficient layers of the selection block, and decoder.
// q holds the sample-reconstruction coefficients (n x n, zero diagonal); p the
// centroid-reconstruction coefficients (n x K). Both act as bias-free layers
// with no activation.
struct DualNetwork {
    std::vector<DenseLayer> encoder;
    Matrix q;
    Matrix p;
    std::vector<DenseLayer> decoder;
    std::size_t latent_dim = 0;

    std::size_t input_dim() const { return encoder.front().in_width(); }
    std::size_t n_samples() const { return q.rows(); }
    std::size_t k_clusters() const { return p.cols(); }

    void zero_q_diagonal();
    bool q_diagonal_is_zero() const;

    // Fixed traversal order shared by the optimizer, the gradients and the
    // parameter file: encoder layers, selection.q, selection.p, decoder layers.
    std::vector<ParamRef> params();
    std::vector<ConstParamRef> params() const;
};

struct LayerGrad {
    Matrix weight;
    Matrix bias;
};

// Gradients in the same shapes and traversal order as DualNetwork::params().
struct GradientSet {
    std::vector<LayerGrad> encoder;
    Matrix q;
    Matrix p;
    std::vector<LayerGrad> decoder;

    std::vector<ConstParamRef> params() const;
};

struct LossWeights {
    double alpha = 1.0;  // weight of the sample-approximation loss
    double beta = 1.0;   // weight of the centroid-approximation loss
    double gamma = 0.1;  // l21 penalty on q
    double eta = 0.1;    // l21 penalty on p
};

// Everything the backward pass needs, captured during a forward pass.
struct ForwardTrace {
    std::vector<Matrix> encoder_outputs;  // [X, H1, ..., HL]
    std::vector<Matrix> decoder_outputs;  // [G0 (decoder input), G1, ..., GL]
    Matrix bottom_recon;                  // Phi(X) P, full mode only
    Matrix centroids;                     // frozen C, full mode only
    LossWeights weights;
    double loss_rec = 0.0;      // ||X - G||_F^2
    double loss_approx = 0.0;   // ||Phi - Phi Q||_F^2 + gamma ||Q||_21
    double loss_cluster = 0.0;  // ||C - Phi P||_F^2 + eta ||P||_21
    double loss_total = 0.0;    // loss_rec + alpha*loss_approx + beta*loss_cluster
    bool full = false;          // false: reconstruction-only (pretraining path)

    const Matrix& input() const { return encoder_outputs.front(); }
    const Matrix& latent() const { return encoder_outputs.back(); }
    const Matrix& output() const { return decoder_outputs.back(); }
    const Matrix& top_recon() const { return decoder_outputs.front(); }
};

// Glorot-uniform weights, zero biases, zero coefficient layers. Deterministic
// for a fixed seed.
DualNetwork init_params(const NetworkDims& dims, std::uint64_t seed);

Matrix encode(const DualNetwork& net, const Matrix& x);
Matrix decode(const DualNetwork& net, const Matrix& z);

// Pretraining path: the decoder reads Phi(X) directly and only the
// reconstruction loss is formed.
ForwardTrace forward_reconstruct(const DualNetwork& net, const Matrix& x);
GradientSet backward_reconstruct(const DualNetwork& net, const ForwardTrace& trace);

// Full objective: the decoder reads Phi(X) Q, and the trace carries all three
// loss terms against the frozen centroid matrix.
ForwardTrace forward_full(const DualNetwork& net, const Matrix& x, const Matrix& centroids,
                          const LossWeights& weights);
// Exact gradients of the traced loss for every parameter. The l21 terms use
// the smoothed surrogate sum_i sqrt(||row_i||^2 + eps^2) with eps = 1e-8; the
// q gradient has its diagonal projected to zero.
GradientSet backward_full(const DualNetwork& net, const ForwardTrace& trace);

// d(smoothed l21)/dM, rows scaled by 1/sqrt(||row||^2 + eps^2)
Matrix l21_grad_smoothed(const Matrix& m, double eps = 1e-8);

}  // namespace dual
