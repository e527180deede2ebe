#include "dual/nn.hpp"

#include <cmath>
#include <string>

#include "dual/errors.hpp"

namespace dual {

namespace {

void require_finite(const Matrix& m, const std::string& stage) {
    if (!is_finite(m)) throw NumericFailure("non-finite values in " + stage);
}

Matrix apply_layer(const DenseLayer& layer, const Matrix& input) {
    Matrix out = matmul(layer.weight, input);
    const std::size_t rows = out.rows(), cols = out.cols();
    for (std::size_t i = 0; i < rows; ++i) {
        const double b = layer.bias(i, 0);
        for (std::size_t j = 0; j < cols; ++j) out(i, j) += b;
    }
    if (layer.activation == Activation::relu) {
        for (std::size_t i = 0; i < out.size(); ++i)
            if (out.data()[i] < 0.0) out.data()[i] = 0.0;
    }
    return out;
}

// d(loss)/d(pre-activation) from d(loss)/d(output); the ReLU mask is read off
// the stored outputs (output > 0 <=> unit active).
Matrix preact_delta(const DenseLayer& layer, const Matrix& delta, const Matrix& output) {
    if (layer.activation == Activation::identity) return delta;
    Matrix d = delta;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (output.data()[i] <= 0.0) d.data()[i] = 0.0;
    return d;
}

Matrix bias_grad(const Matrix& dpre) {
    Matrix g(dpre.rows(), 1);
    for (std::size_t i = 0; i < dpre.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < dpre.cols(); ++j) s += dpre(i, j);
        g(i, 0) = s;
    }
    return g;
}

// Backpropagates through a dense chain. outputs[l] is the input to layer l,
// outputs[l+1] its output. Returns d(loss)/d(chain input) and fills grads.
Matrix backprop_chain(const std::vector<DenseLayer>& layers, const std::vector<Matrix>& outputs,
                      Matrix delta, std::vector<LayerGrad>& grads) {
    grads.resize(layers.size());
    for (std::size_t l = layers.size(); l-- > 0;) {
        const Matrix dpre = preact_delta(layers[l], delta, outputs[l + 1]);
        grads[l].weight = matmul(dpre, transpose(outputs[l]));
        grads[l].bias = bias_grad(dpre);
        delta = matmul(transpose(layers[l].weight), dpre);
    }
    return delta;
}

}  // namespace

void DualNetwork::zero_q_diagonal() {
    for (std::size_t i = 0; i < q.rows(); ++i) q(i, i) = 0.0;
}

bool DualNetwork::q_diagonal_is_zero() const {
    for (std::size_t i = 0; i < q.rows(); ++i)
        if (q(i, i) != 0.0) return false;
    return true;
}

namespace {

template <typename Ref, typename Layers, typename Mat>
std::vector<Ref> collect_params(Layers& encoder, Mat& q, Mat& p, Layers& decoder) {
    std::vector<Ref> refs;
    for (std::size_t l = 0; l < encoder.size(); ++l) {
        refs.push_back({"encoder." + std::to_string(l) + ".weight", &encoder[l].weight});
        refs.push_back({"encoder." + std::to_string(l) + ".bias", &encoder[l].bias});
    }
    refs.push_back({"selection.q", &q});
    refs.push_back({"selection.p", &p});
    for (std::size_t l = 0; l < decoder.size(); ++l) {
        refs.push_back({"decoder." + std::to_string(l) + ".weight", &decoder[l].weight});
        refs.push_back({"decoder." + std::to_string(l) + ".bias", &decoder[l].bias});
    }
    return refs;
}

}  // namespace

std::vector<ParamRef> DualNetwork::params() {
    return collect_params<ParamRef>(encoder, q, p, decoder);
}

std::vector<ConstParamRef> DualNetwork::params() const {
    return collect_params<ConstParamRef>(encoder, q, p, decoder);
}

std::vector<ConstParamRef> GradientSet::params() const {
    return collect_params<ConstParamRef>(encoder, q, p, decoder);
}

DualNetwork init_params(const NetworkDims& dims, std::uint64_t seed) {
    if (dims.input_dim == 0 || dims.latent_dim == 0 || dims.n_samples == 0 ||
        dims.k_clusters == 0) {
        throw ContractViolation("init_params: all dimensions must be positive");
    }
    RandomEngine rng(seed);

    auto make_chain = [&rng](const std::vector<std::size_t>& widths, bool decoder_chain) {
        std::vector<DenseLayer> layers;
        for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
            const std::size_t fan_in = widths[l], fan_out = widths[l + 1];
            const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
            DenseLayer layer;
            layer.weight = Matrix::random_uniform(fan_out, fan_in, -bound, bound, rng);
            layer.bias = Matrix(fan_out, 1);
            const bool last = l + 2 == widths.size();
            layer.activation =
                decoder_chain && last ? Activation::identity : Activation::relu;
            layers.push_back(std::move(layer));
        }
        return layers;
    };

    std::vector<std::size_t> enc_widths{dims.input_dim};
    enc_widths.insert(enc_widths.end(), dims.hidden_widths.begin(), dims.hidden_widths.end());
    enc_widths.push_back(dims.latent_dim);
    std::vector<std::size_t> dec_widths(enc_widths.rbegin(), enc_widths.rend());

    DualNetwork net;
    net.encoder = make_chain(enc_widths, false);
    net.decoder = make_chain(dec_widths, true);
    net.q = Matrix(dims.n_samples, dims.n_samples);
    net.p = Matrix(dims.n_samples, dims.k_clusters);
    net.latent_dim = dims.latent_dim;
    return net;
}

Matrix encode(const DualNetwork& net, const Matrix& x) {
    if (x.rows() != net.input_dim()) {
        throw ContractViolation("encode: input width " + std::to_string(x.rows()) +
                                " != " + std::to_string(net.input_dim()));
    }
    Matrix h = x;
    for (const auto& layer : net.encoder) h = apply_layer(layer, h);
    return h;
}

Matrix decode(const DualNetwork& net, const Matrix& z) {
    if (z.rows() != net.latent_dim) {
        throw ContractViolation("decode: input width " + std::to_string(z.rows()) +
                                " != " + std::to_string(net.latent_dim));
    }
    Matrix g = z;
    for (const auto& layer : net.decoder) g = apply_layer(layer, g);
    return g;
}

namespace {

// Shared forward skeleton. In full mode the decoder reads Phi(X) Q and the
// selection losses are formed; in reconstruction mode it reads Phi(X).
ForwardTrace run_forward(const DualNetwork& net, const Matrix& x, const Matrix* centroids,
                         const LossWeights& weights, bool full) {
    if (x.rows() != net.input_dim()) {
        throw ContractViolation("forward: input width " + std::to_string(x.rows()) +
                                " != " + std::to_string(net.input_dim()));
    }
    ForwardTrace trace;
    trace.full = full;
    trace.weights = weights;

    trace.encoder_outputs.reserve(net.encoder.size() + 1);
    trace.encoder_outputs.push_back(x);
    for (std::size_t l = 0; l < net.encoder.size(); ++l) {
        trace.encoder_outputs.push_back(apply_layer(net.encoder[l], trace.encoder_outputs.back()));
        require_finite(trace.encoder_outputs.back(), "encoder layer " + std::to_string(l));
    }
    const Matrix& phi = trace.encoder_outputs.back();

    if (full) {
        if (!net.q_diagonal_is_zero())
            throw ContractViolation("forward_full: q diagonal not zero");
        if (centroids->rows() != net.latent_dim)
            throw ContractViolation("forward_full: centroid rows != latent dim");
        if (x.cols() != net.n_samples())
            throw ContractViolation("forward_full: sample count != q size");
        trace.centroids = *centroids;
        trace.decoder_outputs.push_back(matmul(phi, net.q));
        require_finite(trace.decoder_outputs.back(), "selection top branch");
        trace.bottom_recon = matmul(phi, net.p);
        require_finite(trace.bottom_recon, "selection bottom branch");
    } else {
        trace.decoder_outputs.push_back(phi);
    }

    for (std::size_t l = 0; l < net.decoder.size(); ++l) {
        trace.decoder_outputs.push_back(apply_layer(net.decoder[l], trace.decoder_outputs.back()));
        require_finite(trace.decoder_outputs.back(), "decoder layer " + std::to_string(l));
    }

    trace.loss_rec = frobenius_sq(sub(x, trace.decoder_outputs.back()));
    if (full) {
        trace.loss_approx =
            frobenius_sq(sub(phi, trace.top_recon())) + weights.gamma * l21_norm(net.q);
        trace.loss_cluster =
            frobenius_sq(sub(trace.centroids, trace.bottom_recon)) + weights.eta * l21_norm(net.p);
        trace.loss_total =
            trace.loss_rec + weights.alpha * trace.loss_approx + weights.beta * trace.loss_cluster;
    } else {
        trace.loss_total = trace.loss_rec;
    }
    if (!std::isfinite(trace.loss_total)) throw NumericFailure("non-finite values in loss");
    return trace;
}

}  // namespace

ForwardTrace forward_reconstruct(const DualNetwork& net, const Matrix& x) {
    return run_forward(net, x, nullptr, LossWeights{}, false);
}

ForwardTrace forward_full(const DualNetwork& net, const Matrix& x, const Matrix& centroids,
                          const LossWeights& weights) {
    return run_forward(net, x, &centroids, weights, true);
}

Matrix l21_grad_smoothed(const Matrix& m, double eps) {
    Matrix g(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * m(i, j);
        const double inv = 1.0 / std::sqrt(s + eps * eps);
        for (std::size_t j = 0; j < m.cols(); ++j) g(i, j) = m(i, j) * inv;
    }
    return g;
}

GradientSet backward_reconstruct(const DualNetwork& net, const ForwardTrace& trace) {
    if (trace.full) throw ContractViolation("backward_reconstruct: trace is full-mode");
    GradientSet grads;
    Matrix delta = scale(sub(trace.input(), trace.output()), -2.0);
    delta = backprop_chain(net.decoder, trace.decoder_outputs, std::move(delta), grads.decoder);
    backprop_chain(net.encoder, trace.encoder_outputs, std::move(delta), grads.encoder);
    grads.q = Matrix(net.q.rows(), net.q.cols());
    grads.p = Matrix(net.p.rows(), net.p.cols());
    return grads;
}

GradientSet backward_full(const DualNetwork& net, const ForwardTrace& trace) {
    if (!trace.full) throw ContractViolation("backward_full: trace is reconstruction-mode");
    const LossWeights& w = trace.weights;
    const Matrix& phi = trace.latent();
    const Matrix phi_t = transpose(phi);

    const Matrix top_residual = sub(phi, trace.top_recon());            // Phi - Phi Q
    const Matrix bottom_residual = sub(trace.centroids, trace.bottom_recon);  // C - Phi P
    GradientSet grads;

    // decoder chain, seeded by d(loss_rec)/dG = -2 (X - G)
    Matrix delta = scale(sub(trace.input(), trace.output()), -2.0);
    delta = backprop_chain(net.decoder, trace.decoder_outputs, std::move(delta), grads.decoder);
    // delta now holds d(loss)/d(Phi Q) through the decoder

    // q: decoder path + approximation fit + smoothed l21, diagonal projected out
    grads.q = add(matmul(phi_t, delta),
                  add(scale(matmul(phi_t, top_residual), -2.0 * w.alpha),
                      scale(l21_grad_smoothed(net.q), w.alpha * w.gamma)));
    for (std::size_t i = 0; i < grads.q.rows(); ++i) grads.q(i, i) = 0.0;

    // p: cluster fit + smoothed l21
    grads.p = add(scale(matmul(phi_t, bottom_residual), -2.0 * w.beta),
                  scale(l21_grad_smoothed(net.p), w.beta * w.eta));

    // d(loss)/dPhi: decoder path, approximation fit 2a(E - E Q^T), cluster fit
    const Matrix q_t = transpose(net.q);
    Matrix dphi = add(matmul(delta, q_t),
                      add(scale(sub(top_residual, matmul(top_residual, q_t)), 2.0 * w.alpha),
                          scale(matmul(bottom_residual, transpose(net.p)), -2.0 * w.beta)));

    backprop_chain(net.encoder, trace.encoder_outputs, std::move(dphi), grads.encoder);

    for (const auto& ref : grads.params()) {
        if (!is_finite(*ref.value)) throw NumericFailure("non-finite gradient for " + ref.name);
    }
    return grads;
}

}  // namespace dual
