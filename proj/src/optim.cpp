#include "dual/optim.hpp"

#include <cmath>
#include <string>

#include "dual/errors.hpp"

namespace dual {

AdamState AdamState::init(const DualNetwork& net, const AdamParams& hyper) {
    AdamState state;
    state.hyper = hyper;
    for (const auto& ref : net.params()) {
        state.first_moment.emplace_back(ref.value->rows(), ref.value->cols());
        state.second_moment.emplace_back(ref.value->rows(), ref.value->cols());
    }
    return state;
}

void adam_update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v, std::uint64_t t,
                 const AdamParams& hyper) {
    if (grad.rows() != param.rows() || grad.cols() != param.cols()) {
        throw ContractViolation("adam_update: gradient shape mismatch");
    }
    const double corr1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(t));
    const double corr2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad.data()[i];
        double& mi = m.data()[i];
        double& vi = v.data()[i];
        mi = hyper.beta1 * mi + (1.0 - hyper.beta1) * g;
        vi = hyper.beta2 * vi + (1.0 - hyper.beta2) * g * g;
        const double m_hat = mi / corr1;
        const double v_hat = vi / corr2;
        param.data()[i] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
    }
}

void adam_step(DualNetwork& net, const GradientSet& grads, AdamState& state, UpdateScope scope) {
    auto params = net.params();
    const auto grad_refs = grads.params();
    if (params.size() != grad_refs.size() || params.size() != state.first_moment.size()) {
        throw ContractViolation("adam_step: parameter/gradient/state count mismatch");
    }
    ++state.step_count;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (scope == UpdateScope::encoder_decoder_only &&
            (params[i].name == "selection.q" || params[i].name == "selection.p")) {
            continue;
        }
        adam_update(*params[i].value, *grad_refs[i].value, state.first_moment[i],
                    state.second_moment[i], state.step_count, state.hyper);
    }
    net.zero_q_diagonal();
}

}  // namespace dual
